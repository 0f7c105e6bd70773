fn main() {
    std::process::exit(multitile::cli::main_with_args(std::env::args_os()));
}
