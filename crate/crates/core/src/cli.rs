//! The `multitile` command line.
//!
//! Exit codes: 0 success, 1 bad input, 2 the mathematics failed (no
//! certificate, a residue collision, a singular or non-uniform system),
//! 3 internal error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::admissibility::{self, AdmissibilityCertificate, CheckOutcome, Collision};
use crate::domain::MultiTileDomain;
use crate::error::Error;
use crate::io::{self, IoError, ResultRow, SamplesMeta};
use crate::reconstruction::{self, ExponentialSum, SpectralData};
use crate::system::{ExponentialSystem, Frequency, ShiftSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MATH: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "multitile", version, about = "Exponential Riesz bases on lattice multi-tiles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify (v, q)-admissibility, or search for a pair.
    Check(CheckArgs),
    /// Print the shift index set and shift vectors of every cell.
    Shifts(CertArgs),
    /// Evaluate a dual function on a grid over the domain.
    Dual(DualArgs),
    /// Biorthogonality residual over a box of frequencies.
    Verify(VerifyArgs),
    /// Riesz bounds and per-cell conditioning.
    Bounds(CertArgs),
    /// Recover point values from a samples file.
    Reconstruct(ReconstructArgs),
    /// Write spectral data for a test function.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Args)]
pub struct CertArgs {
    /// Domain spec (JSON).
    #[arg(long)]
    pub domain: PathBuf,
    /// Comma-separated v_l; a single value applies to every axis. Defaults to 1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<f64>>,
    /// Comma-separated q_l. Without it a pair is searched for.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<u64>>,
    /// Search bound for v_l [default: 2k].
    #[arg(long)]
    pub v_max: Option<u64>,
    /// Search bound for q_l [default: 2k].
    #[arg(long)]
    pub q_max: Option<u64>,
    /// Integer dual-lattice coordinates of eta.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Option<Vec<i64>>,
    /// Also write a JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    #[command(flatten)]
    pub cert: CertArgs,
    /// Integer dual-lattice coordinates of lambda*.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<i64>,
    /// Position of the shift in the shift index set.
    #[arg(long, default_value_t = 0)]
    pub shift: usize,
    /// Grid points per axis in each cell.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub cert: CertArgs,
    /// Sup-norm radius of the integer dual coordinates.
    #[arg(long, default_value_t = 4)]
    pub radius: i64,
    /// Largest acceptable residual.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub cert: CertArgs,
    /// Samples CSV (with its .meta.json sidecar).
    #[arg(long)]
    pub samples: PathBuf,
    /// Compare every point against a dense solve.
    #[arg(long)]
    pub oracle: bool,
    /// Result file of true values to report the error against.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pointwise,
    Coeff,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub cert: CertArgs,
    #[arg(long, value_enum, default_value_t = Mode::Pointwise)]
    pub mode: Mode,
    /// `random`, or `exp:re,im@xi_1,..,xi_d;...` for a finite exponential sum.
    #[arg(long, default_value = "random")]
    pub function: String,
    /// Truncation radius in coefficient mode.
    #[arg(long, default_value_t = 8)]
    pub radius: i64,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn math(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MATH,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = format!("{}: {e}", e.kind());
        if e.is_mathematical() {
            Self::math(message)
        } else {
            Self::input(message)
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Domain(e) => e.into(),
            other => Self::input(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<String, Failure>;

/// Runs a parsed command and returns the text for stdout.
pub fn execute(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Check(a) => cmd_check(&a.cert),
        Command::Shifts(a) => cmd_shifts(a),
        Command::Dual(a) => cmd_dual(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Synthesize(a) => cmd_synthesize(a),
    }
}

/// Entry point of the binary: sets up threads, runs, prints, returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_INPUT;
    }
    match std::panic::catch_unwind(|| execute(&cli)) {
        Ok(Ok(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            f.code
        }
        Err(_) => {
            eprintln!("error: internal failure");
            EXIT_INTERNAL
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("MULTITILE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("MULTITILE_THREADS must be a non-negative integer, got {raw:?}"))?;
    // an already-initialised pool is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load_domain(path: &Path) -> std::result::Result<MultiTileDomain, Failure> {
    Ok(io::read_domain(path)?)
}

fn broadcast<T: Copy>(values: &[T], d: usize, name: &str) -> std::result::Result<Vec<T>, Failure> {
    match values.len() {
        1 => Ok(vec![values[0]; d]),
        n if n == d => Ok(values.to_vec()),
        n => Err(Failure::input(format!("--{name} has {n} entries, expected 1 or {d}"))),
    }
}

enum Certification {
    Found(AdmissibilityCertificate),
    Collided(Collision, Vec<f64>, Vec<u64>),
}

fn certify(domain: &MultiTileDomain, a: &CertArgs) -> std::result::Result<Certification, Failure> {
    let d = domain.dim();
    match (&a.v, &a.q) {
        (_, Some(q)) => {
            let q = broadcast(q, d, "q")?;
            let v = broadcast(a.v.as_deref().unwrap_or(&[1.0]), d, "v")?;
            if q.contains(&0) {
                return Err(Failure::input("--q entries must be positive"));
            }
            match admissibility::check(domain, &v, &q)? {
                CheckOutcome::Certified(c) => Ok(Certification::Found(c)),
                CheckOutcome::Failed(col) => Ok(Certification::Collided(col, v, q)),
            }
        }
        (Some(_), None) => Err(Failure::input("--v needs --q")),
        (None, None) => {
            let bound = 2 * domain.k() as u64;
            let cert = admissibility::find_pair(
                domain,
                a.v_max.unwrap_or(bound),
                a.q_max.unwrap_or(bound),
            )?;
            Ok(Certification::Found(cert))
        }
    }
}

fn collision_failure(col: &Collision, v: &[f64], q: &[u64]) -> Failure {
    Failure::math(format!(
        "Collision: v={}, q={} is not admissible; {col}",
        tuple_f(v),
        tuple_u(q)
    ))
}

/// Domain, certificate and shift set for the commands that need a basis.
fn setup(a: &CertArgs) -> std::result::Result<(MultiTileDomain, AdmissibilityCertificate, ShiftSet), Failure> {
    let domain = load_domain(&a.domain)?;
    let cert = match certify(&domain, a)? {
        Certification::Found(c) => c,
        Certification::Collided(col, v, q) => return Err(collision_failure(&col, &v, &q)),
    };
    let eta = match &a.eta {
        Some(e) => broadcast(e, domain.dim(), "eta")?,
        None => vec![0; domain.dim()],
    };
    let shifts = ShiftSet::from_certificate(&domain, &cert, eta)?;
    Ok((domain, cert, shifts))
}

fn tuple_f(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

fn tuple_u<T: ToString>(x: &[T]) -> String {
    let parts: Vec<String> = x.iter().map(T::to_string).collect();
    format!("({})", parts.join(","))
}

fn delta_text(cert: &AdmissibilityCertificate) -> String {
    let parts: Vec<String> = cert
        .v
        .iter()
        .zip(&cert.q)
        .map(|(v, q)| if *q == 1 { format!("{v}") } else { format!("{v}/{q}") })
        .collect();
    format!("diag({})", parts.join(","))
}

fn write_report(out: &Option<PathBuf>, value: serde_json::Value) -> std::result::Result<(), Failure> {
    if let Some(path) = out {
        io::write_atomic(path, io::canonical_json(&value).as_bytes())?;
    }
    Ok(())
}

fn cert_json(cert: &AdmissibilityCertificate) -> serde_json::Value {
    json!({
        "class": cert.class.to_string(),
        "v": cert.v,
        "q": cert.q,
        "delta": cert.delta(),
        "witnesses": cert.witnesses.iter().map(|w| json!({
            "cell": w.cell,
            "level": w.level,
            "parent": w.parent,
            "children": w.children,
            "residues": w.residues,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_check(a: &CertArgs) -> CliResult {
    let domain = load_domain(&a.domain)?;
    match certify(&domain, a)? {
        Certification::Collided(col, v, q) => {
            let value = json!({
                "class": "none",
                "v": v,
                "q": q,
                "collision": {
                    "cell": col.cell,
                    "level": col.level,
                    "parent": col.parent,
                    "values": [col.values.0, col.values.1],
                    "residue": col.residue,
                    "modulus": col.modulus,
                },
            });
            write_report(&a.out, value)?;
            Err(collision_failure(&col, &v, &q))
        }
        Certification::Found(cert) => {
            let mut text = format!(
                "{}, v={}, q={}, delta={}\n",
                cert.class,
                tuple_f(&cert.v),
                tuple_u(&cert.q),
                delta_text(&cert)
            );
            for w in &cert.witnesses {
                let _ = writeln!(
                    text,
                    "  cell {} level {} parent {:?}: z={:?} residues={:?}",
                    w.cell,
                    w.level,
                    w.parent,
                    w.children,
                    w.residues
                );
            }
            write_report(&a.out, cert_json(&cert))?;
            Ok(text)
        }
    }
}

fn cmd_shifts(a: &CertArgs) -> CliResult {
    let (domain, cert, shifts) = setup(a)?;
    let mut text = format!(
        "{}, delta={}, eta={}\n",
        cert.class,
        delta_text(&cert),
        tuple_u(shifts.eta_coords())
    );
    let mut cells = Vec::new();
    for c in 0..domain.cells().len() {
        let _ = writeln!(text, "cell {c}: offsets {:?}", domain.cells()[c].offsets());
        let idx = shifts.indices(c);
        for (j, a_s) in idx.iter().zip(shifts.cell_shifts(c)) {
            let _ = writeln!(text, "  j={} a={}", tuple_u(j), tuple_f(&a_s));
        }
        cells.push(json!({
            "cell": c,
            "indices": idx.0,
            "shifts": shifts.cell_shifts(c),
        }));
    }
    let _ = writeln!(text, "uniform: {}", shifts.is_uniform());
    write_report(
        &a.out,
        json!({
            "certificate": cert_json(&cert),
            "eta": shifts.eta_coords(),
            "uniform": shifts.is_uniform(),
            "cells": cells,
        }),
    )?;
    Ok(text)
}

fn cmd_dual(a: &DualArgs) -> CliResult {
    let (domain, _, shifts) = setup(&a.cert)?;
    let out = a.cert.out.as_ref().ok_or_else(|| Failure::input("dual needs --out"))?;
    if a.lambda.len() != domain.dim() {
        return Err(Failure::input(format!(
            "--lambda has {} entries, expected {}",
            a.lambda.len(),
            domain.dim()
        )));
    }
    if a.grid == 0 {
        return Err(Failure::input("--grid must be positive"));
    }
    let system = ExponentialSystem::new(&domain, &shifts);
    let l = Frequency {
        dual: a.lambda.clone(),
        shift: a.shift,
    };
    let xi = system.frequency(&l)?;
    let mut rows = Vec::new();
    for p in domain.sample_grid(a.grid) {
        for r in 0..domain.k() {
            let y = domain.omega(r, &p.u)?;
            rows.push(ResultRow {
                value: system.dual_eval(&l, &y)?,
                y,
                residual: 0.0,
            });
        }
    }
    io::write_results(out, domain.dim(), &rows)?;
    Ok(format!(
        "dual g_l for lambda*={} shift {} (frequency {}): {} points written to {}\n",
        tuple_u(&a.lambda),
        a.shift,
        tuple_f(&xi),
        rows.len(),
        out.display()
    ))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult {
    let (domain, cert, shifts) = setup(&a.cert)?;
    if a.radius < 0 {
        return Err(Failure::input("--radius must be non-negative"));
    }
    let system = ExponentialSystem::new(&domain, &shifts);
    let residual = system.verify_biorthogonality(a.radius)?;
    let count = system.frequencies(a.radius)?.len();
    let pass = residual <= a.tol;
    write_report(
        &a.cert.out,
        json!({
            "class": cert.class.to_string(),
            "radius": a.radius,
            "frequencies": count,
            "max_residual": residual,
            "tolerance": a.tol,
            "pass": pass,
        }),
    )?;
    let text = format!(
        "biorthogonality over {count} frequencies (radius {}): max residual {residual:.3e}\n",
        a.radius
    );
    if pass {
        Ok(text)
    } else {
        Err(Failure::math(format!("{}residual exceeds {:.1e}", text, a.tol)))
    }
}

fn cmd_bounds(a: &CertArgs) -> CliResult {
    let (domain, cert, shifts) = setup(a)?;
    let system = ExponentialSystem::new(&domain, &shifts);
    let b = system.riesz_bounds()?;
    let mut text = format!(
        "{}, delta={}\nalpha={:.16e} beta={:.16e}\nA={:.16e} B={:.16e}\n",
        cert.class,
        delta_text(&cert),
        b.alpha,
        b.beta,
        b.lower_frame,
        b.upper_frame
    );
    text.push_str("cell  sigma_min  sigma_max  kappa  factored_lower  factored_upper\n");
    for c in &b.cells {
        let _ = writeln!(
            text,
            "{}  {:.6e}  {:.6e}  {:.6e}  {:.6e}  {:.6e}",
            c.cell, c.sigma_min, c.sigma_max, c.condition, c.factored_lower, c.factored_upper
        );
    }
    write_report(
        &a.out,
        json!({
            "alpha": b.alpha,
            "beta": b.beta,
            "A": b.lower_frame,
            "B": b.upper_frame,
            "cells": b.cells.iter().map(|c| json!({
                "cell": c.cell,
                "sigma_min": c.sigma_min,
                "sigma_max": c.sigma_max,
                "kappa": c.condition,
                "factored_lower": c.factored_lower,
                "factored_upper": c.factored_upper,
            })).collect::<Vec<_>>(),
        }),
    )?;
    Ok(text)
}

fn cmd_reconstruct(a: &ReconstructArgs) -> CliResult {
    let (domain, _, shifts) = setup(&a.cert)?;
    let out = a.cert.out.as_ref().ok_or_else(|| Failure::input("reconstruct needs --out"))?;
    let (data, _) = io::read_samples(&a.samples, &domain, &shifts)?;
    let result = reconstruction::reconstruct_grid(&domain, &shifts, &data, a.oracle)?;
    let rows: Vec<ResultRow> = result
        .on_domain(&domain)
        .into_iter()
        .map(|(y, value, residual)| ResultRow {
            y,
            value,
            residual: residual.unwrap_or(f64::NAN),
        })
        .collect();
    io::write_results(out, domain.dim(), &rows)?;

    let mut text = format!(
        "reconstructed {} points ({} samples, {} skipped) into {}\n",
        rows.len(),
        result.points.len(),
        result.skipped.len(),
        out.display()
    );
    for (idx, why) in &result.skipped {
        let _ = writeln!(text, "  skipped sample {idx}: {why}");
    }
    let worst_block = result
        .cells
        .iter()
        .map(|c| c.max_block_condition())
        .fold(1.0, f64::max);
    let _ = writeln!(text, "max Vandermonde block condition {worst_block:.3e}");
    if let Some(r) = result.max_residual() {
        let _ = writeln!(text, "max residual {r:.3e}");
    }
    if let Some(path) = &a.truth {
        let truth = io::read_results(path)?;
        if truth.len() != rows.len() {
            return Err(Failure::input(format!(
                "truth file has {} rows, reconstruction has {}",
                truth.len(),
                rows.len()
            )));
        }
        let err = rows
            .iter()
            .zip(&truth)
            .map(|(r, t)| (r.value - t.value).norm())
            .fold(0.0, f64::max);
        let _ = writeln!(text, "max error against truth {err:.3e}");
    }
    Ok(text)
}

/// Parses `re,im@xi_1,..,xi_d;...`.
pub fn parse_exponential_sum(spec: &str, d: usize) -> std::result::Result<ExponentialSum, String> {
    let mut terms = Vec::new();
    for term in spec.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (coef, freq) = term
            .split_once('@')
            .ok_or_else(|| format!("term {term:?} needs the form re,im@xi_1,..,xi_d"))?;
        let nums = |s: &str| -> std::result::Result<Vec<f64>, String> {
            s.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?} in {term:?}")))
                .collect()
        };
        let c = nums(coef)?;
        let xi = nums(freq)?;
        if c.len() != 2 {
            return Err(format!("coefficient of {term:?} needs re,im"));
        }
        if xi.len() != d {
            return Err(format!("frequency of {term:?} has {} entries, expected {d}", xi.len()));
        }
        terms.push((xi, Complex64::new(c[0], c[1])));
    }
    if terms.is_empty() {
        return Err("empty exponential sum".into());
    }
    Ok(ExponentialSum { terms })
}

fn random_sum(rng: &mut ChaCha8Rng, d: usize, terms: usize) -> ExponentialSum {
    ExponentialSum {
        terms: (0..terms)
            .map(|_| {
                let xi = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
                (xi, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            })
            .collect(),
    }
}

pub fn truth_path(samples: &Path) -> PathBuf {
    let mut s = samples.as_os_str().to_owned();
    s.push(".truth.csv");
    PathBuf::from(s)
}

fn cmd_synthesize(a: &SynthesizeArgs) -> CliResult {
    let (domain, cert, shifts) = setup(&a.cert)?;
    let out = a.cert.out.as_ref().ok_or_else(|| Failure::input("synthesize needs --out"))?;
    if a.grid == 0 {
        return Err(Failure::input("--grid must be positive"));
    }
    let (d, k) = (domain.dim(), domain.k());
    let points = domain.sample_grid(a.grid);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);

    // f(omega_r(u)) in region order, per grid point
    let (values, data): (Vec<Vec<Complex64>>, SpectralData) = match a.mode {
        Mode::Pointwise => {
            let per_region: Vec<ExponentialSum> = if a.function == "random" {
                (0..k).map(|_| random_sum(&mut rng, d, 3)).collect()
            } else {
                let f = parse_function(&a.function, d)?;
                vec![f; k]
            };
            let values: Vec<Vec<Complex64>> = points
                .iter()
                .map(|p| {
                    (0..k)
                        .map(|r| per_region[r].eval(&domain.omega_in_cell(p.cell, r, &p.u)))
                        .collect()
                })
                .collect();
            let data = reconstruction::forward_data(&domain, &shifts, &points, &values)?;
            (values, data)
        }
        Mode::Coeff => {
            if a.radius < 0 {
                return Err(Failure::input("--radius must be non-negative"));
            }
            let f = if a.function == "random" {
                random_sum(&mut rng, d, 3)
            } else {
                parse_function(&a.function, d)?
            };
            let values = points.iter().map(|p| f.region_values(&domain, p)).collect();
            let data = reconstruction::coefficient_data(&domain, &shifts, &f, a.radius, &points)?;
            (values, data)
        }
    };

    let meta = SamplesMeta::new(&shifts, &cert.v, &cert.q, data.provenance, domain.cells().len());
    io::write_samples(out, &data, &meta)?;
    let truth: Vec<ResultRow> = points
        .iter()
        .zip(&values)
        .flat_map(|(p, f)| {
            f.iter().enumerate().map(|(r, v)| ResultRow {
                y: domain.omega_in_cell(p.cell, r, &p.u),
                value: *v,
                residual: 0.0,
            })
        })
        .collect();
    let truth_file = truth_path(out);
    io::write_results(&truth_file, d, &truth)?;
    Ok(format!(
        "{} samples written to {} (truth in {})\n",
        data.samples.len(),
        out.display(),
        truth_file.display()
    ))
}

fn parse_function(spec: &str, d: usize) -> std::result::Result<ExponentialSum, Failure> {
    let body = spec
        .strip_prefix("exp:")
        .ok_or_else(|| Failure::input(format!("unknown function {spec:?}; use random or exp:...")))?;
    parse_exponential_sum(body, d).map_err(Failure::input)
}
