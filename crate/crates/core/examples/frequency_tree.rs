//! The ordered frequency tree and the shift index set of a 4D set with k = 10.

use multitile::tree::{example_m4, FrequencyTree};

fn main() {
    let fs = example_m4();
    let tree = FrequencyTree::build(&fs);
    for level in tree.levels() {
        let counts: Vec<usize> = level.child_values.iter().map(Vec::len).collect();
        println!(
            "level {}: N = {}, child counts {:?}, windows {:?}",
            level.level, level.size, counts, level.windows
        );
    }
    println!("shift indices:");
    for (z, j) in tree.vectors().iter().zip(tree.shift_index_set().iter()) {
        println!("  {z:?}  ->  {j:?}");
    }
}
