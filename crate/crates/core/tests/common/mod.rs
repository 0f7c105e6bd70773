#![allow(dead_code)]

use std::collections::BTreeSet;

use multitile::domain::{Cell, MultiTileDomain};
use multitile::lattice::Lattice;
use rand::seq::SliceRandom;
use rand::Rng;

/// Line-by-line port of the reference `K_l` routine: unique prefixes in
/// lexicographic order, stably re-sorted by child count, windows between
/// consecutive sorted counts.
pub fn reference_k(ml: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let l = ml[0].len();
    if l == 1 {
        return (0..ml.len()).map(|j| vec![j]).collect();
    }
    let (ml_old, n_zl) = ml_sort(ml, l - 1);
    let mut k = Vec::new();
    for i in 0..ml_old.len() {
        let lo = if i == 0 { 0 } else { n_zl[i - 1] };
        let qi_l: Vec<usize> = (lo..n_zl[i]).collect();
        let kl_i = reference_k(&ml_old[i..]);
        for row in &kl_i {
            for &q in &qi_l {
                let mut r = row.clone();
                r.push(q);
                k.push(r);
            }
        }
    }
    k
}

fn ml_sort(md: &[Vec<i64>], l: usize) -> (Vec<Vec<i64>>, Vec<usize>) {
    let prefixes: BTreeSet<Vec<i64>> = md.iter().map(|z| z[..l].to_vec()).collect();
    let unique: Vec<Vec<i64>> = prefixes.into_iter().collect();
    let counts: Vec<usize> = unique
        .iter()
        .map(|p| md.iter().filter(|z| &z[..l] == p.as_slice()).count())
        .collect();
    let mut idx: Vec<usize> = (0..unique.len()).collect();
    idx.sort_by_key(|&i| counts[i]);
    (
        idx.iter().map(|&i| unique[i].clone()).collect(),
        idx.iter().map(|&i| counts[i]).collect(),
    )
}

/// `count` distinct integer vectors in `[-range, range]^d`.
pub fn random_integer_set<R: Rng>(rng: &mut R, d: usize, count: usize, range: i64) -> Vec<Vec<i64>> {
    assert!(((2 * range + 1) as f64).powi(d as i32) >= count as f64, "box too small");
    let mut set = BTreeSet::new();
    while set.len() < count {
        set.insert((0..d).map(|_| rng.gen_range(-range..=range)).collect::<Vec<i64>>());
    }
    let mut out: Vec<Vec<i64>> = set.into_iter().collect();
    out.shuffle(rng);
    out
}

pub fn one_cell(offsets: &[Vec<i64>]) -> MultiTileDomain {
    let d = offsets[0].len();
    MultiTileDomain::new(Lattice::identity(d), vec![Cell::unit(d, offsets.to_vec())]).unwrap()
}

pub fn one_cell_1d(offsets: &[i64]) -> MultiTileDomain {
    one_cell(&offsets.iter().map(|&z| vec![z]).collect::<Vec<_>>())
}

/// `[0, 0.5) x [0, 1)` with offsets {(0,0),(1,0),(0,1)} and `[0.5, 1) x [0, 1)`
/// with {(0,0),(1,0),(1,1)}.
pub fn three_tile_2d() -> MultiTileDomain {
    MultiTileDomain::new(
        Lattice::identity(2),
        vec![
            Cell::new(vec![0.0, 0.0], vec![0.5, 1.0], vec![vec![0, 0], vec![1, 0], vec![0, 1]]),
            Cell::new(vec![0.5, 0.0], vec![1.0, 1.0], vec![vec![0, 0], vec![1, 0], vec![1, 1]]),
        ],
    )
    .unwrap()
}

/// `[0, 0.5)` with offsets {0, 1} and `[0.5, 1)` with {0, 2}.
pub fn two_cells_1d() -> MultiTileDomain {
    MultiTileDomain::new(
        Lattice::identity(1),
        vec![
            Cell::new(vec![0.0], vec![0.5], vec![vec![0], vec![1]]),
            Cell::new(vec![0.5], vec![1.0], vec![vec![0], vec![2]]),
        ],
    )
    .unwrap()
}

pub fn box_4tile_2d() -> MultiTileDomain {
    one_cell(&[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]])
}

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}
