//! Weak, strong and perfect `(v, q)`-admissibility.
//!
//! For every cell and every level `l` of the cell's frequency tree, the last
//! coordinates `z` of the children of each parent must give pairwise distinct
//! residues `v_l z mod q_l` (weak). Strong admissibility additionally needs the
//! residues to be integers, and perfect admissibility asks for strong
//! admissibility with `q_l` equal to the common child count at level `l`.
//! Because the offsets are constant on each cell, checking every cell is the
//! same as checking almost every point.

use std::fmt;

use crate::domain::MultiTileDomain;
use crate::error::{Error, Result};
use crate::tree::{FrequencySet, FrequencyTree, Level};

/// Residues closer than this on the circle of circumference `q_l` collide.
pub const RESIDUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AdmissibilityClass {
    Weak,
    Strong,
    Perfect,
}

impl fmt::Display for AdmissibilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Weak => "weak",
            Self::Strong => "strong",
            Self::Perfect => "perfect",
        })
    }
}

/// Residues of one parent's children at one level of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub cell: usize,
    pub level: usize,
    pub parent: Vec<f64>,
    pub children: Vec<f64>,
    pub residues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityCertificate {
    pub v: Vec<f64>,
    pub q: Vec<u64>,
    pub class: AdmissibilityClass,
    pub witnesses: Vec<Witness>,
}

impl AdmissibilityCertificate {
    /// Diagonal of `delta`, `delta_ll = v_l / q_l`.
    pub fn delta(&self) -> Vec<f64> {
        delta(&self.v, &self.q)
    }
}

/// Two children of one parent whose residues coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct Collision {
    pub cell: usize,
    pub level: usize,
    pub parent: Vec<f64>,
    pub values: (f64, f64),
    pub residue: f64,
    pub modulus: u64,
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cell {} level {} parent {:?}: z={} and z={} both give residue {} mod {}",
            self.cell, self.level, self.parent, self.values.0, self.values.1, self.residue, self.modulus
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckOutcome {
    Certified(AdmissibilityCertificate),
    Failed(Collision),
}

impl CheckOutcome {
    pub fn certificate(&self) -> Option<&AdmissibilityCertificate> {
        match self {
            Self::Certified(c) => Some(c),
            Self::Failed(_) => None,
        }
    }
}

pub fn delta(v: &[f64], q: &[u64]) -> Vec<f64> {
    v.iter().zip(q).map(|(v, &q)| v / q as f64).collect()
}

/// Frequency tree of every cell, built over the physical offsets in region order.
pub fn cell_trees(domain: &MultiTileDomain) -> Vec<FrequencyTree> {
    (0..domain.cells().len())
        .map(|c| {
            let fs = FrequencySet::new(domain.region_vectors(c))
                .expect("validated cells have distinct offsets");
            FrequencyTree::build(&fs)
        })
        .collect()
}

fn residue(v: f64, z: f64, q: u64) -> f64 {
    let r = (v * z).rem_euclid(q as f64);
    if q as f64 - r <= RESIDUE_TOL {
        0.0
    } else {
        r
    }
}

fn circular_gap(a: f64, b: f64, q: u64) -> f64 {
    let d = (a - b).abs();
    d.min(q as f64 - d)
}

fn first_collision(values: &[f64], residues: &[f64], q: u64) -> Option<(usize, usize)> {
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if circular_gap(residues[i], residues[j], q) <= RESIDUE_TOL {
                return Some((i, j));
            }
        }
    }
    None
}

fn is_integral(r: f64) -> bool {
    (r - r.round()).abs() <= RESIDUE_TOL
}

/// Common child count at each level across all parents of all cells.
pub fn uniform_child_counts(trees: &[FrequencyTree]) -> Vec<Option<usize>> {
    let d = trees[0].dim();
    (0..d)
        .map(|l| {
            let mut counts = trees
                .iter()
                .flat_map(|t| t.levels()[l].child_values.iter().map(Vec::len).collect::<Vec<_>>());
            let first = counts.next()?;
            counts.all(|c| c == first).then_some(first)
        })
        .collect()
}

/// Certifies the strongest class that holds on every cell, or names the first collision.
pub fn check(domain: &MultiTileDomain, v: &[f64], q: &[u64]) -> Result<CheckOutcome> {
    let d = domain.dim();
    for len in [v.len(), q.len()] {
        if len != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: len,
            });
        }
    }
    if q.contains(&0) {
        return Err(Error::InvalidParameter("every q_l must be at least 1".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("v must be finite".into()));
    }

    let trees = cell_trees(domain);
    let mut witnesses = Vec::new();
    let mut integral = true;
    for (cell, tree) in trees.iter().enumerate() {
        for level in tree.levels() {
            let l = level.level - 1;
            for (parent, values) in level.parents.iter().zip(&level.child_values) {
                let residues: Vec<f64> = values.iter().map(|&z| residue(v[l], z, q[l])).collect();
                if let Some((i, j)) = first_collision(values, &residues, q[l]) {
                    return Ok(CheckOutcome::Failed(Collision {
                        cell,
                        level: level.level,
                        parent: parent.clone(),
                        values: (values[i], values[j]),
                        residue: residues[i],
                        modulus: q[l],
                    }));
                }
                integral &= residues.iter().all(|&r| is_integral(r));
                witnesses.push(Witness {
                    cell,
                    level: level.level,
                    parent: parent.clone(),
                    children: values.clone(),
                    residues,
                });
            }
        }
    }

    // a single tile gives V = [1] whatever delta is
    let class = if domain.k() == 1 {
        AdmissibilityClass::Perfect
    } else if !integral {
        AdmissibilityClass::Weak
    } else {
        let q_star = uniform_child_counts(&trees);
        let perfect = q_star
            .iter()
            .zip(q)
            .all(|(qs, &ql)| *qs == Some(ql as usize));
        if perfect {
            AdmissibilityClass::Perfect
        } else {
            AdmissibilityClass::Strong
        }
    };
    Ok(CheckOutcome::Certified(AdmissibilityCertificate {
        v: v.to_vec(),
        q: q.to_vec(),
        class,
        witnesses,
    }))
}

fn level_sets(trees: &[FrequencyTree], l: usize) -> Vec<Vec<f64>> {
    trees
        .iter()
        .flat_map(|t| {
            let levels: Vec<Level> = t.levels();
            levels[l].child_values.clone()
        })
        .collect()
}

/// Scans integer `v_l <= v_max`, `q_l <= q_max` level by level (levels decouple),
/// in order of increasing `q_l` then `v_l`, taking the first pair with integral
/// distinct residues and otherwise the first with distinct residues.
pub fn find_pair(domain: &MultiTileDomain, v_max: u64, q_max: u64) -> Result<AdmissibilityCertificate> {
    if v_max == 0 || q_max == 0 {
        return Err(Error::InvalidParameter("search bounds must be at least 1".into()));
    }
    let trees = cell_trees(domain);
    let mut v = Vec::with_capacity(domain.dim());
    let mut q = Vec::with_capacity(domain.dim());
    for l in 0..domain.dim() {
        let sets = level_sets(&trees, l);
        let mut weak = None;
        let mut strong = None;
        'scan: for ql in 1..=q_max {
            for vl in 1..=v_max {
                match classify_candidate(&sets, vl as f64, ql) {
                    None => continue,
                    Some(true) => {
                        strong = Some((vl, ql));
                        break 'scan;
                    }
                    Some(false) => {
                        weak.get_or_insert((vl, ql));
                    }
                }
            }
        }
        let (vl, ql) = strong.or(weak).ok_or(Error::NoPairFound { v_max, q_max })?;
        v.push(vl as f64);
        q.push(ql);
    }
    match check(domain, &v, &q)? {
        CheckOutcome::Certified(c) => Ok(c),
        CheckOutcome::Failed(_) => Err(Error::NoPairFound { v_max, q_max }),
    }
}

/// `None` on a collision, otherwise whether every residue is integral.
fn classify_candidate(sets: &[Vec<f64>], v: f64, q: u64) -> Option<bool> {
    let mut integral = true;
    for values in sets {
        let res: Vec<f64> = values.iter().map(|&z| residue(v, z, q)).collect();
        if first_collision(values, &res, q).is_some() {
            return None;
        }
        integral &= res.iter().all(|&r| is_integral(r));
    }
    Some(integral)
}

/// A shift that makes the one-dimensional system perfectly conditioned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfectShift {
    pub gcd: u64,
    pub tau: f64,
    pub delta: f64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Q = gcd(z_r)`; succeeds with `tau = 1/Q` (and `delta = tau / k`) exactly when
/// `{z_r / Q mod k}` is a complete residue system.
pub fn perfect_shift_1d(offsets: &[i64]) -> Option<PerfectShift> {
    let k = offsets.len();
    if k == 0 {
        return None;
    }
    let g = offsets.iter().fold(0u64, |acc, &z| gcd(acc, z.unsigned_abs())).max(1);
    let mut seen = vec![false; k];
    for &z in offsets {
        let r = (z / g as i64).rem_euclid(k as i64) as usize;
        if std::mem::replace(&mut seen[r], true) {
            return None;
        }
    }
    let tau = 1.0 / g as f64;
    Some(PerfectShift {
        gcd: g,
        tau,
        delta: tau / k as f64,
    })
}

/// The candidate `delta = 1 / (Q k)` examined by [`perfect_shift_1d`], defined
/// whether or not the residue test passes.
pub fn candidate_delta_1d(offsets: &[i64]) -> f64 {
    let g = offsets.iter().fold(0u64, |acc, &z| gcd(acc, z.unsigned_abs())).max(1);
    1.0 / (g as f64 * offsets.len() as f64)
}
