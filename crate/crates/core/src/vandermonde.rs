//! Square Vandermonde systems `sum_t w_t^s c_t = b_s`, `s = 0..n-1`.
//!
//! The default path is the Björck-Pereyra recurrence for this (row-power)
//! orientation: an O(n^2) Newton-form elimination that is accurate for
//! well-separated nodes. Systems whose condition number exceeds
//! [`ILL_CONDITIONED`] fall back to a pivoted dense solve.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Nodes closer than this are rejected as duplicates.
pub const NODE_SEPARATION: f64 = 1e-12;
/// Above this condition number the dense fallback is used.
pub const ILL_CONDITIONED: f64 = 1e8;

/// `W[s, t] = w_t^s`.
pub fn vandermonde_matrix(nodes: &[Complex64]) -> CMatrix {
    let n = nodes.len();
    CMatrix::from_fn(n, n, |s, t| nodes[t].powu(s as u32))
}

/// A factor-once, solve-many square Vandermonde system.
#[derive(Debug, Clone)]
pub struct Vandermonde {
    nodes: Vec<Complex64>,
    condition: f64,
    dense: Option<CMatrix>,
}

impl Vandermonde {
    pub fn new(nodes: Vec<Complex64>) -> Result<Self> {
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if (nodes[i] - nodes[j]).norm() < NODE_SEPARATION {
                    return Err(Error::DuplicateNodes(i, j));
                }
            }
        }
        let matrix = vandermonde_matrix(&nodes);
        let condition = linalg::condition_number(&matrix);
        let dense = (condition > ILL_CONDITIONED).then_some(matrix);
        Ok(Self {
            nodes,
            condition,
            dense,
        })
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spectral condition number of the matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.dense.is_some()
    }

    pub fn matrix(&self) -> CMatrix {
        vandermonde_matrix(&self.nodes)
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                found: rhs.len(),
            });
        }
        match &self.dense {
            Some(m) => linalg::solve(m, rhs),
            None => Ok(bjorck_pereyra(&self.nodes, rhs)),
        }
    }
}

/// Solves `sum_t x_t^s z_t = b_s` in place (Golub & Van Loan, dual algorithm).
fn bjorck_pereyra(x: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut b = rhs.to_vec();
    if n <= 1 {
        return b;
    }
    let last = n - 1;
    for k in 0..last {
        for i in (k + 1..=last).rev() {
            b[i] = b[i] - x[k] * b[i - 1];
        }
    }
    for k in (0..last).rev() {
        for i in k + 1..=last {
            b[i] /= x[i] - x[i - k - 1];
        }
        for i in k..last {
            b[i] = b[i] - b[i + 1];
        }
    }
    b
}

/// One-shot solve of `sum_t w_t^s c_t = rhs_s`.
pub fn solve_vandermonde_1d(nodes: &[Complex64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    Vandermonde::new(nodes.to_vec())?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cis2pi, mat_vec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two() {
        let sol = solve_vandermonde_1d(&[c(1.0, 0.0), c(-1.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((sol[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((sol[1] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_node() {
        let sol = solve_vandermonde_1d(&[c(1.0, 0.0)], &[c(5.0, 0.0)]).unwrap();
        assert_eq!(sol, vec![c(5.0, 0.0)]);
    }

    #[test]
    fn duplicates_rejected() {
        let w = cis2pi(0.25);
        assert_eq!(
            Vandermonde::new(vec![c(1.0, 0.0), w, w]).unwrap_err(),
            Error::DuplicateNodes(1, 2)
        );
    }

    #[test]
    fn roots_of_unity_forward_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=12 {
            let nodes: Vec<Complex64> = (0..k).map(|t| cis2pi(t as f64 / k as f64)).collect();
            let coeffs: Vec<Complex64> = (0..k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let rhs = mat_vec(&vandermonde_matrix(&nodes), &coeffs);
            let sys = Vandermonde::new(nodes).unwrap();
            assert!((sys.condition() - 1.0).abs() < 1e-10);
            let sol = sys.solve(&rhs).unwrap();
            for (a, b) in sol.iter().zip(&coeffs) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn scattered_unimodular_nodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let k = rng.gen_range(1..=10);
            let q = 2 * k as u64 + 1;
            let mut picks: Vec<u64> = (0..q).collect();
            for i in (1..picks.len()).rev() {
                picks.swap(i, rng.gen_range(0..=i));
            }
            let nodes: Vec<Complex64> = picks[..k].iter().map(|&p| cis2pi(-(p as f64) / q as f64)).collect();
            let coeffs: Vec<Complex64> = (0..k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let w = vandermonde_matrix(&nodes);
            let rhs = mat_vec(&w, &coeffs);
            let sol = solve_vandermonde_1d(&nodes, &rhs).unwrap();
            let dense = linalg::solve(&w, &rhs).unwrap();
            assert!(linalg::relative_error(&sol, &coeffs) < 1e-10);
            assert!(linalg::relative_error(&sol, &dense) < 1e-10);
            let resid: Vec<Complex64> = mat_vec(&w, &sol).iter().zip(&rhs).map(|(a, b)| a - b).collect();
            assert!(linalg::norm(&resid) <= 1e-10 * linalg::norm(&rhs).max(1.0));
        }
    }
}
