//! Small dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// `exp(2 pi i t)`.
pub fn cis2pi(t: f64) -> Complex64 {
    let a = std::f64::consts::TAU * t;
    Complex64::new(a.cos(), a.sin())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `(sigma_min, sigma_max)`.
pub fn extreme_singular_values(m: &CMatrix) -> (f64, f64) {
    let sv = singular_values(m);
    match (sv.last(), sv.first()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0.0, 0.0),
    }
}

/// Spectral condition number; infinite for singular input.
pub fn condition_number(m: &CMatrix) -> f64 {
    let (lo, hi) = extreme_singular_values(m);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Dense solve with partial pivoting.
pub fn solve(m: &CMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() || m.nrows() != rhs.len() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: rhs.len(),
        });
    }
    let b = CVector::from_column_slice(rhs);
    let x = m.clone().lu().solve(&b).ok_or(Error::SingularMatrix)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(x.iter().copied().collect())
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    let inv = m.clone().lu().try_inverse().ok_or(Error::SingularMatrix)?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(inv)
}

pub fn mat_vec(m: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    (m * CVector::from_column_slice(x)).iter().copied().collect()
}

/// Euclidean norm of a complex slice.
pub fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||a - b|| / max(||b||, tiny)`.
pub fn relative_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(f64::MIN_POSITIVE)
}
