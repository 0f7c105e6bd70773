//! Full-rank lattices `M Z^d`, their duals and fundamental-domain coordinates.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Points whose fractional lattice coordinate is within this distance of 1
/// wrap to 0 (and carry into the integer part).
pub const BOUNDARY_SNAP: f64 = 1e-12;

/// Relative determinant threshold below which a basis is rejected.
pub const SINGULAR_DET: f64 = 1e-12;

/// A full lattice generated by the columns of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
    inverse: DMatrix<f64>,
    dual: DMatrix<f64>,
    volume: f64,
}

impl Lattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let d = basis.nrows();
        if d == 0 || basis.ncols() != d || basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::MalformedBasis);
        }
        let det = basis.determinant();
        let scale = basis.norm().max(1.0).powi(d as i32);
        if det.abs() < SINGULAR_DET * scale {
            return Err(Error::SingularBasis { det });
        }
        let inverse = basis
            .clone()
            .try_inverse()
            .ok_or(Error::SingularBasis { det })?;
        let dual = inverse.transpose();
        Ok(Self {
            basis,
            inverse,
            dual,
            volume: det.abs(),
        })
    }

    /// Builds a lattice from a row-major matrix whose columns are the generators.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::MalformedBasis);
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(d, d, &flat))
    }

    pub fn identity(d: usize) -> Self {
        Self::new(DMatrix::identity(d, d)).expect("identity is nonsingular")
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `M^{-T}`, whose columns generate the dual lattice.
    pub fn dual_basis(&self) -> &DMatrix<f64> {
        &self.dual
    }

    /// `|det M|`.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn basis_rows(&self) -> Vec<Vec<f64>> {
        self.basis
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// The lattice with generator matrix `M^{-T}`.
    pub fn dual_lattice(&self) -> Lattice {
        Lattice::new(self.dual.clone()).expect("dual of a valid basis is valid")
    }

    /// `M u` for a point given in lattice coordinates.
    pub fn to_physical(&self, u: &[f64]) -> Vec<f64> {
        mul(&self.basis, u)
    }

    /// `M^{-1} x`.
    pub fn to_lattice_coords(&self, x: &[f64]) -> Vec<f64> {
        mul(&self.inverse, x)
    }

    /// The lattice point `M z`.
    pub fn point(&self, z: &[i64]) -> Vec<f64> {
        let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
        mul(&self.basis, &zf)
    }

    /// The dual lattice point `M^{-T} z`.
    pub fn dual_point(&self, z: &[i64]) -> Vec<f64> {
        let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
        mul(&self.dual, &zf)
    }

    /// `M^T y`: pulls a frequency back to lattice coordinates.
    pub fn transpose_apply(&self, y: &[f64]) -> Vec<f64> {
        mul(&self.basis.transpose(), y)
    }

    /// Splits `x = M (u + z)` with every `u_i` in `[0, 1)`.
    pub fn reduce(&self, x: &[f64]) -> (Vec<f64>, Vec<i64>) {
        let w = self.to_lattice_coords(x);
        let mut u = Vec::with_capacity(w.len());
        let mut z = Vec::with_capacity(w.len());
        for wi in w {
            let mut zi = wi.floor();
            let mut ui = wi - zi;
            if ui >= 1.0 - BOUNDARY_SNAP {
                ui = 0.0;
                zi += 1.0;
            } else if ui < 0.0 {
                ui = 0.0;
            }
            u.push(ui);
            z.push(zi as i64);
        }
        (u, z)
    }
}

fn mul(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), x.len(), "dimension mismatch");
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}
