//! Multi-tiles represented as finitely many boxes of the fundamental domain,
//! each carrying the `k` lattice offsets that translate it into `Omega`.
//!
//! A point `u` of the unit cube (lattice coordinates) lying in cell `c` is
//! mapped into region `r` of the domain by `omega_r(u) = M (u + z_r)`, where
//! `z_r` is the `r`-th offset of `c` after lexicographic sorting. Region
//! indices are zero-based.

use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Tolerance on the total box volume.
pub const VOLUME_TOL: f64 = 1e-10;

/// One box `[lower, upper)` of `[0,1)^d` with its offset list.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    lower: Vec<f64>,
    upper: Vec<f64>,
    offsets: Vec<Vec<i64>>,
}

impl Cell {
    /// Offsets are stored sorted lexicographically; that order defines the regions.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, mut offsets: Vec<Vec<i64>>) -> Self {
        offsets.sort();
        Self {
            lower,
            upper,
            offsets,
        }
    }

    /// The full unit cube `[0,1)^d`.
    pub fn unit(d: usize, offsets: Vec<Vec<i64>>) -> Self {
        Self::new(vec![0.0; d], vec![1.0; d], offsets)
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&x, (&a, &b))| a <= x && x < b)
    }

    fn overlap_volume(&self, other: &Cell) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(other.lower.iter().zip(&other.upper))
            .map(|((a0, b0), (a1, b1))| (b0.min(*b1) - a0.max(*a1)).max(0.0))
            .product()
    }
}

/// A point of the fundamental domain together with the cell that owns it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub cell: usize,
    pub u: Vec<f64>,
}

/// Result of `omega_inverse`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub cell: usize,
    pub region: usize,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiTileDomain {
    lattice: Lattice,
    cells: Vec<Cell>,
    k: usize,
}

impl MultiTileDomain {
    pub fn new(lattice: Lattice, cells: Vec<Cell>) -> Result<Self> {
        let k = check_cells(&lattice, &cells)?;
        Ok(Self { lattice, cells, k })
    }

    /// Re-runs the tiling checks and returns the common multiplicity `k`.
    pub fn validate(&self) -> Result<usize> {
        check_cells(&self.lattice, &self.cells)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `|Omega| = k vol(Lambda)`.
    pub fn measure(&self) -> f64 {
        self.k as f64 * self.lattice.volume()
    }

    pub fn cell_at(&self, u: &[f64]) -> Result<usize> {
        self.cells
            .iter()
            .position(|c| c.contains(u))
            .ok_or_else(|| Error::PointOnGap(u.to_vec()))
    }

    /// The lattice points `lambda_r(u) = M z_r` in region order.
    pub fn offsets_at(&self, u: &[f64]) -> Result<Vec<Vec<f64>>> {
        let cell = self.cell_at(u)?;
        Ok(self.region_vectors(cell))
    }

    /// Physical offsets of a cell, in region order.
    pub fn region_vectors(&self, cell: usize) -> Vec<Vec<f64>> {
        self.cells[cell]
            .offsets
            .iter()
            .map(|z| self.lattice.point(z))
            .collect()
    }

    /// `omega_r(u) = M u + lambda_r(u)`.
    pub fn omega(&self, region: usize, u: &[f64]) -> Result<Vec<f64>> {
        if region >= self.k {
            return Err(Error::RegionOutOfRange {
                index: region,
                k: self.k,
            });
        }
        let cell = self.cell_at(u)?;
        Ok(self.omega_in_cell(cell, region, u))
    }

    pub(crate) fn omega_in_cell(&self, cell: usize, region: usize, u: &[f64]) -> Vec<f64> {
        let z = &self.cells[cell].offsets[region];
        let shifted: Vec<f64> = u.iter().zip(z).map(|(a, b)| a + *b as f64).collect();
        self.lattice.to_physical(&shifted)
    }

    pub fn omega_inverse(&self, y: &[f64]) -> Result<RegionPoint> {
        let (u, z) = self.lattice.reduce(y);
        let cell = self
            .cell_at(&u)
            .map_err(|_| Error::OutOfDomain(y.to_vec()))?;
        let region = self.cells[cell]
            .offsets
            .iter()
            .position(|o| *o == z)
            .ok_or_else(|| Error::OutOfDomain(y.to_vec()))?;
        Ok(RegionPoint { cell, region, u })
    }

    /// Indicator of `Omega`.
    pub fn contains(&self, y: &[f64]) -> bool {
        self.omega_inverse(y).is_ok()
    }

    /// Midpoint grid with `n` points per axis inside every cell.
    pub fn sample_grid(&self, n: usize) -> Vec<GridPoint> {
        let n = n.max(1);
        let d = self.dim();
        let mut out = Vec::new();
        for (id, cell) in self.cells.iter().enumerate() {
            let total = n.pow(d as u32);
            for flat in 0..total {
                let mut rem = flat;
                let mut u = vec![0.0; d];
                for axis in (0..d).rev() {
                    let j = rem % n;
                    rem /= n;
                    let (a, b) = (cell.lower[axis], cell.upper[axis]);
                    u[axis] = a + (j as f64 + 0.5) * (b - a) / n as f64;
                }
                out.push(GridPoint { cell: id, u });
            }
        }
        out
    }
}

fn check_cells(lattice: &Lattice, cells: &[Cell]) -> Result<usize> {
    let d = lattice.dim();
    if cells.is_empty() {
        return Err(Error::NotATiling("no cells".into()));
    }
    let k = cells[0].offsets.len();
    for (id, cell) in cells.iter().enumerate() {
        if cell.lower.len() != d || cell.upper.len() != d {
            return Err(Error::MalformedCell {
                cell: id,
                reason: format!("box must have {d} axes"),
            });
        }
        for (a, b) in cell.lower.iter().zip(&cell.upper) {
            if !(a.is_finite() && b.is_finite() && 0.0 <= *a && a < b && *b <= 1.0) {
                return Err(Error::MalformedCell {
                    cell: id,
                    reason: format!("axis bounds [{a}, {b}) not inside [0, 1]"),
                });
            }
        }
        if cell.offsets.is_empty() {
            return Err(Error::MalformedCell {
                cell: id,
                reason: "no offsets".into(),
            });
        }
        if let Some(bad) = cell.offsets.iter().find(|z| z.len() != d) {
            return Err(Error::MalformedCell {
                cell: id,
                reason: format!("offset {bad:?} does not have {d} entries"),
            });
        }
        if cell.offsets.len() != k {
            return Err(Error::InconsistentK {
                cell: id,
                expected: k,
                found: cell.offsets.len(),
            });
        }
        let mut sorted = cell.offsets.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateOffset {
                cell: id,
                offset: w[0].clone(),
            });
        }
    }
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let v = cells[i].overlap_volume(&cells[j]);
            if v > VOLUME_TOL {
                return Err(Error::NotATiling(format!(
                    "cells {i} and {j} overlap (volume {v:e})"
                )));
            }
        }
    }
    let total: f64 = cells.iter().map(Cell::volume).sum();
    if (total - 1.0).abs() > VOLUME_TOL {
        return Err(Error::NotATiling(format!(
            "cell volumes sum to {total}, expected 1"
        )));
    }
    Ok(k)
}
