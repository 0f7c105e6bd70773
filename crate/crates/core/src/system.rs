//! Exponential systems `{e_l : l in Lambda^* + a_s}` on a multi-tile, the
//! per-cell matrices `V_sr = exp(-2 pi i lambda_r . a_s)`, the biorthogonal dual
//! functions and closed-form inner products.
//!
//! Rows of a cell's `V` follow the cell's own shift-index order and columns
//! follow its region order. When every cell has the same index set the system
//! is called uniform; a shift is then addressed by its position `s` in cell
//! 0's order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::admissibility::{cell_trees, AdmissibilityCertificate};
use crate::domain::MultiTileDomain;
use crate::error::{Error, Result};
use crate::linalg::{self, cis2pi, CMatrix};
use crate::reconstruction::level_blocks;
use crate::tree::{FrequencyTree, ShiftIndexSet};

/// Cells whose smallest singular value is below this are singular.
pub const SINGULAR_SIGMA: f64 = 1e-12;
/// Tolerance of the Hadamard test `V*V = kI`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Diagonal scaling `delta`, dual-lattice offset `eta`, and per-cell index sets.
#[derive(Debug, Clone)]
pub struct ShiftSet {
    delta: Vec<f64>,
    eta_coords: Vec<i64>,
    eta: Vec<f64>,
    trees: Vec<FrequencyTree>,
    uniform: bool,
}

impl ShiftSet {
    /// `eta_coords` are the integer coordinates of `eta` in the dual basis.
    pub fn new(domain: &MultiTileDomain, delta: Vec<f64>, eta_coords: Vec<i64>) -> Result<Self> {
        let d = domain.dim();
        for len in [delta.len(), eta_coords.len()] {
            if len != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: len,
                });
            }
        }
        let trees = cell_trees(domain);
        let first = trees[0].shift_index_set();
        let uniform = trees.iter().all(|t| t.shift_index_set().same_set(first));
        let eta = domain.lattice().dual_point(&eta_coords);
        Ok(Self {
            delta,
            eta_coords,
            eta,
            trees,
            uniform,
        })
    }

    pub fn from_certificate(
        domain: &MultiTileDomain,
        cert: &AdmissibilityCertificate,
        eta_coords: Vec<i64>,
    ) -> Result<Self> {
        Self::new(domain, cert.delta(), eta_coords)
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn eta_coords(&self) -> &[i64] {
        &self.eta_coords
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn tree(&self, cell: usize) -> &FrequencyTree {
        &self.trees[cell]
    }

    pub fn indices(&self, cell: usize) -> &ShiftIndexSet {
        self.trees[cell].shift_index_set()
    }

    /// The global shift order of a uniform system.
    pub fn global_indices(&self) -> Result<&ShiftIndexSet> {
        if self.uniform {
            Ok(self.indices(0))
        } else {
            Err(Error::NonUniformShifts)
        }
    }

    /// `a = delta j + eta`.
    pub fn shift_vector(&self, j: &[usize]) -> Vec<f64> {
        j.iter()
            .zip(&self.delta)
            .zip(&self.eta)
            .map(|((&j, dl), e)| dl * j as f64 + e)
            .collect()
    }

    /// Shift vectors of a cell in its index order.
    pub fn cell_shifts(&self, cell: usize) -> Vec<Vec<f64>> {
        self.indices(cell).iter().map(|j| self.shift_vector(j)).collect()
    }
}

/// The matrix `V` of one cell with its spectrum.
#[derive(Debug, Clone)]
pub struct PointSystem {
    pub cell: usize,
    pub v: CMatrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub inverse: Option<CMatrix>,
}

impl PointSystem {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn condition(&self) -> f64 {
        self.sigma_max() / self.sigma_min()
    }
}

pub fn cell_matrix(domain: &MultiTileDomain, shifts: &ShiftSet, cell: usize) -> CMatrix {
    let lambdas = domain.region_vectors(cell);
    let a = shifts.cell_shifts(cell);
    let k = lambdas.len();
    CMatrix::from_fn(k, k, |s, r| cis2pi(-dot(&lambdas[r], &a[s])))
}

pub fn cell_system(domain: &MultiTileDomain, shifts: &ShiftSet, cell: usize) -> PointSystem {
    let v = cell_matrix(domain, shifts, cell);
    let singular_values = linalg::singular_values(&v);
    let inverse = if singular_values.last().copied().unwrap_or(0.0) >= SINGULAR_SIGMA {
        linalg::inverse(&v).ok()
    } else {
        None
    };
    PointSystem {
        cell,
        v,
        singular_values,
        inverse,
    }
}

/// `V(u)` for a point of the fundamental domain.
pub fn assemble_v(domain: &MultiTileDomain, shifts: &ShiftSet, u: &[f64]) -> Result<PointSystem> {
    let cell = domain.cell_at(u)?;
    Ok(cell_system(domain, shifts, cell))
}

/// `phi(theta; a, b) = int_a^b exp(2 pi i theta t) dt`.
pub fn box_phase_integral(theta: f64, a: f64, b: f64) -> Complex64 {
    let w = b - a;
    let x = std::f64::consts::PI * theta * w;
    let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    cis2pi(0.5 * theta * (a + b)) * (w * sinc)
}

/// `int over the piece omega_r(cell box) of exp(2 pi i xi . y) dy`.
fn piece_integrals(domain: &MultiTileDomain, cell: usize, xi: &[f64]) -> Vec<Complex64> {
    let lat = domain.lattice();
    let theta = lat.transpose_apply(xi);
    let c = &domain.cells()[cell];
    let mut box_part = Complex64::new(lat.volume(), 0.0);
    for ((t, a), b) in theta.iter().zip(c.lower()).zip(c.upper()) {
        box_part *= box_phase_integral(*t, *a, *b);
    }
    c.offsets()
        .iter()
        .map(|z| {
            let phase: f64 = theta.iter().zip(z).map(|(t, &zi)| t * zi as f64).sum();
            box_part * cis2pi(phase)
        })
        .collect()
}

/// `<e_l, e_l'> = int_Omega exp(2 pi i (l - l') . y) dy`, in closed form.
pub fn gram(domain: &MultiTileDomain, l: &[f64], l_prime: &[f64]) -> Complex64 {
    let xi: Vec<f64> = l.iter().zip(l_prime).map(|(a, b)| a - b).collect();
    (0..domain.cells().len())
        .map(|c| piece_integrals(domain, c, &xi).into_iter().sum::<Complex64>())
        .sum()
}

pub fn exponential(l: &[f64], y: &[f64]) -> Complex64 {
    cis2pi(dot(l, y))
}

/// A frequency `lambda^* + a_s` named by the integer coordinates of
/// `lambda^*` in the dual basis and the global shift position `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub dual: Vec<i64>,
    pub shift: usize,
}

/// Riesz constants of a uniform system.
#[derive(Debug, Clone, PartialEq)]
pub struct RieszBounds {
    /// `min_cells sigma_min(V)^2`.
    pub alpha: f64,
    /// `max_cells sigma_max(V)^2`.
    pub beta: f64,
    /// `vol(Lambda) alpha`.
    pub lower_frame: f64,
    /// `vol(Lambda) beta`.
    pub upper_frame: f64,
    pub cells: Vec<CellBounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellBounds {
    pub cell: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub condition: f64,
    /// `prod_l ||(W^l)^{-1}||^{-2}`.
    pub factored_lower: f64,
    /// `prod_l ||W^l||^2`.
    pub factored_upper: f64,
}

impl CellBounds {
    /// Largest violation of `factored_lower <= sigma_min^2 <= sigma_max^2 <= factored_upper`.
    pub fn sandwich_violation(&self) -> f64 {
        let lo = self.factored_lower - self.sigma_min * self.sigma_min;
        let hi = self.sigma_max * self.sigma_max - self.factored_upper;
        lo.max(hi).max(0.0)
    }
}

/// Per-cell systems of a domain, cached.
#[derive(Debug, Clone)]
pub struct ExponentialSystem<'a> {
    domain: &'a MultiTileDomain,
    shifts: &'a ShiftSet,
    systems: Vec<PointSystem>,
}

impl<'a> ExponentialSystem<'a> {
    pub fn new(domain: &'a MultiTileDomain, shifts: &'a ShiftSet) -> Self {
        let systems = (0..domain.cells().len())
            .into_par_iter()
            .map(|c| cell_system(domain, shifts, c))
            .collect();
        Self {
            domain,
            shifts,
            systems,
        }
    }

    pub fn domain(&self) -> &MultiTileDomain {
        self.domain
    }

    pub fn shifts(&self) -> &ShiftSet {
        self.shifts
    }

    pub fn cell(&self, cell: usize) -> &PointSystem {
        &self.systems[cell]
    }

    pub fn systems(&self) -> &[PointSystem] {
        &self.systems
    }

    fn require_uniform(&self) -> Result<&ShiftIndexSet> {
        self.shifts.global_indices()
    }

    fn inverse(&self, cell: usize) -> Result<&CMatrix> {
        let sys = &self.systems[cell];
        sys.inverse.as_ref().ok_or(Error::SingularCell {
            cell,
            sigma_min: sys.sigma_min(),
        })
    }

    /// Row of global shift `s` inside a cell's matrix.
    fn row(&self, cell: usize, s: usize) -> Result<usize> {
        let global = self.require_uniform()?;
        let j = global.0.get(s).ok_or(Error::ShiftOutOfRange {
            index: s,
            k: global.len(),
        })?;
        Ok(self
            .shifts
            .indices(cell)
            .position(j)
            .expect("uniform cells share their index set"))
    }

    /// The physical frequency `lambda^* + a_s`.
    pub fn frequency(&self, f: &Frequency) -> Result<Vec<f64>> {
        let global = self.require_uniform()?;
        let j = global.0.get(f.shift).ok_or(Error::ShiftOutOfRange {
            index: f.shift,
            k: global.len(),
        })?;
        let dual = self.domain.lattice().dual_point(&f.dual);
        Ok(dual
            .iter()
            .zip(self.shifts.shift_vector(j))
            .map(|(a, b)| a + b)
            .collect())
    }

    /// `k V_sr (V^{-1})_rs` on region `r` of a cell.
    pub fn modulation(&self, cell: usize, region: usize, s: usize) -> Result<Complex64> {
        let row = self.row(cell, s)?;
        let inv = self.inverse(cell)?;
        let v = &self.systems[cell].v;
        Ok(v[(row, region)] * inv[(region, row)] * self.domain.k() as f64)
    }

    /// Largest `||V*V - kI||_max` over cells, and whether it is within tolerance.
    pub fn is_orthogonal(&self) -> Result<(bool, f64)> {
        self.require_uniform()?;
        let k = self.domain.k() as f64;
        let dev = self
            .systems
            .iter()
            .map(|sys| {
                let g = sys.v.adjoint() * &sys.v;
                let mut worst: f64 = 0.0;
                for i in 0..g.nrows() {
                    for j in 0..g.ncols() {
                        let target = if i == j { k } else { 0.0 };
                        worst = worst.max((g[(i, j)] - target).norm());
                    }
                }
                worst
            })
            .fold(0.0, f64::max);
        Ok((dev <= ORTHOGONALITY_TOL, dev))
    }

    /// Exact Riesz constants from the per-cell spectra, together with the
    /// bounds from the one-dimensional Vandermonde blocks.
    pub fn riesz_bounds(&self) -> Result<RieszBounds> {
        self.require_uniform()?;
        let mut cells = Vec::with_capacity(self.systems.len());
        for sys in &self.systems {
            if sys.sigma_min() < SINGULAR_SIGMA {
                return Err(Error::SingularCell {
                    cell: sys.cell,
                    sigma_min: sys.sigma_min(),
                });
            }
            let blocks = level_blocks(self.shifts.tree(sys.cell), self.shifts.delta())?;
            let mut lower = 1.0;
            let mut upper = 1.0;
            for level in &blocks {
                let mut lo = f64::INFINITY;
                let mut hi: f64 = 0.0;
                for w in level {
                    let (a, b) = linalg::extreme_singular_values(&w.matrix());
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
                lower *= lo * lo;
                upper *= hi * hi;
            }
            cells.push(CellBounds {
                cell: sys.cell,
                sigma_min: sys.sigma_min(),
                sigma_max: sys.sigma_max(),
                condition: sys.condition(),
                factored_lower: lower,
                factored_upper: upper,
            });
        }
        let alpha = cells.iter().map(|c| c.sigma_min * c.sigma_min).fold(f64::INFINITY, f64::min);
        let beta = cells.iter().map(|c| c.sigma_max * c.sigma_max).fold(0.0, f64::max);
        let vol = self.domain.lattice().volume();
        Ok(RieszBounds {
            alpha,
            beta,
            lower_frame: vol * alpha,
            upper_frame: vol * beta,
            cells,
        })
    }

    /// `g_l(y)` for `l = lambda^* + a_s`.
    pub fn dual_eval(&self, l: &Frequency, y: &[f64]) -> Result<Complex64> {
        let freq = self.frequency(l)?;
        let at = self.domain.omega_inverse(y)?;
        let m = self.modulation(at.cell, at.region, l.shift)?;
        Ok(exponential(&freq, y) * m)
    }

    /// `<e_l, g_l'>` in closed form: on every (cell, region) piece `g_l'` is a
    /// constant multiple of `e_l'`.
    pub fn dual_inner(&self, l: &Frequency, l_prime: &Frequency) -> Result<Complex64> {
        let xi: Vec<f64> = self
            .frequency(l)?
            .iter()
            .zip(self.frequency(l_prime)?)
            .map(|(a, b)| a - b)
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for cell in 0..self.systems.len() {
            for (r, piece) in piece_integrals(self.domain, cell, &xi).into_iter().enumerate() {
                total += self.modulation(cell, r, l_prime.shift)?.conj() * piece;
            }
        }
        Ok(total)
    }

    /// All frequencies with `||lambda^*||_inf <= radius` (integer dual coordinates).
    pub fn frequencies(&self, radius: i64) -> Result<Vec<Frequency>> {
        let k = self.require_uniform()?.len();
        let d = self.domain.dim();
        let side = (2 * radius + 1) as usize;
        let mut out = Vec::with_capacity(side.pow(d as u32) * k);
        for flat in 0..side.pow(d as u32) {
            let mut rem = flat;
            let mut z = vec![0i64; d];
            for zi in z.iter_mut().rev() {
                *zi = (rem % side) as i64 - radius;
                rem /= side;
            }
            for s in 0..k {
                out.push(Frequency {
                    dual: z.clone(),
                    shift: s,
                });
            }
        }
        Ok(out)
    }

    /// `max |<e_l, g_l'> / |Omega| - [l = l']|` over the frequencies within `radius`.
    pub fn verify_biorthogonality(&self, radius: i64) -> Result<f64> {
        let freqs = self.frequencies(radius)?;
        for cell in 0..self.systems.len() {
            self.inverse(cell)?;
        }
        let measure = self.domain.measure();
        let worst = freqs
            .par_iter()
            .map(|l| {
                freqs
                    .iter()
                    .map(|lp| {
                        let ip = self.dual_inner(l, lp).expect("checked above") / measure;
                        let target = if l == lp { 1.0 } else { 0.0 };
                        (ip - target).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
