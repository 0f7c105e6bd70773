//! Spectral data and pointwise reconstruction.
//!
//! For a point `u` of cell `c` the data vector is
//! `F_s(u) = sum_{lambda^*} <f, e_{lambda^* + a_s}> e_{lambda^* + a_s}(u)`, which
//! equals `vol(Lambda) (V f)_s` with `f_r = f(omega_r(u))`. Recovering `f` from
//! `F` is done by [`NestedSolver`], which walks the frequency tree from the last
//! coordinate down and only ever solves one-dimensional Vandermonde systems.
//!
//! At a node over `S in R^l` with ordered parents `m'_1, .., m'_n`, put
//! `G_q(j) = sum_{z in Z_q} w_z^j c_(m'_q, z)` with `w_z = exp(-2 pi i delta_l z)`.
//! For each parent `i` in order and each `j` in its window `Q_i`, the rows
//! `(j'', j)` with `j''` in the suffix index set give a system on the suffix
//! tree for `G_i(j), .., G_n(j)` once the contributions of the already solved
//! parents `q < i` are subtracted. After window `i` the values
//! `G_i(0), .., G_i(#Z_i - 1)` are all known and one Vandermonde solve yields the
//! coefficients of parent `i`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::{GridPoint, MultiTileDomain};
use crate::error::{Error, Result};
use crate::linalg::{self, cis2pi, CMatrix};
use crate::system::{cell_matrix, exponential, gram, ShiftSet};
use crate::tree::FrequencyTree;
use crate::vandermonde::Vandermonde;

#[derive(Debug, Clone)]
struct ParentBlock {
    block: Vandermonde,
    targets: Vec<usize>,
    window: std::ops::Range<usize>,
}

#[derive(Debug, Clone)]
enum Node {
    Line(Vandermonde),
    Split {
        len: usize,
        parents: Vec<ParentBlock>,
        suffixes: Vec<Node>,
        /// `corrections[i][row][q] = exp(-2 pi i delta'' j''_row . m'_q)`, `q < i`.
        corrections: Vec<Vec<Vec<Complex64>>>,
    },
}

fn nodes_for(values: impl Iterator<Item = f64>, delta: f64) -> Vec<Complex64> {
    values.map(|z| cis2pi(-delta * z)).collect()
}

impl Node {
    fn build(tree: &FrequencyTree, delta: &[f64]) -> Result<Self> {
        let dim = tree.dim();
        let Some(parents) = tree.parents() else {
            let values = tree.values_1d().expect("one-dimensional node");
            return Ok(Node::Line(Vandermonde::new(nodes_for(values.into_iter(), delta[0]))?));
        };
        let d_last = delta[dim - 1];
        let head = &delta[..dim - 1];
        let mut blocks = Vec::with_capacity(parents.len());
        let mut suffixes = Vec::with_capacity(parents.len());
        let mut corrections = Vec::with_capacity(parents.len());
        for (i, p) in parents.iter().enumerate() {
            blocks.push(ParentBlock {
                block: Vandermonde::new(nodes_for(p.children.iter().map(|c| c.0), d_last))?,
                targets: p.children.iter().map(|c| c.1).collect(),
                window: p.window.clone(),
            });
            let sub = tree.suffix(i).expect("one suffix per parent");
            let rows: Vec<Vec<Complex64>> = sub
                .shift_index_set()
                .iter()
                .map(|j| {
                    parents[..i]
                        .iter()
                        .map(|q| {
                            let phase: f64 = j
                                .iter()
                                .zip(head)
                                .zip(&q.prefix)
                                .map(|((&jj, dl), m)| jj as f64 * dl * m)
                                .sum();
                            cis2pi(-phase)
                        })
                        .collect()
                })
                .collect();
            corrections.push(rows);
            suffixes.push(Node::build(sub, head)?);
        }
        Ok(Node::Split {
            len: tree.len(),
            parents: blocks,
            suffixes,
            corrections,
        })
    }

    fn len(&self) -> usize {
        match self {
            Node::Line(v) => v.len(),
            Node::Split { len, .. } => *len,
        }
    }

    fn solve(&self, data: &[Complex64]) -> Result<Vec<Complex64>> {
        if data.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: data.len(),
            });
        }
        match self {
            Node::Line(v) => v.solve(data),
            Node::Split {
                len,
                parents,
                suffixes,
                corrections,
            } => {
                let n = parents.len();
                let mut partial: Vec<Vec<Complex64>> = parents
                    .iter()
                    .map(|p| vec![Complex64::new(0.0, 0.0); p.block.len()])
                    .collect();
                let mut coeffs: Vec<Vec<Complex64>> = Vec::with_capacity(n);
                let mut out = vec![Complex64::new(0.0, 0.0); *len];
                let mut pos = 0;
                for i in 0..n {
                    let sub = &suffixes[i];
                    let rows = sub.len();
                    let width = parents[i].window.len();
                    for (jj, j) in parents[i].window.clone().enumerate() {
                        let known: Vec<Complex64> = (0..i)
                            .map(|q| {
                                parents[q]
                                    .block
                                    .nodes()
                                    .iter()
                                    .zip(&coeffs[q])
                                    .map(|(w, c)| w.powu(j as u32) * c)
                                    .sum()
                            })
                            .collect();
                        let rhs: Vec<Complex64> = (0..rows)
                            .map(|row| {
                                let mut f = data[pos + row * width + jj];
                                for (q, g) in known.iter().enumerate() {
                                    f -= corrections[i][row][q] * g;
                                }
                                f
                            })
                            .collect();
                        let sol = sub.solve(&rhs)?;
                        for (t, value) in sol.into_iter().enumerate() {
                            partial[i + t][j] = value;
                        }
                    }
                    pos += rows * width;
                    let c = parents[i].block.solve(&partial[i])?;
                    for (t, &target) in parents[i].targets.iter().enumerate() {
                        out[target] = c[t];
                    }
                    coeffs.push(c);
                }
                Ok(out)
            }
        }
    }

    fn conditions(&self, out: &mut Vec<f64>) {
        match self {
            Node::Line(v) => out.push(v.condition()),
            Node::Split {
                parents, suffixes, ..
            } => {
                for p in parents {
                    out.push(p.block.condition());
                }
                for s in suffixes {
                    s.conditions(out);
                }
            }
        }
    }
}

/// Prepared nested solver for one frequency tree and one `delta`.
#[derive(Debug, Clone)]
pub struct NestedSolver {
    root: Node,
}

impl NestedSolver {
    /// Fails with `DuplicateNodes` when `delta` is not admissible for the tree.
    pub fn new(tree: &FrequencyTree, delta: &[f64]) -> Result<Self> {
        if delta.len() != tree.dim() {
            return Err(Error::DimensionMismatch {
                expected: tree.dim(),
                found: delta.len(),
            });
        }
        Ok(Self {
            root: Node::build(tree, delta)?,
        })
    }

    /// Solves `V c = data`, with `data` in the tree's shift-index order and the
    /// result in the tree's vector order.
    pub fn solve(&self, data: &[Complex64]) -> Result<Vec<Complex64>> {
        self.root.solve(data)
    }

    /// Condition numbers of every one-dimensional block the solver uses.
    pub fn block_conditions(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.root.conditions(&mut out);
        out
    }
}

/// One-shot nested reconstruction at a single point.
pub fn reconstruct_point(tree: &FrequencyTree, delta: &[f64], data: &[Complex64]) -> Result<Vec<Complex64>> {
    NestedSolver::new(tree, delta)?.solve(data)
}

/// Dense reference: solves `V y = F / vol`.
pub fn reconstruct_direct(v: &CMatrix, data: &[Complex64], volume: f64) -> Result<Vec<Complex64>> {
    let scaled: Vec<Complex64> = data.iter().map(|f| f / volume).collect();
    linalg::solve(v, &scaled)
}

/// The block-diagonal factors `W^l`, `l = 1..d`, of the full tree: level 1 is
/// the Vandermonde matrix on `M^1`, level `l` has one block per parent in `M^{l-1}`.
pub fn level_blocks(tree: &FrequencyTree, delta: &[f64]) -> Result<Vec<Vec<Vandermonde>>> {
    tree.levels()
        .iter()
        .map(|level| {
            let dl = delta[level.level - 1];
            level
                .child_values
                .iter()
                .map(|values| Vandermonde::new(nodes_for(values.iter().copied(), dl)))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    ExactPointwise,
    CoefficientTruncated { radius: i64 },
}

/// Data vector at one grid point, in the cell's shift-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample {
    pub cell: usize,
    pub u: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub provenance: Provenance,
    pub samples: Vec<SpectralSample>,
}

/// `F = vol(Lambda) V (f(omega_r(u)))_r` at each grid point.
pub fn forward_data(
    domain: &MultiTileDomain,
    shifts: &ShiftSet,
    points: &[GridPoint],
    values: &[Vec<Complex64>],
) -> Result<SpectralData> {
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: values.len(),
        });
    }
    let matrices: Vec<CMatrix> = (0..domain.cells().len())
        .map(|c| cell_matrix(domain, shifts, c))
        .collect();
    let vol = domain.lattice().volume();
    let mut samples = Vec::with_capacity(points.len());
    for (p, f) in points.iter().zip(values) {
        if f.len() != domain.k() {
            return Err(Error::DimensionMismatch {
                expected: domain.k(),
                found: f.len(),
            });
        }
        if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("point values must be finite".into()));
        }
        let values = linalg::mat_vec(&matrices[p.cell], f)
            .into_iter()
            .map(|z| z * vol)
            .collect();
        samples.push(SpectralSample {
            cell: p.cell,
            u: p.u.clone(),
            values,
        });
    }
    Ok(SpectralData {
        provenance: Provenance::ExactPointwise,
        samples,
    })
}

/// A finite exponential sum `f(y) = sum_t c_t exp(2 pi i xi_t . y)` restricted to the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSum {
    pub terms: Vec<(Vec<f64>, Complex64)>,
}

impl ExponentialSum {
    pub fn eval(&self, y: &[f64]) -> Complex64 {
        self.terms.iter().map(|(xi, c)| c * exponential(xi, y)).sum()
    }

    /// `<f, e_l>` over the domain.
    pub fn inner(&self, domain: &MultiTileDomain, l: &[f64]) -> Complex64 {
        self.terms.iter().map(|(xi, c)| c * gram(domain, xi, l)).sum()
    }

    /// `f(omega_r(u))` for every region of the point's cell.
    pub fn region_values(&self, domain: &MultiTileDomain, p: &GridPoint) -> Vec<Complex64> {
        (0..domain.k())
            .map(|r| self.eval(&domain.omega_in_cell(p.cell, r, &p.u)))
            .collect()
    }
}

fn dual_coords(d: usize, radius: i64) -> Vec<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    (0..side.pow(d as u32))
        .map(|flat| {
            let mut rem = flat;
            let mut z = vec![0i64; d];
            for zi in z.iter_mut().rev() {
                *zi = (rem % side) as i64 - radius;
                rem /= side;
            }
            z
        })
        .collect()
}

/// Data from the inner products `<f, e_l>`, truncated to dual points with
/// integer coordinates in `[-radius, radius]^d`. Converges to the exact data as
/// the radius grows.
pub fn coefficient_data(
    domain: &MultiTileDomain,
    shifts: &ShiftSet,
    f: &ExponentialSum,
    radius: i64,
    points: &[GridPoint],
) -> Result<SpectralData> {
    if radius < 0 {
        return Err(Error::InvalidParameter("radius must be non-negative".into()));
    }
    let lat = domain.lattice();
    let duals: Vec<Vec<f64>> = dual_coords(domain.dim(), radius)
        .iter()
        .map(|z| lat.dual_point(z))
        .collect();
    // (frequency, <f, e_l>) per distinct shift index
    let mut series: HashMap<Vec<usize>, Vec<(Vec<f64>, Complex64)>> = HashMap::new();
    for cell in 0..domain.cells().len() {
        for j in shifts.indices(cell).iter() {
            if series.contains_key(j) {
                continue;
            }
            let a = shifts.shift_vector(j);
            let terms = duals
                .par_iter()
                .map(|ls| {
                    let l: Vec<f64> = ls.iter().zip(&a).map(|(x, y)| x + y).collect();
                    let c = f.inner(domain, &l);
                    (l, c)
                })
                .collect();
            series.insert(j.clone(), terms);
        }
    }
    let samples = points
        .par_iter()
        .map(|p| {
            let x = lat.to_physical(&p.u);
            let values = shifts
                .indices(p.cell)
                .iter()
                .map(|j| {
                    series[j]
                        .iter()
                        .map(|(l, c)| c * exponential(l, &x))
                        .sum()
                })
                .collect();
            SpectralSample {
                cell: p.cell,
                u: p.u.clone(),
                values,
            }
        })
        .collect();
    Ok(SpectralData {
        provenance: Provenance::CoefficientTruncated { radius },
        samples,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointReconstruction {
    pub cell: usize,
    pub u: Vec<f64>,
    /// `f(omega_r(u))` in region order.
    pub values: Vec<Complex64>,
    /// Relative difference to the dense solve, when the oracle ran.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellDiagnostics {
    pub cell: usize,
    pub block_conditions: Vec<f64>,
    pub v_condition: f64,
}

impl CellDiagnostics {
    pub fn max_block_condition(&self) -> f64 {
        self.block_conditions.iter().copied().fold(1.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub provenance: Provenance,
    pub points: Vec<PointReconstruction>,
    pub cells: Vec<CellDiagnostics>,
    /// Samples that could not be used, with the reason.
    pub skipped: Vec<(usize, String)>,
}

impl ReconstructionResult {
    pub fn max_residual(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(|p| p.residual)
            .reduce(f64::max)
    }

    /// `(y, f(y))` for every recovered value, `y = omega_r(u)`.
    pub fn on_domain(&self, domain: &MultiTileDomain) -> Vec<(Vec<f64>, Complex64, Option<f64>)> {
        self.points
            .iter()
            .flat_map(|p| {
                p.values.iter().enumerate().map(move |(r, v)| {
                    (domain.omega_in_cell(p.cell, r, &p.u), *v, p.residual)
                })
            })
            .collect()
    }
}

/// Recovers `f(omega_r(u))` at every sample with the nested solver, and with the
/// dense solver as well when `oracle` is set.
pub fn reconstruct_grid(
    domain: &MultiTileDomain,
    shifts: &ShiftSet,
    data: &SpectralData,
    oracle: bool,
) -> Result<ReconstructionResult> {
    let ncells = domain.cells().len();
    let solvers: Vec<NestedSolver> = (0..ncells)
        .map(|c| NestedSolver::new(shifts.tree(c), shifts.delta()))
        .collect::<Result<_>>()?;
    let matrices: Vec<CMatrix> = (0..ncells).map(|c| cell_matrix(domain, shifts, c)).collect();
    let cells = (0..ncells)
        .map(|c| CellDiagnostics {
            cell: c,
            block_conditions: solvers[c].block_conditions(),
            v_condition: linalg::condition_number(&matrices[c]),
        })
        .collect();
    let vol = domain.lattice().volume();

    let outcomes: Vec<std::result::Result<PointReconstruction, (usize, String)>> = data
        .samples
        .par_iter()
        .enumerate()
        .map(|(idx, s)| {
            if s.cell >= ncells || !domain.cells()[s.cell].contains(&s.u) {
                return Err((idx, Error::PointOnGap(s.u.clone()).to_string()));
            }
            let nested = solvers[s.cell].solve(&s.values).map_err(|e| (idx, e.to_string()))?;
            let values: Vec<Complex64> = nested.into_iter().map(|z| z / vol).collect();
            let residual = if oracle {
                let direct = reconstruct_direct(&matrices[s.cell], &s.values, vol)
                    .map_err(|e| (idx, e.to_string()))?;
                Some(if linalg::norm(&direct) == 0.0 {
                    linalg::norm(&values)
                } else {
                    linalg::relative_error(&values, &direct)
                })
            } else {
                None
            };
            Ok(PointReconstruction {
                cell: s.cell,
                u: s.u.clone(),
                values,
                residual,
            })
        })
        .collect();

    let mut points = Vec::with_capacity(outcomes.len());
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Ok(p) => points.push(p),
            Err(e) => skipped.push(e),
        }
    }
    Ok(ReconstructionResult {
        provenance: data.provenance,
        points,
        cells,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::find_pair;
    use crate::domain::Cell;
    use crate::lattice::Lattice;
    use crate::tree::{example_m4, FrequencySet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn one_cell(lattice: Lattice, offsets: Vec<Vec<i64>>) -> MultiTileDomain {
        let d = offsets[0].len();
        MultiTileDomain::new(lattice, vec![Cell::unit(d, offsets)]).unwrap()
    }

    fn close_all(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn two_point_solve() {
        let tree = FrequencyTree::build(&FrequencySet::from_integer(&[vec![0], vec![1]]).unwrap());
        let out = reconstruct_point(&tree, &[0.5], &[c(0., 0.), c(2., 0.)]).unwrap();
        assert!(close_all(&out, &[c(1., 0.), c(-1., 0.)], 1e-15));
    }

    #[test]
    fn two_dimensional_pair() {
        let dom = one_cell(Lattice::identity(2), vec![vec![0, 0], vec![1, 0]]);
        let shifts = ShiftSet::new(&dom, vec![0.5, 1.0], vec![0, 0]).unwrap();
        let v = cell_matrix(&dom, &shifts, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coef = random_vec(&mut rng, 2);
        let data = linalg::mat_vec(&v, &coef);
        let out = reconstruct_point(shifts.tree(0), shifts.delta(), &data).unwrap();
        assert!(close_all(&out, &coef, 1e-12));
    }

    #[test]
    fn worked_example_m4() {
        let offsets: Vec<Vec<i64>> = example_m4()
            .vectors()
            .iter()
            .map(|z| z.iter().map(|x| *x as i64).collect())
            .collect();
        let dom = one_cell(Lattice::identity(4), offsets);
        let cert = find_pair(&dom, 20, 20).unwrap();
        let shifts = ShiftSet::from_certificate(&dom, &cert, vec![0; 4]).unwrap();
        let v = cell_matrix(&dom, &shifts, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..5 {
            let coef = random_vec(&mut rng, 10);
            let data = linalg::mat_vec(&v, &coef);
            let nested = reconstruct_point(shifts.tree(0), shifts.delta(), &data).unwrap();
            let direct = reconstruct_direct(&v, &data, 1.0).unwrap();
            assert!(linalg::relative_error(&nested, &coef) <= 1e-9);
            assert!(close_all(&nested, &direct, 1e-10));
        }
    }

    #[test]
    fn inadmissible_delta_rejected() {
        let tree = FrequencyTree::build(&FrequencySet::from_integer(&[vec![0], vec![2]]).unwrap());
        assert!(matches!(NestedSolver::new(&tree, &[0.5]), Err(Error::DuplicateNodes(..))));
        assert!(matches!(NestedSolver::new(&tree, &[0.5, 0.5]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn forward_examples() {
        let dom = one_cell(Lattice::identity(1), vec![vec![0], vec![1]]);
        let shifts = ShiftSet::new(&dom, vec![0.5], vec![0]).unwrap();
        let p = GridPoint { cell: 0, u: vec![0.4] };
        let data = forward_data(&dom, &shifts, std::slice::from_ref(&p), &[vec![c(1., 0.), c(-1., 0.)]]).unwrap();
        assert!(close_all(&data.samples[0].values, &[c(0., 0.), c(2., 0.)], 1e-15));
        assert!(matches!(
            forward_data(&dom, &shifts, &[p], &[vec![c(1., 0.)]]),
            Err(Error::DimensionMismatch { .. })
        ));

        let scaled = one_cell(Lattice::diagonal(&[3.0]).unwrap(), vec![vec![2]]);
        let shifts = ShiftSet::new(&scaled, vec![0.1], vec![0]).unwrap();
        let data = forward_data(&scaled, &shifts, &[GridPoint { cell: 0, u: vec![0.5] }], &[vec![c(2., 1.)]]).unwrap();
        assert!(close_all(&data.samples[0].values, &[c(6., 3.)], 1e-14));
        let back = reconstruct_grid(&scaled, &shifts, &data, true).unwrap();
        assert!(close_all(&back.points[0].values, &[c(2., 1.)], 1e-14));
    }

    fn l_shape() -> MultiTileDomain {
        MultiTileDomain::new(
            Lattice::identity(2),
            vec![
                Cell::new(vec![0.0, 0.0], vec![0.5, 1.0], vec![vec![0, 0], vec![1, 0], vec![0, 1]]),
                Cell::new(vec![0.5, 0.0], vec![1.0, 1.0], vec![vec![0, 0], vec![1, 0], vec![1, 1]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn linear_and_eta_invariant() {
        let dom = l_shape();
        let s0 = ShiftSet::new(&dom, vec![0.5, 0.5], vec![0, 0]).unwrap();
        let s1 = ShiftSet::new(&dom, vec![0.5, 0.5], vec![2, -1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let points = dom.sample_grid(3);
        let values: Vec<Vec<Complex64>> = points.iter().map(|_| random_vec(&mut rng, 3)).collect();
        let a = reconstruct_grid(&dom, &s0, &forward_data(&dom, &s0, &points, &values).unwrap(), false).unwrap();
        let b = reconstruct_grid(&dom, &s1, &forward_data(&dom, &s1, &points, &values).unwrap(), false).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!(close_all(&x.values, &y.values, 1e-12));
        }

        let solver = NestedSolver::new(s0.tree(0), s0.delta()).unwrap();
        let f1 = random_vec(&mut rng, 3);
        let f2 = random_vec(&mut rng, 3);
        let mu = c(0.3, -1.7);
        let mix: Vec<Complex64> = f1.iter().zip(&f2).map(|(a, b)| a + mu * b).collect();
        let lhs = solver.solve(&mix).unwrap();
        let r1 = solver.solve(&f1).unwrap();
        let r2 = solver.solve(&f2).unwrap();
        let rhs: Vec<Complex64> = r1.iter().zip(&r2).map(|(a, b)| a + mu * b).collect();
        assert!(close_all(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn grid_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let dom = MultiTileDomain::new(
            Lattice::identity(2),
            vec![
                Cell::new(vec![0.0, 0.0], vec![1.0, 0.5], vec![vec![0, 0], vec![2, 1], vec![-1, 3], vec![1, 1], vec![0, 2], vec![3, 0]]),
                Cell::new(vec![0.0, 0.5], vec![1.0, 1.0], vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1], vec![1, 1], vec![2, 1]]),
            ],
        )
        .unwrap();
        let cert = find_pair(&dom, 12, 12).unwrap();
        let shifts = ShiftSet::from_certificate(&dom, &cert, vec![0, 0]).unwrap();
        let points = dom.sample_grid(64);
        let values: Vec<Vec<Complex64>> = points.iter().map(|_| random_vec(&mut rng, 6)).collect();
        let data = forward_data(&dom, &shifts, &points, &values).unwrap();
        let out = reconstruct_grid(&dom, &shifts, &data, true).unwrap();
        assert!(out.skipped.is_empty());
        assert!(out.max_residual().unwrap() <= 1e-9);
        for (p, truth) in out.points.iter().zip(&values) {
            assert!(linalg::relative_error(&p.values, truth) <= 1e-9);
        }
    }

    #[test]
    fn zero_data_zero_function() {
        let dom = l_shape();
        let shifts = ShiftSet::new(&dom, vec![0.5, 0.5], vec![0, 0]).unwrap();
        let points = dom.sample_grid(4);
        let zero = ExponentialSum { terms: vec![(vec![0.2, 0.1], c(0., 0.))] };
        let data = coefficient_data(&dom, &shifts, &zero, 2, &points).unwrap();
        assert!(data.samples.iter().all(|s| s.values.iter().all(|z| *z == c(0., 0.))));
        let out = reconstruct_grid(&dom, &shifts, &data, true).unwrap();
        assert!(out.points.iter().all(|p| p.values.iter().all(|z| *z == c(0., 0.))));
        assert_eq!(out.max_residual(), Some(0.0));
    }

    #[test]
    fn single_exponential_is_exact() {
        let dom = one_cell(Lattice::identity(1), vec![vec![0], vec![1]]);
        let shifts = ShiftSet::new(&dom, vec![0.5], vec![0]).unwrap();
        // l0 = -3 + a_1
        let f = ExponentialSum { terms: vec![(vec![-2.5], c(1., 0.))] };
        let points = dom.sample_grid(8);
        for radius in [3, 5] {
            let data = coefficient_data(&dom, &shifts, &f, radius, &points).unwrap();
            let out = reconstruct_grid(&dom, &shifts, &data, false).unwrap();
            for (p, gp) in out.points.iter().zip(&points) {
                assert!(close_all(&p.values, &f.region_values(&dom, gp), 1e-9));
            }
        }
        let short = coefficient_data(&dom, &shifts, &f, 2, &points).unwrap();
        assert!(short.samples.iter().all(|s| s.values.iter().all(|z| z.norm() < 1e-12)));
    }

    #[test]
    fn bad_samples_are_skipped() {
        let dom = l_shape();
        let shifts = ShiftSet::new(&dom, vec![0.5, 0.5], vec![0, 0]).unwrap();
        let data = SpectralData {
            provenance: Provenance::ExactPointwise,
            samples: vec![
                SpectralSample { cell: 0, u: vec![0.25, 0.5], values: vec![c(1., 0.); 3] },
                SpectralSample { cell: 0, u: vec![0.75, 0.5], values: vec![c(1., 0.); 3] },
                SpectralSample { cell: 1, u: vec![0.75, 0.5], values: vec![c(1., 0.); 2] },
            ],
        };
        let out = reconstruct_grid(&dom, &shifts, &data, false).unwrap();
        assert_eq!(out.points.len(), 1);
        assert_eq!(out.skipped.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn block_diagnostics() {
        let dom = l_shape();
        let shifts = ShiftSet::new(&dom, vec![0.5, 0.5], vec![0, 0]).unwrap();
        let solver = NestedSolver::new(shifts.tree(0), shifts.delta()).unwrap();
        let conds = solver.block_conditions();
        assert!(!conds.is_empty());
        assert!(conds.iter().all(|k| *k >= 1.0 - 1e-12 && k.is_finite()));
        let blocks = level_blocks(shifts.tree(0), shifts.delta()).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].iter().map(Vandermonde::len).sum::<usize>(), 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn offset_sets() -> impl Strategy<Value = Vec<Vec<i64>>> {
            (1usize..=3).prop_flat_map(|d| {
                proptest::collection::btree_set(proptest::collection::vec(-3i64..=3, d), 1..8)
                    .prop_map(|s| s.into_iter().collect())
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn nested_matches_dense(offsets in offset_sets(), seed in 0u64..1000) {
                let d = offsets[0].len();
                let dom = one_cell(Lattice::identity(d), offsets.clone());
                let k = offsets.len() as u64;
                let cert = find_pair(&dom, 2 * k, 8).unwrap();
                let shifts = ShiftSet::from_certificate(&dom, &cert, vec![0; d]).unwrap();
                let v = cell_matrix(&dom, &shifts, 0);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let data = random_vec(&mut rng, offsets.len());
                let nested = reconstruct_point(shifts.tree(0), shifts.delta(), &data).unwrap();
                let direct = reconstruct_direct(&v, &data, 1.0).unwrap();
                prop_assert!(linalg::relative_error(&nested, &direct) <= 1e-9);
            }
        }
    }
}
