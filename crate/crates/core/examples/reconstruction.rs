//! Reconstruction from exact point data and from truncated coefficient data.

use multitile::admissibility::find_pair;
use multitile::domain::{Cell, MultiTileDomain};
use multitile::lattice::Lattice;
use multitile::reconstruction::{coefficient_data, forward_data, reconstruct_grid, ExponentialSum};
use multitile::system::ShiftSet;
use num_complex::Complex64;

fn main() -> multitile::Result<()> {
    let domain = MultiTileDomain::new(
        Lattice::identity(2),
        vec![
            Cell::new(vec![0.0, 0.0], vec![0.5, 1.0], vec![vec![0, 0], vec![1, 0], vec![0, 1]]),
            Cell::new(vec![0.5, 0.0], vec![1.0, 1.0], vec![vec![0, 0], vec![1, 0], vec![1, 1]]),
        ],
    )?;
    let cert = find_pair(&domain, 6, 6)?;
    let shifts = ShiftSet::from_certificate(&domain, &cert, vec![0, 0])?;

    let f = ExponentialSum {
        terms: vec![
            (vec![0.3, -0.7], Complex64::new(1.0, 0.0)),
            (vec![-1.2, 0.45], Complex64::new(0.0, 0.5)),
        ],
    };
    let points = domain.sample_grid(8);
    let truth: Vec<Vec<Complex64>> = points.iter().map(|p| f.region_values(&domain, p)).collect();

    let exact = forward_data(&domain, &shifts, &points, &truth)?;
    let out = reconstruct_grid(&domain, &shifts, &exact, true)?;
    println!("pointwise data: max residual vs dense solve {:.2e}, max error {:.2e}", out.max_residual().unwrap(), max_error(&out.points, &truth));

    for radius in [2, 4, 8, 16] {
        let data = coefficient_data(&domain, &shifts, &f, radius, &points)?;
        let out = reconstruct_grid(&domain, &shifts, &data, false)?;
        println!("coefficients within radius {radius}: max error {:.3e}", max_error(&out.points, &truth));
    }
    Ok(())
}

fn max_error(points: &[multitile::reconstruction::PointReconstruction], truth: &[Vec<Complex64>]) -> f64 {
    points
        .iter()
        .zip(truth)
        .flat_map(|(p, t)| p.values.iter().zip(t).map(|(a, b)| (a - b).norm()))
        .fold(0.0, f64::max)
}
