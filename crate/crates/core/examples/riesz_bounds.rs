//! Riesz bounds per cell, exact and from the Vandermonde block factors.

use multitile::domain::{Cell, MultiTileDomain};
use multitile::lattice::Lattice;
use multitile::system::{ExponentialSystem, ShiftSet};

fn main() -> multitile::Result<()> {
    let l_shape = MultiTileDomain::new(
        Lattice::identity(2),
        vec![
            Cell::new(vec![0.0, 0.0], vec![0.5, 1.0], vec![vec![0, 0], vec![1, 0], vec![0, 1]]),
            Cell::new(vec![0.5, 0.0], vec![1.0, 1.0], vec![vec![0, 0], vec![1, 0], vec![1, 1]]),
        ],
    )?;
    for delta in [[0.5, 0.5], [0.25, 0.5], [0.2, 0.3]] {
        let shifts = ShiftSet::new(&l_shape, delta.to_vec(), vec![0, 0])?;
        let system = ExponentialSystem::new(&l_shape, &shifts);
        let b = system.riesz_bounds()?;
        println!("delta = {delta:?}: alpha = {:.4}, beta = {:.4}", b.alpha, b.beta);
        for c in &b.cells {
            println!(
                "  cell {}: sigma^2 in [{:.4}, {:.4}], block product bounds [{:.4}, {:.4}], kappa {:.3}",
                c.cell,
                c.sigma_min.powi(2),
                c.sigma_max.powi(2),
                c.factored_lower,
                c.factored_upper,
                c.condition
            );
        }
    }
    Ok(())
}
