//! Dual functions on [0,2) with a non-orthogonal shift, checked by closed-form
//! inner products.

use multitile::domain::{Cell, MultiTileDomain};
use multitile::lattice::Lattice;
use multitile::system::{exponential, ExponentialSystem, Frequency, ShiftSet};

fn main() -> multitile::Result<()> {
    let domain = MultiTileDomain::new(Lattice::identity(1), vec![Cell::unit(1, vec![vec![0], vec![1]])])?;
    let shifts = ShiftSet::new(&domain, vec![0.25], vec![0])?;
    let system = ExponentialSystem::new(&domain, &shifts);

    let l = Frequency { dual: vec![0], shift: 1 };
    let xi = system.frequency(&l)?;
    for y in [0.25, 0.75, 1.25, 1.75] {
        let g = system.dual_eval(&l, &[y])?;
        let e = exponential(&xi, &[y]);
        println!("y = {y}: g = {g:.6}, e = {e:.6}");
    }

    let m = Frequency { dual: vec![2], shift: 0 };
    println!("<e_l, g_l> / |Omega| = {:.3e}", system.dual_inner(&l, &l)? / domain.measure());
    println!("<e_m, g_l> / |Omega| = {:.3e}", system.dual_inner(&m, &l)?.norm() / domain.measure());
    println!("max residual, radius 4: {:.3e}", system.verify_biorthogonality(4)?);
    Ok(())
}
