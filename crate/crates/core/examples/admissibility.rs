//! Certifying (v, q) pairs, searching for one, and the 1D gcd shift.

use multitile::admissibility::{check, find_pair, perfect_shift_1d, CheckOutcome};
use multitile::domain::{Cell, MultiTileDomain};
use multitile::lattice::Lattice;

fn main() -> multitile::Result<()> {
    let gapped = MultiTileDomain::new(Lattice::identity(1), vec![Cell::unit(1, vec![vec![0], vec![2]])])?;
    for q in [2, 4] {
        match check(&gapped, &[1.0], &[q])? {
            CheckOutcome::Certified(c) => println!("q = {q}: {}", c.class),
            CheckOutcome::Failed(col) => println!("q = {q}: {col}"),
        }
    }

    let cert = find_pair(&gapped, 4, 8)?;
    println!("search: {} with v = {:?}, q = {:?}, delta = {:?}", cert.class, cert.v, cert.q, cert.delta());

    for z in [vec![0, 1], vec![0, 2], vec![0, 2, 4], vec![0, 1, 3]] {
        match perfect_shift_1d(&z) {
            Some(p) => println!("{z:?}: tau = {}, delta = {}", p.tau, p.delta),
            None => println!("{z:?}: no perfect shift"),
        }
    }
    Ok(())
}
