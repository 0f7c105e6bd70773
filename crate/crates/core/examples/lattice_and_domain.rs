//! Lattices, their duals, and a two-cell multi-tile read from a spec file.

use multitile::io::read_domain;
use multitile::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lat = Lattice::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]])?;
    println!("vol = {}", lat.volume());
    println!("dual rows = {:?}", lat.dual_lattice().basis_rows());

    let x = [3.7, -1.2];
    let (u, z) = lat.reduce(&x);
    println!("{x:?} = M{z:?} + M{u:?}");

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/three_tile_2d.json");
    let domain = read_domain(path.as_ref())?;
    println!("k = {}, |Omega| = {}", domain.k(), domain.measure());
    for y in [[0.25, 0.5], [1.75, 1.5], [2.5, 0.5]] {
        match domain.omega_inverse(&y) {
            Ok(p) => println!("{y:?}: cell {} region {} u = {:?}", p.cell, p.region, p.u),
            Err(e) => println!("{y:?}: {e}"),
        }
    }
    Ok(())
}
