//! Site positions of the deformed square lattice and the couplings they imply.
//!
//! ```text
//! cargo run --example lattice_geometry -- 4 120
//! ```

use wgslab::lattice::{nearest_neighbour_bonds, CouplingModel, LatticeSpec, Range};

fn main() -> wgslab::Result<()> {
    let mut args = std::env::args().skip(1);
    let side: usize = args.next().map_or(4, |s| s.parse().expect("side length"));
    let theta: f64 = args.next().map_or(120.0, |s| s.parse().expect("angle in degrees"));

    let spec = LatticeSpec::deformed(side, theta)?;
    println!("{side}x{side} lattice at {theta} degrees");
    for (i, p) in spec.site_positions().iter().enumerate() {
        let (ix, iy) = spec.coords(i);
        println!("  site {i:>3} (ix={ix}, iy={iy})  x={:>8.4}  y={:>8.4}", p.x, p.y);
    }

    let bonds = nearest_neighbour_bonds(&spec);
    let worst = bonds
        .iter()
        .map(|&(i, j)| (spec.distance(i, j).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    println!("{} unit bonds, max |r - 1| = {worst:.1e}", bonds.len());

    let model = CouplingModel::new(spec, 1.5, Range::Full)?;
    let g = model.materialize_weights(1.0)?;
    println!("couplings from site 0 at alpha = 1.5, t = 1:");
    for j in 1..model.n_sites().min(8) {
        println!("  g(0,{j}) = {:.6}", g[(0, j)]);
    }
    Ok(())
}
