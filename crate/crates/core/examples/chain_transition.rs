//! Locating the non-local to quasi-local transition of a chain from the
//! time derivative of GGM at t = 2pi.

use wgslab::lattice::Range;
use wgslab::metrics::{find_alpha_star, gbar_series, AlphaSearch, ModelFamily};

fn main() -> wgslab::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("chain length"));
    let family = ModelFamily::chain(n, Range::Full)?;

    let coarse = AlphaSearch::grid(0.5, 1.5, 0.05)?;
    let series = gbar_series(&family, &coarse)?;
    for (a, g) in series.grid.iter().zip(&series.values) {
        println!("alpha {a:.2}  dG/dt(2pi) = {g:+.6}");
    }

    let r = find_alpha_star(&family, &AlphaSearch::grid(0.9, 1.1, 0.001)?)?;
    println!(
        "N = {n}: alpha* = {:.4} +- {:.4} ({:?}), jump {:.5}, kink {}",
        r.alpha_star, r.grid_resolution, r.kind, r.jump, r.kink_flagged
    );
    Ok(())
}
