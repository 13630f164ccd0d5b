//! How the transition rate moves as the square lattice is bent toward a
//! honeycomb.
//!
//! The default 20x20 lattice runs in well under a minute; pass `40` for the
//! full-size scan.

use wgslab::metrics::{honeycomb_limit, theta_scan, AlphaSearch};

fn main() -> wgslab::Result<()> {
    let side: usize = std::env::args().nth(1).map_or(20, |s| s.parse().expect("side length"));
    let search = AlphaSearch { start: 1.0, stop: 2.6, coarse_step: 0.01, fine_step: 0.001 };

    let thetas = [90.0, 100.0, 110.0, 115.0, 125.0, 130.0, 135.0];
    let scan = theta_scan(side, &thetas, search)?;
    for (th, r) in thetas.iter().zip(&scan.reports) {
        let predicted = 2f64.ln() / (2.0 * (th.to_radians() / 2.0).sin()).min(2.0 * th.to_radians().sin()).ln();
        println!("theta {th:>5}: alpha* = {:.4} ({:?})  geometric guess {predicted:.4}", r.alpha_star, r.kind);
    }

    let limit = honeycomb_limit(side, &[0.5, 1.0, 1.5], search)?;
    println!(
        "toward 120 degrees: {:.4} from below, {:.4} from above, estimate {:.4}",
        limit.from_below, limit.from_above, limit.estimate
    );
    Ok(())
}
