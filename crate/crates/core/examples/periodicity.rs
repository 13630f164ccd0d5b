//! For integer fall-off the GGM of a finite-range chain is periodic in time.

use std::f64::consts::PI;

use wgslab::analytic::{ggm_general, period_of_chain};
use wgslab::lattice::{CouplingModel, Range};

fn main() -> wgslab::Result<()> {
    for (alpha, z) in [(0.0, 5), (1.0, 1), (1.0, 2), (1.0, 3), (2.0, 3), (3.0, 3)] {
        let n = 8;
        let p = period_of_chain(n, alpha, z)?;
        let m = CouplingModel::chain(n, alpha, Range::Cutoff(z))?;
        let drift = (0..1000)
            .map(|i| p * i as f64 / 1000.0)
            .map(|t| (ggm_general(&m, t + p).value - ggm_general(&m, t).value).abs())
            .fold(0.0, f64::max);
        println!("alpha {alpha} z {z}: period {:.0} pi, max drift {drift:.1e}", p / PI);
    }
    match period_of_chain(8, 1.5, 3) {
        Ok(p) => println!("alpha 1.5: {p}"),
        Err(e) => println!("alpha 1.5: {e}"),
    }
    Ok(())
}
