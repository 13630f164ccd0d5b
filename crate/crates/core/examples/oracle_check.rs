//! Closed-form GGM against brute force over every bipartition of the full
//! state vector.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wgslab::analytic::ggm_general;
use wgslab::exact::{build_wgs, ggm_brute};
use wgslab::lattice::{CouplingModel, Range};

fn main() -> wgslab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut agree, mut total) = (0, 0);
    for _ in 0..60 {
        let n = rng.random_range(2..=10);
        let model = CouplingModel::chain(n, rng.random_range(0.0..4.0), Range::Full)?;
        let t = rng.random_range(0.0..3.0 * PI);
        let brute = ggm_brute(&build_wgs(&model, t)?)?;
        let closed = ggm_general(&model, t).value;
        total += 1;
        if (brute.value - closed).abs() <= 1e-10 {
            agree += 1;
        } else {
            println!(
                "N={n} alpha={:.3} t={t:.3}: brute {:.6} via {:?}, closed form {closed:.6}",
                model.alpha(),
                brute.value,
                brute.best.subset
            );
        }
    }
    println!("{agree}/{total} agree to 1e-10");
    Ok(())
}
