//! When does adding qubits, or extending the interaction range, stop
//! changing the time-averaged GGM?

use wgslab::metrics::{alpha_sr_knee, n_sat, z_c, AlphaSearch, SaturationOptions, DEFAULT_T};

fn main() -> wgslab::Result<()> {
    for eps in [1e-2, 1e-3, 1e-4] {
        let row: Vec<String> = [1.0, 1.5, 2.0, 3.0, 5.0]
            .iter()
            .map(|&a| n_sat(a, eps, SaturationOptions::default()).map(|r| format!("{:>5}", r.value)))
            .collect::<Result<_, _>>()?;
        println!("eps {eps:e}: N_sat over alpha 1, 1.5, 2, 3, 5 = {}", row.join(" "));
    }

    let stricter = SaturationOptions { persistence: 5, ..Default::default() };
    println!("alpha 1.5 with 5 consecutive hits: N_sat = {}", n_sat(1.5, 1e-4, stricter)?.value);

    for eps in [1e-3, 1e-4, 1e-5] {
        let r = z_c(120, 1.82, eps, DEFAULT_T)?;
        println!("N=120 alpha=1.82 eps {eps:e}: z_c = {} (<G> = {:.6})", r.value, r.achieved_avg_ggm);
    }

    let (knee, _) = alpha_sr_knee(200, &AlphaSearch::grid(1.0, 8.0, 0.25)?, DEFAULT_T)?;
    println!("local-regime knee for z = 200: {knee:?}");
    Ok(())
}
