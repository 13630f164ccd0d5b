use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::output::Table;
use super::parse::fmt_f64;
use super::*;
use crate::analytic::{ggm_general, ggm_values};
use crate::error::{domain, Result};
use crate::exact::{build_wgs, ggm_brute, reduced_density_matrix, verify_theorem1, MAX_BRUTE_QUBITS};
use crate::lattice::{CouplingModel, LatticeKind};
use crate::metrics::{
    alpha_sr_knee, avg_ggm_chain, avg_ggm_general, dggm_dalpha_2pi, find_alpha_star, gbar_2pi, honeycomb_limit,
    n_sat, theta_scan, z_c, AlphaSearch, ModelFamily, SaturationOptions, TransitionReport,
};
use crate::rdm::{rdm_subset, spectrum_invariance_check};

pub(crate) struct Outcome {
    pub table: Table,
    pub summary: String,
}

pub(crate) fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::GgmCurve(a) => ggm_curve(a),
        Command::Detect(a) => detect(a),
        Command::ThetaScan(a) => theta(a),
        Command::Avg(a) => avg(a),
        Command::Nsat(a) => nsat(a),
        Command::Zc(a) => zc(a),
        Command::Oracle(a) => oracle(a),
        Command::RdmCheck(a) => rdm_check(a),
        Command::Measure(a) => measure(a),
    }
}

fn ggm_curve(a: &GgmCurveArgs) -> Result<Outcome> {
    let spec = a.lattice.spec()?;
    let range = a.lattice.z.range();
    let mut table = Table::new(
        std::iter::once("t".to_string()).chain(a.alpha.0.iter().map(|al| format!("ggm_alpha{al}"))),
    );
    let columns = a
        .alpha
        .0
        .iter()
        .map(|&al| ggm_values(&CouplingModel::new(spec.clone(), al, range)?, &a.t.0))
        .collect::<Result<Vec<_>>>()?;
    for (q, &t) in a.t.0.iter().enumerate() {
        let mut row = vec![fmt_f64(t)];
        row.extend(columns.iter().map(|c| fmt_f64(c[q].value)));
        table.push(row);
    }
    let summary = format!(
        "ggm-curve: {} times x {} alphas on N = {}",
        a.t.0.len(),
        a.alpha.0.len(),
        spec.n_sites()
    );
    Ok(Outcome { table, summary })
}

fn describe(r: &TransitionReport) -> String {
    format!(
        "alpha*={} ({:?}, jump={}, resolution={}, kink={})",
        fmt_f64(r.alpha_star),
        r.kind,
        fmt_f64(r.jump),
        fmt_f64(r.grid_resolution),
        r.kink_flagged
    )
}

fn detect(a: &DetectArgs) -> Result<Outcome> {
    let family = ModelFamily::from_spec(a.lattice.spec()?, a.lattice.z.range())?;
    let mut grid = a.alpha.0.clone();
    let mut report = find_alpha_star(&family, &grid)?;
    if let Some(fine) = a.refine {
        if grid.len() < 2 || !(fine > 0.0) {
            return domain("--refine needs a positive step and an alpha range");
        }
        let step = grid[1] - grid[0];
        grid = AlphaSearch::grid((report.cell.0 - step).max(0.0), report.cell.1 + step, fine)?;
        report = find_alpha_star(&family, &grid)?;
    }
    let rows = grid
        .par_iter()
        .map(|&al| Ok((gbar_2pi(&family, al)?, dggm_dalpha_2pi(&family, al)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["alpha", "gbar_2pi", "gbar_left", "gbar_right", "kink", "dggm_dalpha_2pi"]);
    for (p, d) in rows {
        table.push(vec![
            fmt_f64(p.alpha),
            fmt_f64(p.value),
            fmt_f64(p.left),
            fmt_f64(p.right),
            p.kink.to_string(),
            fmt_f64(d),
        ]);
    }
    Ok(Outcome { table, summary: describe(&report) })
}

fn coarse_search(alpha: &str, fine_step: f64) -> Result<AlphaSearch> {
    let parts: Vec<&str> = alpha.split(':').collect();
    let bad = || crate::Error::Domain(format!("--alpha must be start:stop:step, got {alpha:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let p = |s: &str| parse::parse_real(s).map_err(|_| bad());
    Ok(AlphaSearch { start: p(parts[0])?, stop: p(parts[1])?, coarse_step: p(parts[2])?, fine_step })
}

fn theta(a: &ThetaScanArgs) -> Result<Outcome> {
    let search = coarse_search(&a.alpha, a.fine_step)?;
    let scan = theta_scan(a.l, &a.theta.0, search)?;
    let mut table = Table::new(["theta_deg", "alpha_star", "kind", "jump", "cell_lo", "cell_hi"]);
    for (th, r) in a.theta.0.iter().zip(&scan.reports) {
        table.push(vec![
            fmt_f64(*th),
            fmt_f64(r.alpha_star),
            format!("{:?}", r.kind),
            fmt_f64(r.jump),
            fmt_f64(r.cell.0),
            fmt_f64(r.cell.1),
        ]);
    }
    let mut summary = format!("theta-scan: {} angles on {}x{}", a.theta.0.len(), a.l, a.l);
    if a.limit {
        let lim = honeycomb_limit(a.l, &a.offsets.0, search)?;
        summary.push_str(&format!(
            "; alpha*(theta->120)={} (below {}, above {})",
            fmt_f64(lim.estimate),
            fmt_f64(lim.from_below),
            fmt_f64(lim.from_above)
        ));
    }
    Ok(Outcome { table, summary })
}

fn avg(a: &AvgArgs) -> Result<Outcome> {
    let spec = a.lattice.spec()?;
    let range = a.lattice.z.range();
    let values = a
        .alpha
        .0
        .par_iter()
        .map(|&al| {
            let m = CouplingModel::new(spec.clone(), al, range)?;
            if m.lattice().kind() == LatticeKind::Chain && !a.site_max {
                avg_ggm_chain(m.z(), al, a.t_end.0, a.points)
            } else {
                avg_ggm_general(&m, a.t_end.0, a.points)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["alpha", "avg_ggm"]);
    for (al, v) in a.alpha.0.iter().zip(&values) {
        table.push(vec![fmt_f64(*al), fmt_f64(*v)]);
    }
    let mut summary = a
        .alpha
        .0
        .iter()
        .zip(&values)
        .map(|(al, v)| format!("<G>_T={} (alpha={al})", fmt_f64(*v)))
        .collect::<Vec<_>>()
        .join(", ");
    if a.knee {
        if spec.kind() != LatticeKind::Chain {
            return domain("--knee is available for chains only");
        }
        let z = CouplingModel::new(spec.clone(), 0.0, range)?.z();
        let (knee, _) = alpha_sr_knee(z, &a.alpha.0, a.t_end.0)?;
        summary.push_str(&match knee {
            Some(k) => format!("; heuristic alpha*_SR={}", fmt_f64(k)),
            None => "; heuristic alpha*_SR not reached on this grid".into(),
        });
    }
    Ok(Outcome { table, summary })
}

fn nsat(a: &NsatArgs) -> Result<Outcome> {
    let opts = SaturationOptions { t_end: a.t_end.0, points: a.points, persistence: a.persistence, n_cap: a.n_cap };
    let cases: Vec<(f64, f64)> = a.alpha.0.iter().flat_map(|&al| a.eps.0.iter().map(move |&e| (al, e))).collect();
    let reports = cases.par_iter().map(|&(al, e)| n_sat(al, e, opts)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["alpha", "eps", "n_sat", "avg_ggm", "difference"]);
    let mut parts = Vec::new();
    for ((al, e), r) in cases.iter().zip(&reports) {
        table.push(vec![fmt_f64(*al), fmt_f64(*e), r.value.to_string(), fmt_f64(r.achieved_avg_ggm), fmt_f64(r.difference)]);
        parts.push(if cases.len() == 1 {
            format!("N_sat={}", r.value)
        } else {
            format!("N_sat={} (alpha={al}, eps={e})", r.value)
        });
    }
    Ok(Outcome { table, summary: parts.join(", ") })
}

fn zc(a: &ZcArgs) -> Result<Outcome> {
    let reports = a.eps.0.iter().map(|&e| z_c(a.n, a.alpha.0, e, a.t_end.0)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["eps", "z_c", "avg_ggm", "difference"]);
    let mut parts = Vec::new();
    for (e, r) in a.eps.0.iter().zip(&reports) {
        table.push(vec![fmt_f64(*e), r.value.to_string(), fmt_f64(r.achieved_avg_ggm), fmt_f64(r.difference)]);
        parts.push(format!("z_c={} (eps={e})", r.value));
    }
    Ok(Outcome { table, summary: parts.join(", ") })
}

/// A random small model: chain or 2D lattice with `n_min ≤ N ≤ n_max`.
pub(crate) fn random_model(rng: &mut ChaCha8Rng, n_min: usize, n_max: usize, chains_only: bool) -> Result<CouplingModel> {
    let sides: Vec<usize> = (2..=4).filter(|l| l * l >= n_min && l * l <= n_max).collect();
    let alpha = rng.random_range(0.0..=6.0);
    if !chains_only && !sides.is_empty() && rng.random_bool(0.5) {
        let l = sides[rng.random_range(0..sides.len())];
        let theta = rng.random_range(90.0..=150.0);
        return CouplingModel::new(LatticeSpec::deformed(l, theta)?, alpha, Range::Full);
    }
    let n = rng.random_range(n_min..=n_max);
    let z = if rng.random_bool(0.5) { n - 1 } else { rng.random_range(1..n) };
    CouplingModel::chain(n, alpha, Range::Cutoff(z))
}

fn model_label(m: &CouplingModel) -> (String, String) {
    match m.lattice().theta_deg() {
        Some(th) => ("2d".into(), fmt_f64(th)),
        None => ("chain".into(), String::new()),
    }
}

fn oracle(a: &OracleArgs) -> Result<Outcome> {
    if a.n_min < 2 || a.n_min > a.n_max || a.n_max > MAX_BRUTE_QUBITS {
        return domain(format!("need 2 <= n-min <= n-max <= {MAX_BRUTE_QUBITS}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.exec.seed);
    let samples = (0..a.trials)
        .map(|_| Ok((random_model(&mut rng, a.n_min, a.n_max, a.chains_only)?, rng.random_range(0.0..=3.0 * PI))))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(["trial", "kind", "n", "theta_deg", "alpha", "z", "t", "ggm_brute", "ggm_general", "abs_diff", "brute_subset"]);
    let (mut matches, mut single, mut worst) = (0, 0, 0.0f64);
    for (i, (m, t)) in samples.iter().enumerate() {
        let brute = ggm_brute(&build_wgs(m, *t)?)?;
        let closed = ggm_general(m, *t).value;
        let d = (brute.value - closed).abs();
        worst = worst.max(d);
        matches += usize::from(d <= a.tol);
        single += usize::from(brute.best.subset.len() == 1);
        let (kind, theta) = model_label(m);
        let subset = brute.best.subset.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";");
        table.push(vec![
            i.to_string(),
            kind,
            m.n_sites().to_string(),
            theta,
            fmt_f64(m.alpha()),
            m.z().to_string(),
            fmt_f64(*t),
            fmt_f64(brute.value),
            fmt_f64(closed),
            fmt_f64(d),
            subset,
        ]);
    }
    let bound = if worst < a.tol { format!("< {:e}", a.tol) } else { format!("= {worst:e}") };
    let summary = format!(
        "{matches}/{} matches, max |Δ| {bound}; single-site argmax in {single}/{}",
        a.trials, a.trials
    );
    Ok(Outcome { table, summary })
}

fn rdm_check(a: &RdmCheckArgs) -> Result<Outcome> {
    if a.n_max < 2 || a.n_max > 14 || a.max_subset == 0 {
        return domain("need 2 <= n-max <= 14 and max-subset >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.exec.seed);
    let mut table = Table::new(["trial", "kind", "n", "theta_deg", "alpha", "t", "subset", "max_entry_error", "spectrum_invariant"]);
    let (mut entry_ok, mut spec_ok) = (0, 0);
    for i in 0..a.trials {
        let m = random_model(&mut rng, 2, a.n_max, false)?;
        let t = rng.random_range(0.0..=3.0 * PI);
        let n = m.n_sites();
        let k = rng.random_range(1..=a.max_subset.min(n - 1).min(10));
        let subset = sample(&mut rng, n, k).into_vec();
        let fast = rdm_subset(&m, t, &subset)?;
        let dense = reduced_density_matrix(&build_wgs(&m, t)?, &subset)?;
        let err = (&fast.entries - &dense).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let inv = spectrum_invariance_check(&m, t, &subset)?;
        entry_ok += usize::from(err <= 1e-12);
        spec_ok += usize::from(inv);
        let (kind, theta) = model_label(&m);
        let label = subset.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";");
        table.push(vec![i.to_string(), kind, n.to_string(), theta, fmt_f64(m.alpha()), fmt_f64(t), label, fmt_f64(err), inv.to_string()]);
    }
    let summary = format!(
        "{entry_ok}/{} entrywise within 1e-12, {spec_ok}/{} spectra invariant",
        a.trials, a.trials
    );
    Ok(Outcome { table, summary })
}

fn measure(a: &MeasureArgs) -> Result<Outcome> {
    let m = CouplingModel::new(a.lattice.spec()?, a.alpha.0, a.lattice.z.range())?;
    let sites = &a.sites.0;
    let strings: Vec<Vec<u8>> = match &a.outcomes {
        Some(o) => {
            if o.0.iter().any(|&v| v > 1) {
                return domain("outcomes must be 0 or 1");
            }
            vec![o.0.iter().map(|&v| v as u8).collect()]
        }
        None => (0..1usize << sites.len())
            .map(|bits| (0..sites.len()).map(|r| ((bits >> (sites.len() - 1 - r)) & 1) as u8).collect())
            .collect(),
    };
    let mut table = Table::new(["outcomes", "probability", "fidelity", "fidelity_without_lu"]);
    let mut good = 0;
    for (row, outcomes) in strings.iter().enumerate() {
        let check = verify_theorem1(&m, a.t.0, sites, outcomes)?;
        good += usize::from(check.fidelity >= 1.0 - 1e-10);
        if row == 0 {
            if let Some(path) = &a.dump {
                let state = build_wgs(&m, a.t.0)?;
                let (_, post) = crate::exact::measure_sequence(&state, sites, outcomes)?;
                post.write_wgsv(std::fs::File::create(path)?)?;
            }
        }
        table.push(vec![
            outcomes.iter().map(|o| o.to_string()).collect(),
            fmt_f64(check.record.probability),
            fmt_f64(check.fidelity),
            fmt_f64(check.fidelity_without_lu),
        ]);
    }
    let summary = format!("{good}/{} outcome strings reach fidelity >= 1 - 1e-10 after correction", strings.len());
    Ok(Outcome { table, summary })
}
