//! Transition detectors and saturation scans built on the closed-form GGM.
//!
//! - `Ḡ_2π(α)`: time derivative of `G` at `t = 2π` (central difference,
//!   with one-sided differences to flag kinks).
//! - `dG_2π/dα`: derivative in the fall-off rate at fixed `t = 2π`.
//! - `⟨G⟩_T`: time average by composite Simpson quadrature.
//! - `α*`: the fall-off rate where `Ḡ_2π` jumps or changes sign.
//! - `N_sat`, `z_c`: where `⟨G⟩_T` stops changing with system size or range.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{check_grid, ggm_general, ln_abs_cos, ChainProductTable, PairLogTable};
use crate::error::{domain, Error, Result};
use crate::lattice::{power_law, CouplingModel, LatticeKind, LatticeSpec, Range};

pub const DEFAULT_T: f64 = 3.0 * PI;
pub const AVG_POINTS: usize = 6001;
pub const FD_STEP: f64 = 1e-5;
pub const KINK_THRESHOLD: f64 = 1e-2;
pub const JUMP_FACTOR: f64 = 10.0;
pub const DEFAULT_DELTA: f64 = 0.001;
pub const DEFAULT_N_CAP: usize = 1_000_000;
pub const KNEE_SLOPE: f64 = 1e-3;
/// `|Ḡ_2π|` below this is rounding noise and treated as zero by the locator.
pub const GBAR_FLOOR: f64 = 1e-9;
const TWO_PI: f64 = 2.0 * PI;

/// A sampled curve with free-form metadata.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSeries {
    pub grid_name: String,
    pub value_name: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub metadata: BTreeMap<String, String>,
}

impl MetricSeries {
    pub fn new(grid_name: &str, value_name: &str, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return domain(format!("grid has {} points but {} values", grid.len(), values.len()));
        }
        check_grid(&grid, grid_name)?;
        Ok(Self {
            grid_name: grid_name.to_string(),
            value_name: value_name.to_string(),
            grid,
            values,
            metadata: BTreeMap::new(),
        })
    }

    pub fn set_meta(&mut self, key: &str, value: String) {
        self.metadata.insert(key.to_string(), value);
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Composite Simpson rule on uniformly spaced samples (odd count).
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return domain(format!("Simpson's rule needs an odd number (>= 3) of samples, got {n}"));
    }
    let odd: f64 = values[1..n - 1].iter().step_by(2).sum();
    let even: f64 = values[2..n - 1].iter().step_by(2).sum();
    Ok(h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even))
}

pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let h = (stop - start) / (points - 1) as f64;
    (0..points).map(|q| start + q as f64 * h).collect()
}

fn check_horizon(t_end: f64, points: usize) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return domain(format!("averaging time must be positive, got {t_end}"));
    }
    if points < 3 || points.is_multiple_of(2) {
        return domain(format!("quadrature needs an odd number (>= 3) of points, got {points}"));
    }
    Ok(())
}

fn average_of(values: &[f64], t_end: f64) -> Result<f64> {
    Ok(simpson(values, t_end / (values.len() - 1) as f64)? / t_end)
}

/// Models whose GGM is evaluated across many fall-off rates.
#[derive(Clone, Debug)]
pub enum ModelFamily {
    Chain { n_sites: usize, range: Range },
    Lattice2D { spec: LatticeSpec, table: PairLogTable },
}

impl ModelFamily {
    pub fn chain(n_sites: usize, range: Range) -> Result<Self> {
        CouplingModel::chain(n_sites, 0.0, range)?;
        Ok(Self::Chain { n_sites, range })
    }

    pub fn lattice_2d(spec: LatticeSpec) -> Result<Self> {
        if spec.kind() != LatticeKind::Deformed2D {
            return domain("lattice_2d needs a 2D lattice spec");
        }
        let table = PairLogTable::new(&spec);
        Ok(Self::Lattice2D { spec, table })
    }

    pub fn from_spec(spec: LatticeSpec, range: Range) -> Result<Self> {
        match spec.kind() {
            LatticeKind::Chain => Self::chain(spec.n_sites(), range),
            LatticeKind::Deformed2D => Self::lattice_2d(spec),
        }
    }

    pub fn model(&self, alpha: f64) -> Result<CouplingModel> {
        match self {
            Self::Chain { n_sites, range } => CouplingModel::chain(*n_sites, alpha, *range),
            Self::Lattice2D { spec, .. } => CouplingModel::new(spec.clone(), alpha, Range::Full),
        }
    }

    /// Site-maximised `G(α, t)` for every `t` in `ts`.
    pub fn ggm_many(&self, alpha: f64, ts: &[f64]) -> Result<Vec<f64>> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return domain(format!("alpha must be a finite non-negative number, got {alpha}"));
        }
        Ok(match self {
            Self::Chain { .. } => {
                let m = self.model(alpha)?;
                ts.iter().map(|&t| ggm_general(&m, t).value).collect()
            }
            Self::Lattice2D { table, .. } => table.ggm_at(alpha, ts).into_iter().map(|g| g.value).collect(),
        })
    }
}

/// `Ḡ_2π` at one fall-off rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GbarPoint {
    pub alpha: f64,
    /// Central difference.
    pub value: f64,
    pub left: f64,
    pub right: f64,
    pub kink: bool,
}

pub fn gbar_2pi(family: &ModelFamily, alpha: f64) -> Result<GbarPoint> {
    let h = FD_STEP;
    let g = family.ggm_many(alpha, &[TWO_PI - h, TWO_PI, TWO_PI + h])?;
    let (left, right) = ((g[1] - g[0]) / h, (g[2] - g[1]) / h);
    Ok(GbarPoint {
        alpha,
        value: (g[2] - g[0]) / (2.0 * h),
        left,
        right,
        kink: (left - right).abs() > KINK_THRESHOLD,
    })
}

/// Central `Ḡ_2π` only; two evaluations per rate.
fn gbar_central(family: &ModelFamily, alpha: f64) -> Result<f64> {
    let h = FD_STEP;
    let g = family.ggm_many(alpha, &[TWO_PI - h, TWO_PI + h])?;
    Ok((g[1] - g[0]) / (2.0 * h))
}

pub fn gbar_series(family: &ModelFamily, alpha_grid: &[f64]) -> Result<MetricSeries> {
    check_grid(alpha_grid, "alpha")?;
    let values = alpha_grid.par_iter().map(|&a| gbar_central(family, a)).collect::<Result<Vec<_>>>()?;
    MetricSeries::new("alpha", "gbar_2pi", alpha_grid.to_vec(), values)
}

pub fn dggm_dalpha_2pi(family: &ModelFamily, alpha: f64) -> Result<f64> {
    let h = FD_STEP;
    if alpha < h {
        let g = family.ggm_many(alpha, &[TWO_PI])?[0];
        let gp = family.ggm_many(alpha + h, &[TWO_PI])?[0];
        return Ok((gp - g) / h);
    }
    let gm = family.ggm_many(alpha - h, &[TWO_PI])?[0];
    let gp = family.ggm_many(alpha + h, &[TWO_PI])?[0];
    Ok((gp - gm) / (2.0 * h))
}

/// `Ḡ_2π(α + δ) − Ḡ_2π(α − δ)`.
pub fn delta_gbar(family: &ModelFamily, alpha: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= alpha) {
        return domain(format!("delta must lie in (0, alpha], got {delta}"));
    }
    Ok(gbar_central(family, alpha + delta)? - gbar_central(family, alpha - delta)?)
}

/// Time average of the site-maximised GGM.
pub fn avg_ggm_general(model: &CouplingModel, t_end: f64, points: usize) -> Result<f64> {
    check_horizon(t_end, points)?;
    let ts = uniform_grid(0.0, t_end, points);
    let g: Vec<f64> = ts.par_iter().map(|&t| ggm_general(model, t).value).collect();
    average_of(&g, t_end)
}

/// Time average of the chain-end closed form for a chain with range `z`.
pub fn avg_ggm_chain(z: usize, alpha: f64, t_end: f64, points: usize) -> Result<f64> {
    check_horizon(t_end, points)?;
    let table = ChainProductTable::new(alpha, z, t_end)?;
    let ts = uniform_grid(0.0, t_end, points);
    let g: Vec<f64> = ts.par_iter().map(|&t| table.ggm(t).value).collect();
    average_of(&g, t_end)
}

/// `⟨G⟩_T` on the default 6001-point grid. Chains use the chain-end closed
/// form; 2D lattices the site maximum.
pub fn avg_ggm(model: &CouplingModel, t_end: f64) -> Result<f64> {
    match model.lattice().kind() {
        LatticeKind::Chain => avg_ggm_chain(model.z(), model.alpha(), t_end, AVG_POINTS),
        LatticeKind::Deformed2D => avg_ggm_general(model, t_end, AVG_POINTS),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransitionKind {
    /// Adjacent-cell jump above the detection threshold.
    Jump,
    /// Negative-to-positive sign change of a continuous `Ḡ_2π`.
    SignChange,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionReport {
    pub alpha_star: f64,
    /// `|ΔḠ_2π|` across the reported cell.
    pub jump: f64,
    pub grid_resolution: f64,
    pub kind: TransitionKind,
    pub cell: (f64, f64),
    /// One-sided `dG/dt` at `t = 2π` at the cell endpoint nearest the kink.
    pub side_derivatives: (f64, f64),
    pub kink_flagged: bool,
    /// `dG_2π/dα` just below and above the cell.
    pub dalpha_sides: (f64, f64),
    pub median_cell_difference: f64,
}

fn crosses_up(a: f64, b: f64) -> bool {
    (a < 0.0 && b >= 0.0) || (a <= 0.0 && b > 0.0)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Locates the transition cell on a sampled `Ḡ_2π` curve.
///
/// A cell is a jump when its difference beats [`JUMP_FACTOR`] times the
/// median difference and `Ḡ_2π` crosses zero upwards across it; the largest
/// such cell wins. Without one, the upward zero crossing at the largest `α`
/// is used. Values within [`GBAR_FLOOR`] of zero count as zero. Returns
/// `(cell index, kind, median)`.
pub fn locate_transition(values: &[f64]) -> Result<(usize, TransitionKind, f64)> {
    if values.len() < 2 {
        return domain("a transition scan needs at least two grid points");
    }
    let values: Vec<f64> = values.iter().map(|&v| if v.abs() < GBAR_FLOOR { 0.0 } else { v }).collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let med = median(diffs.clone());
    let jump = (0..diffs.len())
        .filter(|&i| diffs[i] > JUMP_FACTOR * med && crosses_up(values[i], values[i + 1]))
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if diffs[b] >= diffs[i] => Some(b),
            _ => Some(i),
        });
    if let Some(i) = jump {
        return Ok((i, TransitionKind::Jump, med));
    }
    match (0..values.len() - 1).rev().find(|&i| crosses_up(values[i], values[i + 1])) {
        Some(i) => Ok((i, TransitionKind::SignChange, med)),
        None => Err(Error::NoTransition("no jump above threshold and no sign change of Gbar_2pi".into())),
    }
}

pub fn find_alpha_star(family: &ModelFamily, alpha_grid: &[f64]) -> Result<TransitionReport> {
    let series = gbar_series(family, alpha_grid)?;
    report_from_series(family, &series)
}

fn report_from_series(family: &ModelFamily, series: &MetricSeries) -> Result<TransitionReport> {
    let (i, kind, med) = locate_transition(&series.values)?;
    let (a, b) = (series.grid[i], series.grid[i + 1]);
    let (pa, pb) = (gbar_2pi(family, a)?, gbar_2pi(family, b)?);
    let at = if pb.kink || !pa.kink { pb } else { pa };
    let step = b - a;
    let dalpha_sides = (
        dggm_dalpha_2pi(family, (a - step).max(0.0))?,
        dggm_dalpha_2pi(family, b + step)?,
    );
    Ok(TransitionReport {
        alpha_star: 0.5 * (a + b),
        jump: (series.values[i + 1] - series.values[i]).abs(),
        grid_resolution: step,
        kind,
        cell: (a, b),
        side_derivatives: (at.left, at.right),
        kink_flagged: pa.kink || pb.kink,
        dalpha_sides,
        median_cell_difference: med,
    })
}

/// Coarse-to-fine search for `α*` over `[start, stop]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaSearch {
    pub start: f64,
    pub stop: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
}

impl AlphaSearch {
    pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
        if !(step > 0.0 && stop > start) {
            return domain(format!("invalid range {start}:{stop}:{step}"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // Round to the step's decimal grid so that e.g. 1.0 is hit exactly.
        Ok((0..=n).map(|k| round_to_step(start + k as f64 * step, step)).collect())
    }
}

fn round_to_step(x: f64, step: f64) -> f64 {
    let digits = (-step.log10()).ceil().clamp(0.0, 12.0) as i32 + 1;
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

pub fn find_alpha_star_refined(family: &ModelFamily, search: AlphaSearch) -> Result<TransitionReport> {
    let coarse = AlphaSearch::grid(search.start, search.stop, search.coarse_step)?;
    let first = find_alpha_star(family, &coarse)?;
    let lo = (first.cell.0 - search.coarse_step).max(search.start.max(0.0));
    let hi = first.cell.1 + search.coarse_step;
    let fine = AlphaSearch::grid(lo, hi, search.fine_step)?;
    find_alpha_star(family, &fine)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaScan {
    pub series: MetricSeries,
    pub reports: Vec<TransitionReport>,
}

/// `α*` for each bond angle on an `L × L` lattice.
pub fn theta_scan(side: usize, thetas: &[f64], search: AlphaSearch) -> Result<ThetaScan> {
    check_grid(thetas, "theta")?;
    let mut reports = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let family = ModelFamily::lattice_2d(LatticeSpec::deformed(side, theta)?)?;
        reports.push(find_alpha_star_refined(&family, search)?);
    }
    let mut series =
        MetricSeries::new("theta_deg", "alpha_star", thetas.to_vec(), reports.iter().map(|r| r.alpha_star).collect())?;
    series.set_meta("side", side.to_string());
    Ok(ThetaScan { series, reports })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HoneycombLimit {
    pub from_below: f64,
    pub from_above: f64,
    pub estimate: f64,
    pub points: Vec<(f64, f64)>,
}

fn linear_fit_at(points: &[(f64, f64)], x0: f64) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    my + slope * (x0 - mx)
}

/// Two-sided limit of `α*(Θ)` at `Θ = 120°` from `120° ± offsets`, each side
/// extrapolated linearly.
pub fn honeycomb_limit(side: usize, offsets: &[f64], search: AlphaSearch) -> Result<HoneycombLimit> {
    if offsets.is_empty() || offsets.iter().any(|&o| !(o > 0.0)) {
        return domain("offsets must be positive");
    }
    let mut below = Vec::new();
    let mut above = Vec::new();
    for &o in offsets {
        for (theta, side_points) in [(120.0 - o, &mut below), (120.0 + o, &mut above)] {
            let family = ModelFamily::lattice_2d(LatticeSpec::deformed(side, theta)?)?;
            side_points.push((theta, find_alpha_star_refined(&family, search)?.alpha_star));
        }
    }
    let (from_below, from_above) = (linear_fit_at(&below, 120.0), linear_fit_at(&above, 120.0));
    let mut points = below;
    points.extend(above);
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(HoneycombLimit { from_below, from_above, estimate: 0.5 * (from_below + from_above), points })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SaturationKind {
    Nsat,
    Zc,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaturationReport {
    pub kind: SaturationKind,
    pub eps: f64,
    pub value: usize,
    pub achieved_avg_ggm: f64,
    /// `|Δ⟨G⟩|` that satisfied the criterion.
    pub difference: f64,
    pub persistence: usize,
}

/// Chain-end log products `Σ_{r≤z} ln|cos(t/2r^α)|` on a time grid, grown
/// one distance at a time.
struct IncrementalProducts {
    alpha: f64,
    half_t: Vec<f64>,
    log_prod: Vec<f64>,
    z: usize,
    t_end: f64,
}

impl IncrementalProducts {
    fn new(alpha: f64, t_end: f64, points: usize) -> Self {
        let half_t = uniform_grid(0.0, t_end, points).into_iter().map(|t| 0.5 * t).collect();
        Self { alpha, half_t, log_prod: vec![0.0; points], z: 0, t_end }
    }

    fn grow(&mut self) {
        self.z += 1;
        let phi = power_law(self.z as f64, self.alpha);
        for (lp, &h) in self.log_prod.iter_mut().zip(&self.half_t) {
            *lp += ln_abs_cos(h * phi);
        }
    }

    fn average(&self) -> f64 {
        let g: Vec<f64> = self.log_prod.iter().map(|lp| 0.5 - 0.5 * lp.exp()).collect();
        average_of(&g, self.t_end).expect("grid validated at construction")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaturationOptions {
    pub t_end: f64,
    pub points: usize,
    /// Consecutive satisfied differences required.
    pub persistence: usize,
    pub n_cap: usize,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        Self { t_end: DEFAULT_T, points: AVG_POINTS, persistence: 1, n_cap: DEFAULT_N_CAP }
    }
}

/// Smallest all-to-all chain length `N` with
/// `|⟨G(N + 1)⟩_T − ⟨G(N)⟩_T| < ε` (for `persistence` consecutive `N`).
pub fn n_sat(alpha: f64, eps: f64, opts: SaturationOptions) -> Result<SaturationReport> {
    check_horizon(opts.t_end, opts.points)?;
    if !(eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return domain(format!("alpha must be a finite non-negative number, got {alpha}"));
    }
    let persistence = opts.persistence.max(1);
    let mut inc = IncrementalProducts::new(alpha, opts.t_end, opts.points);
    inc.grow();
    // averages[i] belongs to N = start + i.
    let mut start = 2;
    let mut averages = vec![inc.average()];
    let mut run = 0;
    for n in 2..opts.n_cap {
        inc.grow();
        averages.push(inc.average());
        let d = (averages[averages.len() - 1] - averages[averages.len() - 2]).abs();
        run = if d < eps { run + 1 } else { 0 };
        if run == persistence {
            let value = n + 1 - persistence;
            return Ok(SaturationReport {
                kind: SaturationKind::Nsat,
                eps,
                value,
                achieved_avg_ggm: averages[value - start],
                difference: (averages[value + 1 - start] - averages[value - start]).abs(),
                persistence,
            });
        }
        if averages.len() > persistence + 2 {
            averages.remove(0);
            start += 1;
        }
    }
    Err(Error::NotSaturated(format!("no N below {} satisfies eps = {eps} at alpha = {alpha}", opts.n_cap)))
}

/// `⟨G⟩_T` of a chain of `N` sites for every range `z = 1..N−1`.
pub fn avg_by_range(n_sites: usize, alpha: f64, t_end: f64, points: usize) -> Result<Vec<f64>> {
    check_horizon(t_end, points)?;
    CouplingModel::chain(n_sites, alpha, Range::Full)?;
    let mut inc = IncrementalProducts::new(alpha, t_end, points);
    Ok((1..n_sites)
        .map(|_| {
            inc.grow();
            inc.average()
        })
        .collect())
}

/// Smallest `z` with `|⟨G(z = N−1)⟩_T − ⟨G(z)⟩_T| < ε`.
pub fn z_c(n_sites: usize, alpha: f64, eps: f64, t_end: f64) -> Result<SaturationReport> {
    if !(eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    let avgs = avg_by_range(n_sites, alpha, t_end, AVG_POINTS)?;
    let full = *avgs.last().unwrap();
    let (i, d) = avgs
        .iter()
        .map(|a| (full - a).abs())
        .enumerate()
        .find(|&(_, d)| d < eps)
        .unwrap_or((avgs.len() - 1, 0.0));
    Ok(SaturationReport {
        kind: SaturationKind::Zc,
        eps,
        value: i + 1,
        achieved_avg_ggm: avgs[i],
        difference: d,
        persistence: 1,
    })
}

/// Heuristic quasi-local to local crossover: the first grid rate where
/// `|d⟨G⟩_T/dα|` (forward difference) drops below 1e−3.
pub fn alpha_sr_knee(z: usize, alpha_grid: &[f64], t_end: f64) -> Result<(Option<f64>, MetricSeries)> {
    check_grid(alpha_grid, "alpha")?;
    let avgs = alpha_grid
        .par_iter()
        .map(|&a| avg_ggm_chain(z, a, t_end, AVG_POINTS))
        .collect::<Result<Vec<_>>>()?;
    let knee = (0..alpha_grid.len().saturating_sub(1)).find_map(|i| {
        let slope = (avgs[i + 1] - avgs[i]) / (alpha_grid[i + 1] - alpha_grid[i]);
        (slope.abs() < KNEE_SLOPE).then_some(alpha_grid[i])
    });
    let mut series = MetricSeries::new("alpha", "avg_ggm", alpha_grid.to_vec(), avgs)?;
    series.set_meta("knee_rule", "first alpha with |d<G>/dalpha| < 1e-3 (heuristic)".into());
    Ok((knee, series))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let xs = uniform_grid(0.0, 2.0, 11);
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        assert!((simpson(&ys, 0.2).unwrap() - 2.0).abs() < 1e-13);
        assert!(simpson(&ys[..10], 0.2).is_err());
    }

    #[test]
    fn nearest_neighbour_average() {
        let v = avg_ggm_chain(1, 2.0, DEFAULT_T, AVG_POINTS).unwrap();
        assert!((v - (0.5 - 1.0 / PI)).abs() < 1e-6);
    }

    #[test]
    fn range_one_detectors_vanish() {
        let fam = ModelFamily::chain(50, Range::Cutoff(1)).unwrap();
        assert!(gbar_2pi(&fam, 3.0).unwrap().value.abs() < 1e-9);
        assert!(dggm_dalpha_2pi(&fam, 1.7).unwrap().abs() < 1e-9);
    }

    #[test]
    fn flat_region_detectors() {
        let fam = ModelFamily::chain(5000, Range::Full).unwrap();
        assert!(gbar_2pi(&fam, 0.5).unwrap().value.abs() < 1e-6);
        assert!(dggm_dalpha_2pi(&fam, 0.3).unwrap().abs() < 1e-6);
        assert!(delta_gbar(&fam, 0.3, DEFAULT_DELTA).unwrap().abs() < 1e-9);
    }

    #[test]
    fn chain_kink_at_alpha_one() {
        let fam = ModelFamily::chain(2000, Range::Full).unwrap();
        let p = gbar_2pi(&fam, 1.0).unwrap();
        assert!(p.kink);
        let below = gbar_2pi(&fam, 0.99).unwrap().value;
        let above = gbar_2pi(&fam, 1.01).unwrap().value;
        assert!(below < 0.0 && above > 0.0);
    }

    #[test]
    fn locator_rules() {
        let (i, k, _) = locate_transition(&[0.0, 0.0, -0.1, -0.2, 3.0, 3.1, 3.2]).unwrap();
        assert_eq!((i, k), (3, TransitionKind::Jump));
        let (i, k, _) = locate_transition(&[-0.3, -0.2, -0.1, 0.05, 0.1, 0.2]).unwrap();
        assert_eq!((i, k), (2, TransitionKind::SignChange));
        // A big but downward jump is not the transition.
        let (i, k, _) = locate_transition(&[-0.2, -0.1, 0.1, 0.2, -5.0, -4.9]).unwrap();
        assert_eq!((i, k), (1, TransitionKind::SignChange));
        // A jump split over two cells by a grid point sitting on it.
        let (i, k, _) = locate_transition(&[-1.0, -1.01, -1.02, 0.001, 1.03, 1.04, 1.05]).unwrap();
        assert_eq!((i, k), (2, TransitionKind::Jump));
        assert!(matches!(locate_transition(&[1.0, 2.0, 3.0]), Err(Error::NoTransition(_))));
        assert!(matches!(locate_transition(&[0.0, -1e-12, 8e-12, 0.0]), Err(Error::NoTransition(_))));
    }

    #[test]
    fn alpha_grid_hits_decimals() {
        let g = AlphaSearch::grid(0.9, 1.1, 0.001).unwrap();
        assert_eq!(g.len(), 201);
        assert!(g.contains(&1.0));
        assert_eq!(*g.last().unwrap(), 1.1);
    }

    #[test]
    fn chain_alpha_star_small() {
        let fam = ModelFamily::chain(2000, Range::Full).unwrap();
        let grid = AlphaSearch::grid(0.9, 1.1, 0.001).unwrap();
        let r = find_alpha_star(&fam, &grid).unwrap();
        assert!((r.alpha_star - 1.0).abs() <= 0.001);
        assert_eq!(r.kind, TransitionKind::Jump);
    }

    #[test]
    fn n_sat_literal_rule_is_consistent() {
        let r = n_sat(3.0, 1e-4, SaturationOptions::default()).unwrap();
        let avg = |n: usize| avg_ggm_chain(n - 1, 3.0, DEFAULT_T, AVG_POINTS).unwrap();
        assert!((avg(r.value + 1) - avg(r.value)).abs() < 1e-4);
        assert!((avg(r.value) - avg(r.value - 1)).abs() >= 1e-4);
        assert!((avg(r.value) - r.achieved_avg_ggm).abs() < 1e-12);
    }

    #[test]
    fn persistence_never_returns_earlier() {
        let one = n_sat(2.0, 1e-4, SaturationOptions::default()).unwrap().value;
        let three = n_sat(2.0, 1e-4, SaturationOptions { persistence: 3, ..Default::default() }).unwrap().value;
        assert!(three >= one);
    }

    #[test]
    fn z_c_rules() {
        assert_eq!(z_c(30, 1.5, 0.5, DEFAULT_T).unwrap().value, 1);
        let r = z_c(40, 1.2, 1e-3, DEFAULT_T).unwrap();
        let avgs = avg_by_range(40, 1.2, DEFAULT_T, AVG_POINTS).unwrap();
        let full = avgs[38];
        assert!((full - avgs[r.value - 1]).abs() < 1e-3);
        if r.value > 1 {
            assert!((full - avgs[r.value - 2]).abs() >= 1e-3);
        }
    }

    #[test]
    fn average_monotone_in_range() {
        let avgs = avg_by_range(60, 0.8, DEFAULT_T, 601).unwrap();
        assert!(avgs.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    }
}
