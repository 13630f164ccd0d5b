//! Closed-form GGM of weighted graph states.
//!
//! A single-site reduced state of a WGS has diagonal `(1/2, 1/2)` and
//! off-diagonal `x_k = (1/2)·∏_{j≠k} cos(g_kj/2)·e^{i Σ_j g_kj/2}`, so its
//! eigenvalues are `1/2 ± |x_k|`. The GGM is taken as `1/2 − max_k |x_k|`.
//!
//! Products of up to millions of cosines are accumulated as sums of
//! `ln|cos|`. A factor below [`ZERO_FACTOR`] makes the whole product exactly
//! zero, i.e. `G = 1/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{capacity, domain, Result};
use crate::lattice::{power_law, CouplingModel, LatticeKind, LatticeSpec};
use crate::metrics::MetricSeries;

pub const ZERO_FACTOR: f64 = 1e-300;

/// `ln|cos x|`, or `−∞` when the factor counts as zero.
#[inline]
pub fn ln_abs_cos(x: f64) -> f64 {
    let c = x.cos().abs();
    if c < ZERO_FACTOR {
        f64::NEG_INFINITY
    } else {
        c.ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GgmValue {
    pub value: f64,
    pub argmax_site: usize,
    /// `ln max_k ∏_{j≠k} |cos(g_kj/2)|`, possibly `−∞`.
    pub log_product: f64,
}

impl GgmValue {
    pub fn from_log_product(log_product: f64, argmax_site: usize) -> Self {
        Self { value: 0.5 - 0.5 * log_product.exp(), argmax_site, log_product }
    }

    /// Largest single-site eigenvalue `1/2 + |x|`.
    pub fn max_eigenvalue(&self) -> f64 {
        0.5 + 0.5 * self.log_product.exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleSiteRdm {
    /// `ρ[0][1]`; the diagonal is `(1/2, 1/2)`.
    pub offdiag: Complex64,
}

impl SingleSiteRdm {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let half = Complex64::new(0.5, 0.0);
        [[half, self.offdiag], [self.offdiag.conj(), half]]
    }

    /// `(1/2 + |x|, 1/2 − |x|)`.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = self.offdiag.norm();
        [0.5 + m, 0.5 - m]
    }
}

pub fn single_site_rdm(model: &CouplingModel, k: usize, t: f64) -> Result<SingleSiteRdm> {
    let n = model.n_sites();
    if k >= n {
        return domain(format!("site {k} out of range for N = {n}"));
    }
    let (mut log_mag, mut phase, mut negatives) = (0.0, 0.0, 0usize);
    for j in (0..n).filter(|&j| model.is_coupled(k, j)) {
        let half = 0.5 * model.coupling(k, j) * t;
        let c = half.cos();
        if c < 0.0 {
            negatives += 1;
        }
        log_mag += ln_abs_cos(half);
        phase += half;
    }
    if negatives % 2 == 1 {
        phase += PI;
    }
    let offdiag = Complex64::from_polar(0.5 * log_mag.exp(), phase);
    Ok(SingleSiteRdm { offdiag })
}

/// Per-distance log-cosines `lc[r − 1] = ln|cos(t/(2 r^α))|` for `r = 1..=z`.
fn chain_log_cosines(alpha: f64, z: usize, t: f64) -> Vec<f64> {
    if alpha == 0.0 {
        return vec![ln_abs_cos(0.5 * t); z];
    }
    (1..=z).map(|r| ln_abs_cos(0.5 * t * power_law(r as f64, alpha))).collect()
}

fn argmax_first(values: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in values.enumerate() {
        if v > best.1 {
            best = (k, v);
        }
    }
    best
}

/// Site-maximised GGM for an arbitrary lattice.
///
/// Chains use prefix sums of the per-distance log-cosines, `O(N)` per call;
/// 2D lattices sum all pairs directly.
pub fn ggm_general(model: &CouplingModel, t: f64) -> GgmValue {
    if t == 0.0 {
        return GgmValue::from_log_product(0.0, 0);
    }
    let n = model.n_sites();
    match model.lattice().kind() {
        LatticeKind::Chain => {
            let z = model.z();
            let lc = chain_log_cosines(model.alpha(), z, t);
            let mut prefix = Vec::with_capacity(z + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for v in &lc {
                acc += v;
                prefix.push(acc);
            }
            let (k, lp) =
                argmax_first((0..n).map(|k| prefix[k.min(z)] + prefix[(n - 1 - k).min(z)]));
            GgmValue::from_log_product(lp, k)
        }
        LatticeKind::Deformed2D => {
            let mut sums = vec![0.0; n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = ln_abs_cos(0.5 * t * model.coupling(i, j));
                    sums[i] += v;
                    sums[j] += v;
                }
            }
            let (k, lp) = argmax_first(sums.into_iter());
            GgmValue::from_log_product(lp, k)
        }
    }
}

/// `G = 1/2 − (1/2)|∏_{r=1}^{z} cos(t/(2 r^α))|`, the chain-end site product.
pub fn ggm_chain_fastpath(n_sites: usize, z: usize, alpha: f64, t: f64) -> Result<GgmValue> {
    check_chain_args(n_sites, z, alpha)?;
    let lp: f64 = chain_log_cosines(alpha, z, t).iter().sum();
    Ok(GgmValue::from_log_product(lp, 0))
}

fn check_chain_args(n_sites: usize, z: usize, alpha: f64) -> Result<()> {
    if n_sites < 2 {
        return domain(format!("a chain needs at least 2 sites, got {n_sites}"));
    }
    if z < 1 || z > n_sites - 1 {
        return domain(format!("range z must lie in [1, {}], got {z}", n_sites - 1));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return domain(format!("alpha must be a finite non-negative number, got {alpha}"));
    }
    Ok(())
}

pub(crate) fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return domain(format!("{what} grid is empty"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return domain(format!("{what} grid contains a non-finite value"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain(format!("{what} grid must be strictly increasing"));
    }
    Ok(())
}

/// [`ggm_general`] at every grid time, evaluated in parallel, in grid order.
pub fn ggm_values(model: &CouplingModel, t_grid: &[f64]) -> Result<Vec<GgmValue>> {
    check_grid(t_grid, "time")?;
    Ok(t_grid.par_iter().map(|&t| ggm_general(model, t)).collect())
}

pub fn ggm_curve(model: &CouplingModel, t_grid: &[f64]) -> Result<MetricSeries> {
    let values = ggm_values(model, t_grid)?;
    let mut series = MetricSeries::new("t", "ggm", t_grid.to_vec(), values.iter().map(|g| g.value).collect())?;
    series.set_meta("n_sites", model.n_sites().to_string());
    series.set_meta("alpha", model.alpha().to_string());
    series.set_meta("z", model.z().to_string());
    Ok(series)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A (not necessarily fundamental) period of `G(t)` for an integer fall-off
/// rate: `2π·lcm(1^α, …, z^α)`.
pub fn period_of_chain(n_sites: usize, alpha: f64, z: usize) -> Result<f64> {
    check_chain_args(n_sites, z, alpha)?;
    if alpha.fract() != 0.0 {
        return domain(format!("a period exists only for integer alpha, got {alpha}"));
    }
    let exp = u32::try_from(alpha as u64).or_else(|_| capacity("alpha too large for an exact period"))?;
    let mut lcm: u128 = 1;
    for r in 1..=z as u128 {
        let Some(p) = r.checked_pow(exp) else {
            return capacity(format!("{r}^{exp} overflows the period computation"));
        };
        let Some(next) = (lcm / gcd(lcm, p)).checked_mul(p) else {
            return capacity("period overflows the exact lcm computation");
        };
        lcm = next;
    }
    Ok(2.0 * PI * lcm as f64)
}

/// Series coefficients of `ln cos x = Σ_k c_k x^{2k}`, `k = 1..=6`.
const LN_COS_SERIES: [f64; 6] = [
    -1.0 / 2.0,
    -1.0 / 12.0,
    -1.0 / 45.0,
    -17.0 / 2520.0,
    -31.0 / 14175.0,
    -691.0 / 467775.0,
];

/// Largest argument for which the truncated series is used.
const SERIES_MAX_ARG: f64 = 0.02;

/// Fast `Σ_{r=1}^{z} ln|cos(t/(2 r^α))|` for many `t ≤ t_max`.
///
/// Distances whose cosine argument stays below 0.02 for every `t ≤ t_max`
/// are folded into six precomputed power sums; the rest are summed directly.
#[derive(Clone, Debug)]
pub struct ChainProductTable {
    alpha: f64,
    z: usize,
    t_max: f64,
    direct: Vec<f64>,
    tail: [f64; 6],
}

impl ChainProductTable {
    pub fn new(alpha: f64, z: usize, t_max: f64) -> Result<Self> {
        check_chain_args(z + 1, z, alpha)?;
        if !(t_max.is_finite() && t_max >= 0.0) {
            return domain(format!("t_max must be finite and non-negative, got {t_max}"));
        }
        if alpha == 0.0 {
            return Ok(Self { alpha, z, t_max, direct: Vec::new(), tail: [0.0; 6] });
        }
        // Smallest R with t_max / (2 R^α) ≤ SERIES_MAX_ARG.
        let r_direct = ((0.5 * t_max / SERIES_MAX_ARG).powf(1.0 / alpha).ceil() as usize).min(z).max(1);
        let direct: Vec<f64> = (1..=r_direct).map(|r| 0.5 * power_law(r as f64, alpha)).collect();
        let mut tail = [0.0; 6];
        // Smallest terms first.
        for r in (r_direct + 1..=z).rev() {
            let a = 0.5 * power_law(r as f64, alpha);
            let a2 = a * a;
            let mut p = a2;
            for slot in tail.iter_mut() {
                *slot += p;
                p *= a2;
            }
        }
        Ok(Self { alpha, z, t_max, direct, tail })
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn direct_len(&self) -> usize {
        self.direct.len()
    }

    pub fn log_product(&self, t: f64) -> f64 {
        if self.alpha == 0.0 {
            return self.z as f64 * ln_abs_cos(0.5 * t);
        }
        if t.abs() > self.t_max {
            return chain_log_cosines(self.alpha, self.z, t).iter().sum();
        }
        let t2 = t * t;
        let mut series = 0.0;
        for k in (0..6).rev() {
            series += LN_COS_SERIES[k] * t2.powi(k as i32 + 1) * self.tail[k];
        }
        let mut direct = 0.0;
        for &a in self.direct.iter().rev() {
            direct += ln_abs_cos(a * t);
        }
        direct + series
    }

    pub fn ggm(&self, t: f64) -> GgmValue {
        GgmValue::from_log_product(self.log_product(t), 0)
    }
}

/// Upper-triangle `ln r_ij` of a 2D lattice for repeated GGM evaluation
/// across many fall-off rates.
#[derive(Clone, Debug)]
pub struct PairLogTable {
    n: usize,
    ln_r: Vec<f64>,
}

impl PairLogTable {
    pub fn new(spec: &LatticeSpec) -> Self {
        let p = spec.site_positions();
        let n = p.len();
        let mut ln_r = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                ln_r.push(p[i].distance(&p[j]).ln());
            }
        }
        Self { n, ln_r }
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// Site-maximised GGM at every time in `ts` for fall-off rate `alpha`.
    pub fn ggm_at(&self, alpha: f64, ts: &[f64]) -> Vec<GgmValue> {
        let n = self.n;
        let m = ts.len();
        let half: Vec<f64> = ts.iter().map(|t| 0.5 * t).collect();
        // sums[k * m + q] is the log product of site k at time ts[q].
        let mut sums = vec![0.0; n * m];
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let phi = (-alpha * self.ln_r[idx]).exp();
                idx += 1;
                for q in 0..m {
                    let v = ln_abs_cos(half[q] * phi);
                    sums[i * m + q] += v;
                    sums[j * m + q] += v;
                }
            }
        }
        (0..m)
            .map(|q| {
                if ts[q] == 0.0 {
                    return GgmValue::from_log_product(0.0, 0);
                }
                let (k, lp) = argmax_first((0..n).map(|k| sums[k * m + q]));
                GgmValue::from_log_product(lp, k)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Range;

    fn chain(n: usize, alpha: f64, range: Range) -> CouplingModel {
        CouplingModel::chain(n, alpha, range).unwrap()
    }

    #[test]
    fn two_site_rdm_examples() {
        let m = chain(2, 1.0, Range::Full);
        let r = single_site_rdm(&m, 0, PI).unwrap();
        assert!(r.offdiag.norm() < 1e-16);
        let [a, b] = r.eigenvalues();
        assert!((a - 0.5).abs() < 1e-16 && (b - 0.5).abs() < 1e-16);
        let r = single_site_rdm(&m, 0, 0.0).unwrap();
        assert_eq!(r.eigenvalues(), [1.0, 0.0]);
    }

    #[test]
    fn three_site_cosine_zero() {
        let m = chain(3, 1.0, Range::Full);
        let r = single_site_rdm(&m, 0, 2.0 * PI).unwrap();
        assert!(r.offdiag.norm() < 1e-16);
    }

    #[test]
    fn rdm_offdiag_matches_complex_product() {
        let m = chain(6, 0.7, Range::Cutoff(3));
        let (k, t) = (2, 4.1);
        let mut x = Complex64::new(2f64.powi(-6), 0.0);
        for j in 0..6 {
            if m.is_coupled(k, j) {
                x *= Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, m.coupling(k, j) * t);
            } else if j != k {
                x *= 2.0;
            }
        }
        let r = single_site_rdm(&m, k, t).unwrap();
        assert!((r.offdiag - x).norm() < 1e-15);
    }

    #[test]
    fn general_fixed_points() {
        for alpha in [0.0, 0.5, 1.0, 3.3, 6.0] {
            let m = chain(40, alpha, Range::Full);
            assert_eq!(ggm_general(&m, 0.0).value, 0.0);
            assert!((ggm_general(&m, PI).value - 0.5).abs() < 1e-12);
        }
        let m = chain(5000, 0.0, Range::Full);
        let g = ggm_general(&m, PI / 2.0);
        let expected = 0.5 - 0.5 * (PI / 4.0).cos().powi(4999);
        assert_eq!(g.value, expected);
    }

    #[test]
    fn fastpath_examples() {
        let g = ggm_chain_fastpath(10, 1, 2.0, PI / 2.0).unwrap();
        assert!((g.value - 0.14644660940672627).abs() < 1e-15);
        assert!((ggm_chain_fastpath(10, 2, 1.0, 2.0 * PI).unwrap().value - 0.5).abs() < 1e-12);
        assert_eq!(ggm_chain_fastpath(10, 1, 1.0, 2.0 * PI).unwrap().value, 0.0);
        assert!(ggm_chain_fastpath(10, 10, 1.0, 1.0).is_err());
        assert!(ggm_chain_fastpath(10, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn curve_examples() {
        let m = chain(5000, 5.0, Range::Full);
        let c = ggm_curve(&m, &[PI, 3.0 * PI]).unwrap();
        assert!(c.values.iter().all(|v| (v - 0.5).abs() < 1e-12));
        let c = ggm_curve(&chain(2, 1.0, Range::Full), &[0.0]).unwrap();
        assert_eq!(c.values, vec![0.0]);
        assert!(ggm_curve(&m, &[]).is_err());
        assert!(ggm_curve(&m, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn periods() {
        assert_eq!(period_of_chain(10, 3.0, 1).unwrap(), 2.0 * PI);
        assert_eq!(period_of_chain(10, 1.0, 2).unwrap(), 4.0 * PI);
        assert_eq!(period_of_chain(10, 0.0, 7).unwrap(), 2.0 * PI);
        assert_eq!(period_of_chain(10, 2.0, 3).unwrap(), 72.0 * PI);
        assert!(period_of_chain(10, 1.5, 2).is_err());
    }

    #[test]
    fn period_holds_on_dense_grid() {
        let m = chain(3, 1.0, Range::Full);
        let p = period_of_chain(3, 1.0, 2).unwrap();
        for q in 0..1000 {
            let t = q as f64 * 0.01;
            let a = ggm_general(&m, t).value;
            let b = ggm_general(&m, t + p).value;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_end_dominance_counterexample() {
        // Found by random search: an interior site has the larger eigenvalue.
        let (n, alpha, t) = (14, 0.39337891451051954, 9.089833982757435);
        let general = ggm_general(&chain(n, alpha, Range::Full), t);
        let end = ggm_chain_fastpath(n, n - 1, alpha, t).unwrap();
        assert_eq!(general.argmax_site, 6);
        assert!(end.value - general.value > 1e-3);
    }

    #[test]
    fn product_table_matches_direct_sums() {
        for &(alpha, z) in &[(0.0, 1000), (0.3, 5000), (1.0, 20000), (1.5, 100_000), (4.0, 300)] {
            let table = ChainProductTable::new(alpha, z, 3.0 * PI).unwrap();
            for q in 0..=60 {
                let t = q as f64 * 3.0 * PI / 60.0;
                let direct: f64 = chain_log_cosines(alpha, z, t).iter().sum();
                let fast = table.log_product(t);
                if direct.is_infinite() {
                    assert!(fast.is_infinite());
                } else {
                    assert!((direct - fast).abs() <= 1e-11 * direct.abs().max(1.0), "{alpha} {z} {t}");
                }
            }
        }
    }

    #[test]
    fn pair_table_matches_general() {
        for theta in [90.0, 117.0, 135.0] {
            let spec = LatticeSpec::deformed(6, theta).unwrap();
            let table = PairLogTable::new(&spec);
            let ts = [0.0, 1.3, 2.0 * PI];
            for alpha in [0.0, 1.2, 2.5] {
                let fast = table.ggm_at(alpha, &ts);
                let model = CouplingModel::new(spec.clone(), alpha, Range::Full).unwrap();
                for (g, &t) in fast.iter().zip(&ts) {
                    assert!((g.value - ggm_general(&model, t).value).abs() < 1e-12);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ggm_bounded(n in 2usize..200, alpha in 0.0f64..6.0, t in 0.0f64..(3.0 * PI), zf in 0.0f64..1.0) {
                let z = 1 + ((n - 2) as f64 * zf) as usize;
                let g = ggm_general(&chain(n, alpha, Range::Cutoff(z)), t).value;
                prop_assert!((0.0..=0.5).contains(&g));
            }

            #[test]
            fn ggm_monotone_in_range(n in 3usize..120, alpha in 0.0f64..6.0, t in 0.0f64..(3.0 * PI), k in 0usize..120, z in 1usize..119) {
                let k = k % n;
                let z = 1 + z % (n - 2).max(1);
                prop_assume!(z < n - 1);
                let a = single_site_rdm(&chain(n, alpha, Range::Cutoff(z)), k, t).unwrap();
                let b = single_site_rdm(&chain(n, alpha, Range::Cutoff(z + 1)), k, t).unwrap();
                prop_assert!(b.offdiag.norm() <= a.offdiag.norm() * (1.0 + 1e-12) + 1e-300);
            }

            // The end site dominates whenever every |cos(t/2r^α)| grows with r,
            // which holds for t ≤ π. Beyond that the site max can only be larger.
            #[test]
            fn chain_end_dominance(n in 2usize..512, alpha in 0.0f64..6.0, t in 0.0f64..(3.0 * PI)) {
                let general = ggm_general(&chain(n, alpha, Range::Full), t);
                let end = ggm_chain_fastpath(n, n - 1, alpha, t).unwrap();
                if t <= PI {
                    prop_assert!((general.value - end.value).abs() <= 1e-12);
                    prop_assert!(general.argmax_site == 0 || general.argmax_site == n - 1 || (general.value - end.value).abs() <= 1e-12);
                } else {
                    prop_assert!(end.value >= general.value - 1e-12);
                }
            }

            #[test]
            fn period_property(alpha in 0u32..4, z in 1usize..4, t in 0.0f64..10.0) {
                let p = period_of_chain(z + 1, alpha as f64, z).unwrap();
                let m = chain(z + 1, alpha as f64, Range::Full);
                let a = ggm_general(&m, t).value;
                let b = ggm_general(&m, t + p).value;
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
