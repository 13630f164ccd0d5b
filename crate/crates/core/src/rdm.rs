//! Reduced density matrices of site subsets without a `2^N` state.
//!
//! Contracting the complement `B` of a subset `A` leaves, entry by entry,
//!
//! ```text
//! ρ_A[s, s′] = 2^(−n) · e^{−i(θ_A(s) − θ_A(s′))} · ∏_{l∈B} e^{−iΔ_l/2} cos(Δ_l/2)
//! Δ_l = Σ_{k∈A} g_kl (s_k − s′_k),   θ_A(s) = Σ_{k<k′∈A} g_kk′ s_k s_k′
//! ```
//!
//! so each entry is a product over `B` of single-site factors. Magnitudes are
//! accumulated in log space with a sign count, phases as plain sums.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::ln_abs_cos;
use crate::error::{capacity, domain, Result};
use crate::exact::{build_wgs, combinations, reduced_density_matrix, BipartitionResult};
use crate::lattice::CouplingModel;
use crate::linalg::hermitian_spectrum;

pub const MAX_SUBSET: usize = 12;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    /// Row bits follow this order, first site most significant.
    pub subset: Vec<usize>,
    pub entries: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().sum()
    }

    /// Descending eigenvalues.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_spectrum(&self.entries)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectrum()[0]
    }

    /// `max |ρ − ρ†|` over entries.
    pub fn hermiticity_error(&self) -> f64 {
        let d = &self.entries - self.entries.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_subset(n: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return domain("subset must be non-empty");
    }
    if subset.len() > MAX_SUBSET {
        return capacity(format!("subsets are limited to {MAX_SUBSET} sites, got {}", subset.len()));
    }
    let mut seen = vec![false; n];
    for &s in subset {
        if s >= n {
            return domain(format!("site {s} out of range for N = {n}"));
        }
        if std::mem::replace(&mut seen[s], true) {
            return domain(format!("site {s} listed twice"));
        }
    }
    Ok(())
}

/// `ρ_A` including the intra-subset phases `e^{−iθ_A}`.
pub fn rdm_subset(model: &CouplingModel, t: f64, subset: &[usize]) -> Result<ReducedDensityMatrix> {
    rdm_subset_with(model, t, subset, true)
}

/// `ρ′_A`: the same matrix with the intra-subset phases dropped. Unitarily
/// equivalent to `ρ_A`.
pub fn rdm_subset_without_phase(model: &CouplingModel, t: f64, subset: &[usize]) -> Result<ReducedDensityMatrix> {
    rdm_subset_with(model, t, subset, false)
}

fn rdm_subset_with(model: &CouplingModel, t: f64, subset: &[usize], intra_phase: bool) -> Result<ReducedDensityMatrix> {
    let n_sites = model.n_sites();
    check_subset(n_sites, subset)?;
    let n = subset.len();
    let dim = 1usize << n;
    let rest: Vec<usize> = (0..n_sites).filter(|l| !subset.contains(l)).collect();
    let bit = |s: usize, a: usize| (s >> (n - 1 - a)) & 1;

    // w[s * |B| + l] = Σ_{k∈A} g_kl s_k, so that Δ_l(s, s′) = w(s) − w(s′).
    let nb = rest.len();
    let mut w = vec![0.0; dim * nb];
    let mut theta = vec![0.0; dim];
    for s in 0..dim {
        for (a, &k) in subset.iter().enumerate() {
            if bit(s, a) == 0 {
                continue;
            }
            for (li, &l) in rest.iter().enumerate() {
                w[s * nb + li] += model.coupling(k, l) * t;
            }
            if intra_phase {
                for (b, &kk) in subset.iter().enumerate().skip(a + 1) {
                    if bit(s, b) == 1 {
                        theta[s] += model.coupling(k, kk) * t;
                    }
                }
            }
        }
    }

    let scale = (dim as f64).recip();
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|s| {
            (s..dim)
                .map(|sp| {
                    if s == sp {
                        return Complex64::new(scale, 0.0);
                    }
                    let (mut log_mag, mut phase, mut negatives) = (0.0, theta[sp] - theta[s], 0usize);
                    for li in 0..nb {
                        let half = 0.5 * (w[s * nb + li] - w[sp * nb + li]);
                        if half.cos() < 0.0 {
                            negatives += 1;
                        }
                        log_mag += ln_abs_cos(half);
                        phase -= half;
                    }
                    if negatives % 2 == 1 {
                        phase += PI;
                    }
                    Complex64::from_polar(scale * log_mag.exp(), phase)
                })
                .collect()
        })
        .collect();

    let mut entries = DMatrix::zeros(dim, dim);
    for (s, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let sp = s + off;
            entries[(s, sp)] = v;
            entries[(sp, s)] = v.conj();
        }
    }
    Ok(ReducedDensityMatrix { subset: subset.to_vec(), entries })
}

/// How [`max_eig_over_subsets`] chooses candidate subsets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubsetScan {
    /// Every subset with `|A| ≤ n_max`; needs `n_max ≤ 6` and `N ≤ 24`.
    Exhaustive,
    /// All single sites and contiguous windows plus `samples` uniform random
    /// subsets of size `2..=n_max`.
    Sampled { samples: usize, seed: u64 },
}

pub fn candidate_subsets(n_sites: usize, n_max: usize, scan: SubsetScan) -> Result<Vec<Vec<usize>>> {
    if n_max == 0 || n_max > MAX_SUBSET || n_max > n_sites {
        return domain(format!("n_max must lie in [1, min(N, {MAX_SUBSET})], got {n_max}"));
    }
    let mut out: Vec<Vec<usize>> = match scan {
        SubsetScan::Exhaustive => {
            if n_max > 6 || n_sites > 24 {
                return capacity("exhaustive subset scans need n_max <= 6 and N <= 24; use sampling");
            }
            (1..=n_max).flat_map(|k| combinations(n_sites, k)).collect()
        }
        SubsetScan::Sampled { samples, seed } => {
            let mut v: Vec<Vec<usize>> = (0..n_sites).map(|k| vec![k]).collect();
            for k in 2..=n_max {
                v.extend((0..=n_sites - k).map(|start| (start..start + k).collect()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if n_max >= 2 {
                for _ in 0..samples {
                    let k = rng.random_range(2..=n_max);
                    let mut a = sample(&mut rng, n_sites, k).into_vec();
                    a.sort_unstable();
                    v.push(a);
                }
            }
            v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            v.dedup();
            v
        }
    };
    out.shrink_to_fit();
    Ok(out)
}

/// Subset whose reduced state has the largest top eigenvalue. Ties within
/// 1e−12 go to the smallest subset, then the lexicographically first.
pub fn max_eig_over_subsets(model: &CouplingModel, t: f64, n_max: usize, scan: SubsetScan) -> Result<BipartitionResult> {
    let candidates = candidate_subsets(model.n_sites(), n_max, scan)?;
    let lambdas: Vec<f64> = candidates
        .par_iter()
        .map(|a| rdm_subset_without_phase(model, t, a).map(|r| r.max_eigenvalue()))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &l) in lambdas.iter().enumerate() {
        if l > lambdas[best] + 1e-12 {
            best = i;
        }
    }
    Ok(BipartitionResult { subset: candidates[best].clone(), max_schmidt_sq: lambdas[best] })
}

/// Spectra of `ρ_A`, `ρ′_A` and the dense partial trace agree to 1e−12.
pub fn spectrum_invariance_check(model: &CouplingModel, t: f64, subset: &[usize]) -> Result<bool> {
    if model.n_sites() > 14 {
        return capacity("spectrum check needs the dense oracle, N <= 14");
    }
    if subset.len() > 10 {
        return capacity("spectrum check is limited to |A| <= 10");
    }
    let with = rdm_subset(model, t, subset)?.spectrum();
    let without = rdm_subset_without_phase(model, t, subset)?.spectrum();
    let dense = hermitian_spectrum(&reduced_density_matrix(&build_wgs(model, t)?, subset)?);
    let agree = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12);
    Ok(agree(&with, &without) && agree(&with, &dense))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::single_site_rdm;
    use crate::lattice::Range;
    use rand::Rng;

    fn chain(n: usize, alpha: f64) -> CouplingModel {
        CouplingModel::chain(n, alpha, Range::Full).unwrap()
    }

    #[test]
    fn single_site_matches_closed_form() {
        let m = chain(9, 0.8);
        for k in [0, 4, 8] {
            let r = rdm_subset(&m, 2.7, &[k]).unwrap();
            let x = single_site_rdm(&m, k, 2.7).unwrap().offdiag;
            assert!((r.entries[(0, 1)] - x).norm() < 1e-14);
            assert!((r.max_eigenvalue() - (0.5 + x.norm())).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_is_flat() {
        let m = chain(12, 1.1);
        let r = rdm_subset(&m, 5.0, &[1, 4, 9]).unwrap();
        for s in 0..8 {
            assert_eq!(r.entries[(s, s)], Complex64::new(0.125, 0.0));
        }
        assert!((r.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.hermiticity_error(), 0.0);
    }

    #[test]
    fn matches_dense_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let alpha = rng.random_range(0.0..4.0);
            let t = rng.random_range(0.0..9.0);
            let m = chain(10, alpha);
            let mut a = sample(&mut rng, 10, 3).into_vec();
            a.sort_unstable();
            let fast = rdm_subset(&m, t, &a).unwrap();
            let dense = reduced_density_matrix(&build_wgs(&m, t).unwrap(), &a).unwrap();
            let err = (&fast.entries - &dense).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "{err}");
        }
    }

    #[test]
    fn offdiagonal_magnitude_is_a_cosine_product() {
        let m = chain(11, 1.3);
        let a = [2, 3, 7];
        let t = 4.4;
        let r = rdm_subset(&m, t, &a).unwrap();
        let (s, sp) = (0b101usize, 0b011usize);
        let d = [1.0, -1.0, 0.0];
        let mut mag = 0.125;
        for l in (0..11).filter(|l| !a.contains(l)) {
            let delta: f64 = a.iter().zip(&d).map(|(&k, dk)| m.coupling(k, l) * t * dk).sum();
            mag *= (delta / 2.0).cos().abs();
        }
        assert!((r.entries[(s, sp)].norm() - mag).abs() < 1e-15);
    }

    #[test]
    fn spectrum_invariance_examples() {
        assert!(spectrum_invariance_check(&chain(6, 1.2), 2.2, &[1, 4]).unwrap());
        assert!(spectrum_invariance_check(&chain(6, 1.2), 2.2, &[3]).unwrap());
    }

    #[test]
    fn scan_examples() {
        let w = max_eig_over_subsets(&chain(16, 1.0), 2.0 * PI, 3, SubsetScan::Exhaustive).unwrap();
        assert_eq!(w.subset.len(), 1);
        let w = max_eig_over_subsets(&chain(8, 1.0), 0.0, 3, SubsetScan::Exhaustive).unwrap();
        assert_eq!(w.subset, vec![0]);
        assert!((w.max_schmidt_sq - 1.0).abs() < 1e-12);
        assert!(max_eig_over_subsets(&chain(30, 1.0), 1.0, 3, SubsetScan::Exhaustive).is_err());
    }

    #[test]
    fn sampled_candidates_are_seeded() {
        let scan = SubsetScan::Sampled { samples: 50, seed: 3 };
        let a = candidate_subsets(40, 3, scan).unwrap();
        assert_eq!(a, candidate_subsets(40, 3, scan).unwrap());
        assert!(a.iter().take(40).all(|s| s.len() == 1));
    }
}
