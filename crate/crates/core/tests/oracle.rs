//! Closed forms against the dense state-vector oracle.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wgslab::analytic::{ggm_curve, ggm_general, single_site_rdm};
use wgslab::exact::{build_wgs, ggm_brute, reduced_density_matrix};
use wgslab::lattice::{CouplingModel, LatticeSpec, Range};
use wgslab::rdm::{max_eig_over_subsets, rdm_subset, spectrum_invariance_check, SubsetScan};

#[test]
fn chains_up_to_half_period_match_brute_force() {
    // For t <= pi every chain factor grows with distance, so a chain end wins
    // and no multi-site cut can beat it.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let n = rng.random_range(2..=12);
        let range = if rng.random_bool(0.5) { Range::Full } else { Range::Cutoff(rng.random_range(1..n)) };
        let model = CouplingModel::chain(n, rng.random_range(0.0..=6.0), range).unwrap();
        let t = rng.random_range(0.0..=PI);
        let brute = ggm_brute(&build_wgs(&model, t).unwrap()).unwrap();
        let general = ggm_general(&model, t);
        assert!((brute.value - general.value).abs() <= 1e-10, "N={n} t={t}");
        assert_eq!(brute.best.subset.len(), 1);
    }
}

#[test]
fn curve_matches_oracle_pointwise() {
    let model = CouplingModel::chain(4, 1.0, Range::Full).unwrap();
    let grid: Vec<f64> = (0..100).map(|i| PI * i as f64 / 99.0).collect();
    let curve = ggm_curve(&model, &grid).unwrap();
    for (&t, &g) in grid.iter().zip(&curve.values) {
        let brute = ggm_brute(&build_wgs(&model, t).unwrap()).unwrap().value;
        assert!((brute - g).abs() <= 1e-10, "t={t}");
    }

    let model = CouplingModel::chain(8, 1.3, Range::Full).unwrap();
    let brute = ggm_brute(&build_wgs(&model, 1.7).unwrap()).unwrap().value;
    assert!((brute - ggm_general(&model, 1.7).value).abs() <= 1e-10);
}

#[test]
fn pair_cut_beats_every_site_at_two_pi() {
    // Closed form says 1/2 here, yet the state is far from maximally
    // entangled across {0, 2} | {1, 3}.
    let model = CouplingModel::chain(4, 1.0, Range::Full).unwrap();
    let brute = ggm_brute(&build_wgs(&model, 2.0 * PI).unwrap()).unwrap();
    assert!((ggm_general(&model, 2.0 * PI).value - 0.5).abs() <= 1e-12);
    assert!((brute.value - 0.25).abs() <= 1e-12);
    assert_eq!(brute.best.subset, vec![0, 2]);
}

#[test]
fn subset_matrices_match_partial_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let model = CouplingModel::chain(10, rng.random_range(0.0..4.0), Range::Full).unwrap();
        let t = rng.random_range(0.0..3.0 * PI);
        let state = build_wgs(&model, t).unwrap();
        let mut subset = Vec::new();
        while subset.len() < 3 {
            let s = rng.random_range(0..10);
            if !subset.contains(&s) {
                subset.push(s);
            }
        }
        // Unsorted on purpose: both sides honour the given row order.
        let fast = rdm_subset(&model, t, &subset).unwrap();
        let dense = reduced_density_matrix(&state, &subset).unwrap();
        let err = (&fast.entries - &dense).iter().fold(0.0_f64, |m, d| m.max(d.norm()));
        assert!(err <= 1e-12, "subset {subset:?}: {err}");
        assert!((fast.trace().re - 1.0).abs() <= 1e-12);
        assert!(fast.hermiticity_error() <= 1e-12);
        assert!(fast.spectrum().iter().all(|&l| l >= -1e-12));
    }
}

#[test]
fn single_site_matrix_agrees_with_closed_form() {
    let spec = LatticeSpec::deformed(3, 120.0).unwrap();
    let model = CouplingModel::new(spec, 1.4, Range::Full).unwrap();
    for k in 0..9 {
        let top = rdm_subset(&model, 2.2, &[k]).unwrap().max_eigenvalue();
        let closed = single_site_rdm(&model, k, 2.2).unwrap().eigenvalues()[0];
        assert!((top - closed).abs() <= 1e-12);
    }
}

#[test]
fn spectrum_survives_phase_removal() {
    let model = CouplingModel::chain(6, 1.1, Range::Full).unwrap();
    assert!(spectrum_invariance_check(&model, 2.4, &[1, 4]).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let model = CouplingModel::chain(12, rng.random_range(0.0..5.0), Range::Full).unwrap();
        let t = rng.random_range(0.0..3.0 * PI);
        assert!(spectrum_invariance_check(&model, t, &[0, 3, 7, 11]).unwrap());
    }
}

#[test]
fn subset_scans_pick_single_sites() {
    let model = CouplingModel::chain(16, 1.0, Range::Full).unwrap();
    let best = max_eig_over_subsets(&model, 2.0 * PI, 3, SubsetScan::Exhaustive).unwrap();
    assert_eq!(best.subset.len(), 1);

    let best = max_eig_over_subsets(&model, 0.0, 3, SubsetScan::Exhaustive).unwrap();
    assert_eq!(best.subset, vec![0]);
    assert!((best.max_schmidt_sq - 1.0).abs() <= 1e-12);

    let model = CouplingModel::chain(100, 2.0, Range::Full).unwrap();
    let best = max_eig_over_subsets(&model, 1.0, 4, SubsetScan::Sampled { samples: 300, seed: 5 }).unwrap();
    assert_eq!(best.subset.len(), 1);
}
