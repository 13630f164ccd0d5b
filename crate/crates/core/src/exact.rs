//! Dense state-vector oracle.
//!
//! Basis index `η` encodes `|a_0 a_1 … a_{N−1}⟩` with site 0 as the most
//! significant bit, so site `i` lives in bit `N − 1 − i`.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{capacity, domain, Result};
use crate::lattice::CouplingModel;
use crate::linalg::max_hermitian_eigenvalue;

pub const MAX_QUBITS: usize = 20;
pub const MAX_BRUTE_QUBITS: usize = 16;

const WGSV_MAGIC: &[u8; 4] = b"WGSV";
const WGSV_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

#[inline]
fn bit_of(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return capacity(format!("{n_qubits} qubits exceed the dense limit of {MAX_QUBITS}"));
        }
        if amps.len() != 1 << n_qubits {
            return domain(format!("{} amplitudes do not describe {n_qubits} qubits", amps.len()));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return domain("inner product of states with different qubit counts");
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Applies `diag(d0, d1)` at `site`.
    pub fn apply_diagonal(&mut self, site: usize, u: DiagonalUnitary) -> Result<()> {
        if site >= self.n_qubits {
            return domain(format!("site {site} out of range for {} qubits", self.n_qubits));
        }
        let bit = bit_of(self.n_qubits, site);
        for (eta, a) in self.amps.iter_mut().enumerate() {
            *a *= if eta & bit == 0 { u.d0 } else { u.d1 };
        }
        Ok(())
    }

    /// Writes the `WGSV` debug dump: magic, version, qubit count and a
    /// reserved word (all `u32` little endian), then interleaved `re, im`.
    pub fn write_wgsv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(WGSV_MAGIC)?;
        w.write_all(&WGSV_VERSION.to_le_bytes())?;
        w.write_all(&(self.n_qubits as u32).to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_wgsv<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[0..4] != WGSV_MAGIC {
            return domain("not a WGSV dump");
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        if word(4) != WGSV_VERSION {
            return domain(format!("unsupported WGSV version {}", word(4)));
        }
        let n = word(8) as usize;
        if n > MAX_QUBITS {
            return capacity(format!("dump has {n} qubits, above the dense limit"));
        }
        let mut body = vec![0u8; 16 << n];
        r.read_exact(&mut body)?;
        let amps = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        Self::new(n, amps)
    }
}

pub fn build_wgs(model: &CouplingModel, t: f64) -> Result<StateVector> {
    let n = model.n_sites();
    if n > MAX_QUBITS {
        return capacity(format!("N = {n} exceeds the dense oracle limit of {MAX_QUBITS}"));
    }
    build_wgs_from_weights(&model.materialize_weights(t)?)
}

/// WGS with an explicit symmetric weight matrix `g`.
pub fn build_wgs_from_weights(g: &DMatrix<f64>) -> Result<StateVector> {
    let n = g.nrows();
    if g.ncols() != n {
        return domain("weight matrix must be square");
    }
    if n > MAX_QUBITS {
        return capacity(format!("N = {n} exceeds the dense oracle limit of {MAX_QUBITS}"));
    }
    let dim = 1usize << n;
    // phase(η) = phase(η without its lowest set bit) + couplings of that bit.
    let mut phase = vec![0.0f64; dim];
    for eta in 1..dim {
        let low = eta.trailing_zeros() as usize;
        let rest = eta & (eta - 1);
        let site = n - 1 - low;
        let mut p = phase[rest];
        let mut bits = rest;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            p += g[(site, n - 1 - b)];
            bits &= bits - 1;
        }
        phase[eta] = p;
    }
    let norm = (dim as f64).sqrt().recip();
    let amps = phase.into_iter().map(|p| Complex64::from_polar(norm, -p)).collect();
    StateVector::new(n, amps)
}

fn check_subset(n: usize, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return domain("subset must be non-empty");
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

/// `2^|A| × 2^|B|` coefficient matrix with subset sites ordered as given.
fn split_matrix(state: &StateVector, subset: &[usize]) -> DMatrix<Complex64> {
    let n = state.n_qubits;
    let rest: Vec<usize> = (0..n).filter(|s| !subset.contains(s)).collect();
    let (na, nb) = (subset.len(), rest.len());
    let mut m = DMatrix::zeros(1 << na, 1 << nb);
    for (eta, &amp) in state.amps.iter().enumerate() {
        let mut row = 0;
        for &s in subset {
            row = (row << 1) | usize::from(eta & bit_of(n, s) != 0);
        }
        let mut col = 0;
        for &s in &rest {
            col = (col << 1) | usize::from(eta & bit_of(n, s) != 0);
        }
        m[(row, col)] = amp;
    }
    m
}

/// Dense partial trace `ρ_A = Tr_B |ψ⟩⟨ψ|`; row index bits follow `subset`
/// order with its first entry most significant.
pub fn reduced_density_matrix(state: &StateVector, subset: &[usize]) -> Result<DMatrix<Complex64>> {
    check_subset(state.n_qubits, subset)?;
    let m = split_matrix(state, subset);
    Ok(&m * m.adjoint())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BipartitionResult {
    pub subset: Vec<usize>,
    pub max_schmidt_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceGgm {
    pub value: f64,
    pub best: BipartitionResult,
}

/// Subsets of `0..n` of size `k` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        while i > 0 && c[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        c[i - 1] += 1;
        for j in i..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// `1 − max_A λ_max(ρ_A)` over every non-empty `A` with `|A| ≤ N/2`.
/// Ties within 1e−12 keep the smallest, then lexicographically first, subset.
pub fn ggm_brute(state: &StateVector) -> Result<BruteForceGgm> {
    let n = state.n_qubits;
    if n > MAX_BRUTE_QUBITS {
        return capacity(format!("brute-force GGM is limited to N <= {MAX_BRUTE_QUBITS}, got {n}"));
    }
    if n < 2 {
        return domain("a bipartition needs at least two qubits");
    }
    let subsets: Vec<Vec<usize>> = (1..=n / 2).flat_map(|k| combinations(n, k)).collect();
    let lambdas: Vec<f64> = subsets
        .par_iter()
        .map(|a| {
            let m = split_matrix(state, a);
            max_hermitian_eigenvalue(&(&m * m.adjoint()))
        })
        .collect();
    let mut best = 0;
    for (i, &l) in lambdas.iter().enumerate() {
        if l > lambdas[best] + 1e-12 {
            best = i;
        }
    }
    Ok(BruteForceGgm {
        value: 1.0 - lambdas[best],
        best: BipartitionResult { subset: subsets[best].clone(), max_schmidt_sq: lambdas[best] },
    })
}

/// Projects site `k` onto `|outcome⟩` and removes it. Returns the outcome
/// probability and the renormalised `(N − 1)`-qubit state.
pub fn measure_z(state: &StateVector, k: usize, outcome: u8) -> Result<(f64, StateVector)> {
    let n = state.n_qubits;
    if k >= n {
        return domain(format!("site {k} out of range for {n} qubits"));
    }
    if outcome > 1 {
        return domain(format!("outcome must be 0 or 1, got {outcome}"));
    }
    if n == 1 {
        return domain("cannot remove the last qubit");
    }
    let low_bits = n - 1 - k;
    let low_mask = (1usize << low_bits) - 1;
    let mut out = Vec::with_capacity(1 << (n - 1));
    for reduced in 0..1usize << (n - 1) {
        let high = (reduced >> low_bits) << (low_bits + 1);
        let eta = high | ((outcome as usize) << low_bits) | (reduced & low_mask);
        out.push(state.amps[eta]);
    }
    let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if p < 1e-300 {
        return domain(format!("outcome {outcome} at site {k} has zero probability"));
    }
    let s = p.sqrt().recip();
    out.iter_mut().for_each(|a| *a *= s);
    Ok((p, StateVector::new(n - 1, out)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    /// Original site indices, in measurement order.
    pub sites: Vec<usize>,
    pub outcomes: Vec<u8>,
    pub probability: f64,
}

/// Measures `sites` (original labels) one after another.
pub fn measure_sequence(
    state: &StateVector,
    sites: &[usize],
    outcomes: &[u8],
) -> Result<(MeasurementRecord, StateVector)> {
    if sites.len() != outcomes.len() {
        return domain("one outcome per measured site is required");
    }
    check_subset(state.n_qubits, sites)?;
    if sites.len() >= state.n_qubits {
        return domain("at least one qubit must remain unmeasured");
    }
    let mut remaining: Vec<usize> = (0..state.n_qubits).collect();
    let mut current = state.clone();
    let mut probability = 1.0;
    for (&s, &o) in sites.iter().zip(outcomes) {
        let pos = remaining.iter().position(|&r| r == s).unwrap();
        let (p, next) = measure_z(&current, pos, o)?;
        probability *= p;
        remaining.remove(pos);
        current = next;
    }
    let record = MeasurementRecord { sites: sites.to_vec(), outcomes: outcomes.to_vec(), probability };
    Ok((record, current))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalUnitary {
    pub d0: Complex64,
    pub d1: Complex64,
}

impl DiagonalUnitary {
    pub const IDENTITY: Self = Self { d0: Complex64 { re: 1.0, im: 0.0 }, d1: Complex64 { re: 1.0, im: 0.0 } };

    pub fn adjoint(&self) -> Self {
        Self { d0: self.d0.conj(), d1: self.d1.conj() }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (self.d0 - 1.0).norm() <= tol && (self.d1 - 1.0).norm() <= tol
    }
}

/// `𝕌_l = diag(e^{i Σ_r g_{l k_r}}, 1)` summed over the outcome-1 sites.
pub fn lu_correction(
    model: &CouplingModel,
    t: f64,
    measured: &[(usize, u8)],
    l: usize,
) -> Result<DiagonalUnitary> {
    let n = model.n_sites();
    if l >= n {
        return domain(format!("site {l} out of range for N = {n}"));
    }
    if measured.iter().any(|&(k, _)| k == l) {
        return domain(format!("site {l} was measured"));
    }
    let phase: f64 = measured
        .iter()
        .filter(|&&(_, o)| o == 1)
        .map(|&(k, _)| model.coupling(l, k) * t)
        .sum();
    Ok(DiagonalUnitary { d0: Complex64::from_polar(1.0, phase), d1: Complex64::new(1.0, 0.0) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Check {
    pub fidelity: f64,
    /// Overlap when the local unitaries are skipped.
    pub fidelity_without_lu: f64,
    pub record: MeasurementRecord,
    pub remaining: Vec<usize>,
}

/// Measures, applies `𝕌_l†` on every remaining site and compares with the
/// WGS built from the untouched weight submatrix of the remaining sites.
pub fn verify_theorem1(
    model: &CouplingModel,
    t: f64,
    sites: &[usize],
    outcomes: &[u8],
) -> Result<Theorem1Check> {
    let n = model.n_sites();
    if n > MAX_BRUTE_QUBITS {
        return capacity(format!("measurement check is limited to N <= {MAX_BRUTE_QUBITS}, got {n}"));
    }
    let state = build_wgs(model, t)?;
    let (record, measured) = measure_sequence(&state, sites, outcomes)?;
    let remaining: Vec<usize> = (0..n).filter(|s| !sites.contains(s)).collect();

    let g = model.materialize_weights(t)?;
    let sub = DMatrix::from_fn(remaining.len(), remaining.len(), |a, b| g[(remaining[a], remaining[b])]);
    let target = build_wgs_from_weights(&sub)?;

    let fidelity_without_lu = target.fidelity(&measured)?;
    let pairs: Vec<(usize, u8)> = sites.iter().copied().zip(outcomes.iter().copied()).collect();
    let mut corrected = measured;
    for (pos, &l) in remaining.iter().enumerate() {
        let u = lu_correction(model, t, &pairs, l)?;
        corrected.apply_diagonal(pos, u.adjoint())?;
    }
    let fidelity = target.fidelity(&corrected)?;
    Ok(Theorem1Check { fidelity, fidelity_without_lu, record, remaining })
}

/// Closed-form overlap without correction, `∏_l |cos(θ_l/2)|` with
/// `θ_l = Σ_{outcome-1 sites k} g_lk`.
pub fn uncorrected_fidelity(model: &CouplingModel, t: f64, sites: &[usize], outcomes: &[u8]) -> f64 {
    (0..model.n_sites())
        .filter(|l| !sites.contains(l))
        .map(|l| {
            let theta: f64 = sites
                .iter()
                .zip(outcomes)
                .filter(|(_, &o)| o == 1)
                .map(|(&k, _)| model.coupling(l, k) * t)
                .sum();
            (0.5 * theta).cos().abs()
        })
        .product()
}
