//! Lattice geometry and power-law couplings.
//!
//! Two geometries are supported, both with open boundaries:
//!
//! - a 1D chain of `N` unit-spaced sites;
//! - an `L × L` lattice whose bond angle `Θ` interpolates between the square
//!   lattice (`Θ = 90°`) and the honeycomb lattice (`Θ = 120°`).
//!
//! Sites are addressed by a 0-based linear index. On a 2D lattice the site
//! with 1-based coordinates `(i_x, i_y)` has index `(i_x − 1)·L + (i_y − 1)`.
//!
//! The deformed lattice is a brick wall: within row `i_x` the bond from
//! `(i_x, i_y)` to `(i_x, i_y + 1)` points along `(cos Θ, sin Θ)` when
//! `i_x + i_y` is even and along `(−cos Θ, sin Θ)` when it is odd, while an
//! even site `(i_x, i_y)` is bonded to `(i_x + 1, i_y)` by the unit vector
//! `(1, 0)`. Every bond has unit length.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{capacity, domain, Result};

/// Largest `N` for which [`CouplingModel::materialize_weights`] allocates a
/// dense matrix.
pub const DENSE_WEIGHT_CAP: usize = 4096;

pub const MIN_THETA_DEG: f64 = 90.0;
pub const MAX_THETA_DEG: f64 = 150.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LatticeKind {
    Chain,
    Deformed2D,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SitePosition {
    pub x: f64,
    pub y: f64,
}

impl SitePosition {
    pub fn distance(&self, other: &SitePosition) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Declarative description of a lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeSpec {
    kind: LatticeKind,
    /// `N` for a chain, `L` for a 2D lattice.
    side: usize,
    theta_deg: Option<f64>,
}

impl LatticeSpec {
    pub fn chain(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return domain(format!("a chain needs at least 2 sites, got {n_sites}"));
        }
        Ok(Self { kind: LatticeKind::Chain, side: n_sites, theta_deg: None })
    }

    /// `L × L` lattice deformed to bond angle `theta_deg` (degrees).
    pub fn deformed(side: usize, theta_deg: f64) -> Result<Self> {
        if side < 2 {
            return domain(format!("a 2D lattice needs L >= 2, got {side}"));
        }
        if !(MIN_THETA_DEG..=MAX_THETA_DEG).contains(&theta_deg) {
            return domain(format!(
                "theta must lie in [{MIN_THETA_DEG}, {MAX_THETA_DEG}] degrees, got {theta_deg}"
            ));
        }
        Ok(Self { kind: LatticeKind::Deformed2D, side, theta_deg: Some(theta_deg) })
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::deformed(side, 90.0)
    }

    pub fn honeycomb(side: usize) -> Result<Self> {
        Self::deformed(side, 120.0)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn theta_deg(&self) -> Option<f64> {
        self.theta_deg
    }

    pub fn n_sites(&self) -> usize {
        match self.kind {
            LatticeKind::Chain => self.side,
            LatticeKind::Deformed2D => self.side * self.side,
        }
    }

    /// 1-based `(i_x, i_y)` of a 2D site; chains report `(1, i + 1)`.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        match self.kind {
            LatticeKind::Chain => (1, index + 1),
            LatticeKind::Deformed2D => (index / self.side + 1, index % self.side + 1),
        }
    }

    pub fn index_of(&self, ix: usize, iy: usize) -> usize {
        match self.kind {
            LatticeKind::Chain => iy - 1,
            LatticeKind::Deformed2D => (ix - 1) * self.side + (iy - 1),
        }
    }

    pub fn site_positions(&self) -> Vec<SitePosition> {
        match self.kind {
            LatticeKind::Chain => {
                (0..self.side).map(|i| SitePosition { x: i as f64, y: 0.0 }).collect()
            }
            LatticeKind::Deformed2D => deformed_positions(self.side, self.theta_deg.unwrap()),
        }
    }

    /// Euclidean distance between two distinct sites.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        Ok(match self.kind {
            LatticeKind::Chain => i.abs_diff(j) as f64,
            LatticeKind::Deformed2D => {
                let (ci, cj) = (self.coords(i), self.coords(j));
                let t = self.theta_deg.unwrap();
                deformed_position(self.side, t, ci.0, ci.1)
                    .distance(&deformed_position(self.side, t, cj.0, cj.1))
            }
        })
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.n_sites();
        if i >= n || j >= n {
            return domain(format!("site index out of range: ({i}, {j}) with N = {n}"));
        }
        if i == j {
            return domain(format!("distance of site {i} to itself is not defined"));
        }
        Ok(())
    }
}

fn row_offsets(side: usize, cos_t: f64) -> Vec<f64> {
    let mut offsets = Vec::with_capacity(side);
    let mut x = 0.0;
    for ix in 1..=side {
        offsets.push(x);
        // Odd rows are bonded to the next row at iy = 1, even rows at iy = 2.
        x += if ix % 2 == 1 { 1.0 } else { 1.0 - 2.0 * cos_t };
    }
    offsets
}

fn deformed_position(side: usize, theta_deg: f64, ix: usize, iy: usize) -> SitePosition {
    let (sin_t, cos_t) = theta_deg.to_radians().sin_cos();
    let offsets = row_offsets(side, cos_t);
    position_from_offsets(&offsets, sin_t, cos_t, ix, iy)
}

fn position_from_offsets(offsets: &[f64], sin_t: f64, cos_t: f64, ix: usize, iy: usize) -> SitePosition {
    let mut x = offsets[ix - 1];
    if iy.is_multiple_of(2) {
        x += if ix % 2 == 1 { cos_t } else { -cos_t };
    }
    SitePosition { x, y: (iy - 1) as f64 * sin_t }
}

fn deformed_positions(side: usize, theta_deg: f64) -> Vec<SitePosition> {
    if theta_deg == 90.0 {
        // Exact integer grid, free of cos(π/2) rounding.
        let mut out = Vec::with_capacity(side * side);
        for ix in 0..side {
            for iy in 0..side {
                out.push(SitePosition { x: ix as f64, y: iy as f64 });
            }
        }
        return out;
    }
    let (sin_t, cos_t) = theta_deg.to_radians().sin_cos();
    let offsets = row_offsets(side, cos_t);
    let mut out = Vec::with_capacity(side * side);
    for ix in 1..=side {
        for iy in 1..=side {
            out.push(position_from_offsets(&offsets, sin_t, cos_t, ix, iy));
        }
    }
    out
}

/// Nearest-neighbour bonds of a lattice as index pairs `(i, j)` with `i < j`.
pub fn nearest_neighbour_bonds(spec: &LatticeSpec) -> Vec<(usize, usize)> {
    let mut bonds = Vec::new();
    match spec.kind {
        LatticeKind::Chain => bonds.extend((0..spec.side - 1).map(|i| (i, i + 1))),
        LatticeKind::Deformed2D => {
            let l = spec.side;
            for ix in 1..=l {
                for iy in 1..=l {
                    let i = spec.index_of(ix, iy);
                    if iy < l {
                        bonds.push((i, spec.index_of(ix, iy + 1)));
                    }
                    if (ix + iy) % 2 == 0 && ix < l {
                        bonds.push((i, spec.index_of(ix + 1, iy)));
                    }
                }
            }
        }
    }
    bonds
}

/// Interaction range `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Range {
    /// All-to-all, `z = N − 1`.
    Full,
    /// Chains only: pairs with `|i − j| ≤ z` are coupled.
    Cutoff(usize),
}

/// Power-law coupling `φ_ij = r_ij^(−α)` on a lattice, with `g_ij(t) = φ_ij·t`.
#[derive(Clone, Debug)]
pub struct CouplingModel {
    lattice: LatticeSpec,
    alpha: f64,
    z: usize,
    // Empty for chains, where distances are |i - j|.
    positions: Vec<SitePosition>,
}

impl CouplingModel {
    pub fn new(lattice: LatticeSpec, alpha: f64, range: Range) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return domain(format!("alpha must be a finite non-negative number, got {alpha}"));
        }
        let n = lattice.n_sites();
        let z = match (lattice.kind, range) {
            (_, Range::Full) => n - 1,
            (LatticeKind::Chain, Range::Cutoff(z)) => {
                if z < 1 || z > n - 1 {
                    return domain(format!("range z must lie in [1, {}], got {z}", n - 1));
                }
                z
            }
            (LatticeKind::Deformed2D, Range::Cutoff(z)) => {
                if z != n - 1 {
                    return domain("2D lattices are always all-to-all coupled (z = N - 1)");
                }
                z
            }
        };
        let positions = match lattice.kind {
            LatticeKind::Chain => Vec::new(),
            LatticeKind::Deformed2D => lattice.site_positions(),
        };
        Ok(Self { lattice, alpha, z, positions })
    }

    pub fn chain(n_sites: usize, alpha: f64, range: Range) -> Result<Self> {
        Self::new(LatticeSpec::chain(n_sites)?, alpha, range)
    }

    /// Same lattice and range with a different fall-off rate.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return domain(format!("alpha must be a finite non-negative number, got {alpha}"));
        }
        Ok(Self { alpha, ..self.clone() })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    pub fn positions(&self) -> &[SitePosition] {
        &self.positions
    }

    pub fn is_coupled(&self, i: usize, j: usize) -> bool {
        i != j && (self.lattice.kind == LatticeKind::Deformed2D || i.abs_diff(j) <= self.z)
    }

    /// Distance without validation; `i != j` and both in range.
    pub(crate) fn raw_distance(&self, i: usize, j: usize) -> f64 {
        match self.lattice.kind {
            LatticeKind::Chain => i.abs_diff(j) as f64,
            LatticeKind::Deformed2D => self.positions[i].distance(&self.positions[j]),
        }
    }

    /// Time-independent weight `φ_ij`, zero for uncoupled pairs and `i = j`.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        if !self.is_coupled(i, j) {
            return 0.0;
        }
        power_law(self.raw_distance(i, j), self.alpha)
    }

    /// `g_ij(t) = t·r_ij^(−α)` for pairs within range, otherwise 0.
    pub fn weight(&self, i: usize, j: usize, t: f64) -> Result<f64> {
        self.lattice.check_pair(i, j)?;
        Ok(self.coupling(i, j) * t)
    }

    pub fn materialize_weights(&self, t: f64) -> Result<DMatrix<f64>> {
        self.materialize_weights_capped(t, DENSE_WEIGHT_CAP)
    }

    pub fn materialize_weights_capped(&self, t: f64, cap: usize) -> Result<DMatrix<f64>> {
        let n = self.n_sites();
        if n > cap {
            return capacity(format!(
                "dense weight matrix for N = {n} exceeds the cap of {cap}; evaluate weights lazily"
            ));
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let g = self.coupling(i, j) * t;
                m[(i, j)] = g;
                m[(j, i)] = g;
            }
        }
        Ok(m)
    }
}

pub(crate) fn power_law(r: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        r.powf(-alpha)
    }
}
