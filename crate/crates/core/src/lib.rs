//! Weighted graph states generated by power-law Ising dynamics.
//!
//! A weighted graph state (WGS) is obtained by evolving `|+⟩^⊗N` under a
//! sum of commuting controlled-phase interactions `g_ij(t) = t·r_ij^(−α)`.
//! This crate builds such states on 1D chains and on angle-deformed 2D
//! lattices and measures their genuine multipartite entanglement through the
//! generalized geometric measure (GGM).
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: site coordinates, distances and power-law couplings.
//! - [`analytic`]: closed-form GGM from single-site reduced density
//!   matrices, evaluated in log space so that `N = 10⁶` chains are cheap.
//! - [`exact`]: dense state-vector oracle (`N ≤ 20`), brute-force GGM over
//!   all bipartitions and the σ_z measurement-reduction protocol.
//! - [`rdm`]: reduced density matrices of arbitrary site subsets without
//!   allocating `2^N` amplitudes.
//! - [`metrics`]: time derivatives, time averages, transition locators and
//!   saturation scans.
//! - [`cli`]: the `wgslab` command-line front end.
//!
//! ```
//! use wgslab::lattice::{CouplingModel, LatticeSpec, Range};
//! use wgslab::analytic::ggm_general;
//!
//! let chain = LatticeSpec::chain(50).unwrap();
//! let model = CouplingModel::new(chain, 1.0, Range::Full).unwrap();
//! let g = ggm_general(&model, std::f64::consts::PI);
//! assert!((g.value - 0.5).abs() < 1e-12);
//! ```

pub mod analytic;
pub mod cli;
pub mod error;
pub mod exact;
pub mod lattice;
mod linalg;
pub mod metrics;
pub mod rdm;

pub use error::{Error, Result};
