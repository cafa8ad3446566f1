//! Open-system dynamics of a macroscopic two-level qubit coupled to two
//! independent vacuum bosonic reservoirs, computed by second-order
//! time-dependent perturbation theory.
//!
//! The crate is layered bottom-up:
//!
//! * [`model`] holds the two-level system, the spectral densities and the
//!   continuum contraction rule.
//! * [`quad`] and [`bath`] are the numerical engine for semi-infinite,
//!   principal-value, oscillatory and double bath integrals.
//! * [`stationary`] and [`dynamics`] build shifts, rates, amplitudes,
//!   `P_R(t)` and the two-time correlation function.
//! * [`fit`] and [`scan`] post-process time series.
//! * [`device`] estimates `h` and `Δ` for a flux qubit.
//! * [`config`] and [`output`] back the command-line front end.

pub mod bath;
pub mod config;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod model;
pub mod output;
pub mod quad;
pub mod scan;
pub mod stationary;

pub use error::{Error, Result};
pub use model::{ReservoirSpec, SystemParams, TwoLevelSystem};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
