//! Continuous-time quantum and classical walks on long-range interacting
//! cycles `G(N, m)`: a ring of `N` nodes where every node is also bonded to
//! the nodes `m` steps away.
//!
//! The Hamiltonian of `G(N, m)` is circulant, so everything about the
//! untrapped dynamics follows from the Bloch dispersion
//! `E(θ) = 4 − 2cos θ − 2cos mθ` sampled at `θ_n = 2πn/N`. The crate
//! provides:
//!
//! * [`lattice`]: graph construction and parameter validation,
//! * [`spectral`]: the analytic eigensystem and its degeneracy classes,
//! * [`transport`]: transition and return probabilities, continuum limits,
//!   long-time averages, the even-N asymmetry and power-law fitting,
//! * [`asymptotics`]: stationary points of the dispersion and the
//!   stationary-phase estimates of the return probabilities,
//! * [`trapping`]: absorbing traps, survival probabilities and ensembles,
//! * [`expm`]: the dense matrix exponential the trapping code relies on.

pub mod asymptotics;
pub mod error;
pub mod expm;
pub mod lattice;
pub mod numeric;
pub mod spectral;
pub mod transport;
pub mod trapping;

pub use error::{Error, Result};
pub use lattice::{CycleSpec, Hamiltonian};
pub use spectral::Spectrum;
