//! Pseudo-spectral laboratory for the nonlinear Schrödinger equation
//! `i u_t + Δu + λ|u|^α u = 0` on a periodic box, built for verification
//! work: evolve an initial profile, measure conserved and weighted-norm
//! observables, extract the large-time free-evolution profile, and check
//! the measured behaviour against structural predictions (conservation
//! laws, variance polynomials, decay rates, moment orderings).
//!
//! Entry points:
//!
//! * [`grid`]: periodic grids, fields, Fourier transforms, spectral
//!   derivatives;
//! * [`dynamics`]: the split-step evolution loop with boundary and
//!   resolution guards;
//! * [`functionals`]: per-snapshot observable records and closed-form
//!   exponents;
//! * [`oracles`]: exact Gaussian free evolution and variance polynomials
//!   used as independent references;
//! * [`scattering`]: pullback to the free frame, profile extraction,
//!   deviation tracking and power-law fits;
//! * [`verifier`]: structured pass/fail/inconclusive checks over a
//!   completed run;
//! * [`config`], [`report`], [`snapshot`], [`run`]: experiment
//!   configuration, CSV/manifest output, binary field snapshots, and the
//!   run/verify/sweep drivers behind the `nlslab` binary.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod oracles;
pub mod report;
pub mod run;
pub mod scattering;
pub mod snapshot;
pub mod verifier;

pub use error::{Error, Result};
