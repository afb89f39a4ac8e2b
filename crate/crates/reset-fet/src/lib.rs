//! First-exit problems for drifted Brownian motion with Poissonian resetting
//! on an interval.
//!
//! The crate computes, in closed form, the exit-side probabilities, the
//! Laplace transforms of the survival function and of the first-exit time
//! (FET), FET moments, first-exit-area (FEA) moments and the joint tau-area
//! moment for the undrifted case, and the laws of the maximum and minimum
//! displacement up to the exit ([`analytic`]). It also solves the inverse
//! first-exit-time problem — find a law for the random start that produces a
//! prescribed FET transform ([`ifet`]).
//!
//! Three independent engines verify every closed form:
//!
//! * [`bvp`] — a finite-difference solver for the nonlocal two-point
//!   boundary-value problems the quantities satisfy,
//! * [`laplace`] — numerical transform inversion (real-axis and contour)
//!   producing time-domain densities and CDFs,
//! * [`montecarlo`] — exact-event-time path simulation with Brownian-bridge
//!   crossing corrections and reproducible parallel streams.

pub mod analytic;
pub mod bvp;
pub mod error;
pub mod ifet;
pub mod laplace;
pub mod montecarlo;
pub mod numeric;
pub mod params;

pub use error::{Error, Result};
pub use params::{ResettingParams, SpectralHelpers};
