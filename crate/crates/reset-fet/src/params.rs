//! Parameter records, validation and interval translation.
//!
//! The process is `X(t) = x + mu*t + W(t)` between resets; at the epochs of a
//! rate-`r` Poisson process it jumps instantly to `x_reset`. The diffusion
//! coefficient is fixed to one (unit-diffusion scaling), so positions and
//! times are plain `f64` with no enforced unit system.
//!
//! All closed forms in this crate are coded for the interval `(0, b)`. A
//! general interval `(a, b)` is handled by [`ResettingParams::translate_to_origin`]:
//! every quantity on `(a, b)` equals its translate on `(0, b - a)`, which is
//! lossless.

use crate::error::{Error, Result};

/// Parameters of drifted Brownian motion with Poissonian resetting on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResettingParams {
    /// Drift of the underlying Brownian motion.
    pub mu: f64,
    /// Reset rate (>= 0). `r = 0` means no resetting; operations route it
    /// to the explicit no-resetting limit formulas.
    pub r: f64,
    /// Reset position, strictly inside `(a, b)`.
    pub x_reset: f64,
    /// Left boundary.
    pub a: f64,
    /// Right boundary.
    pub b: f64,
}

/// The square-root combinations that appear in every transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralHelpers {
    /// `sqrt(2 (lambda + r))`
    pub alpha_lambda: f64,
    /// `sqrt(mu^2 + 2 (lambda + r))`
    pub beta_lambda: f64,
    /// `sqrt(mu^2 + 2 r)` (`beta_lambda` at `lambda = 0`)
    pub beta0: f64,
}

/// Treat `|r|` or `|mu|` below this as exactly zero when dispatching to
/// limit formulas (the general expressions degenerate to 0/0 there).
pub const LIMIT_DISPATCH_EPS: f64 = 1e-12;

impl ResettingParams {
    /// Build and validate a parameter record on a general interval `(a, b)`.
    pub fn new(mu: f64, r: f64, x_reset: f64, a: f64, b: f64) -> Result<Self> {
        Self { mu, r, x_reset, a, b }.validated()
    }

    /// Build and validate a record on `(0, b)`.
    pub fn unit_interval(mu: f64, r: f64, x_reset: f64, b: f64) -> Result<Self> {
        Self::new(mu, r, x_reset, 0.0, b)
    }

    /// Check every invariant, naming the violated one on failure.
    pub fn validated(self) -> Result<Self> {
        let Self { mu, r, x_reset, a, b } = self;
        for (name, v) in [("mu", mu), ("r", r), ("x_reset", x_reset), ("a", a), ("b", b)] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} = {v} is not finite")));
            }
        }
        if !(a < b) {
            return Err(Error::domain(format!("interval requires a < b, got a = {a}, b = {b}")));
        }
        if !(a < x_reset && x_reset < b) {
            return Err(Error::domain(format!(
                "x_reset = {x_reset} must lie strictly inside ({a}, {b})"
            )));
        }
        if r < 0.0 {
            return Err(Error::domain(format!("reset rate r = {r} must be >= 0")));
        }
        Ok(self)
    }

    /// Interval width `b - a`.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Whether the no-resetting limit formulas apply.
    pub fn is_reset_free(&self) -> bool {
        self.r.abs() < LIMIT_DISPATCH_EPS
    }

    /// Whether the undrifted formulas apply.
    pub fn is_undrifted(&self) -> bool {
        self.mu.abs() < LIMIT_DISPATCH_EPS
    }

    /// Shift the interval so that `a = 0`, carrying a position with it.
    ///
    /// Returns the shifted record `(mu, r, x_reset - a, 0, b - a)` together
    /// with `x - a`. Applying this to an already-shifted record is the
    /// identity. Errors if `x` lies outside `[a, b]`.
    pub fn translate_to_origin(&self, x: f64) -> Result<(Self, f64)> {
        if !(self.a..=self.b).contains(&x) {
            return Err(Error::domain(format!(
                "position x = {x} outside [{}, {}]",
                self.a, self.b
            )));
        }
        let shifted = Self {
            mu: self.mu,
            r: self.r,
            x_reset: self.x_reset - self.a,
            a: 0.0,
            b: self.b - self.a,
        };
        Ok((shifted, x - self.a))
    }

    /// Spectral helper quantities at transform argument `lambda`.
    ///
    /// Real and positive for `lambda > -r`; the transform evaluators handle
    /// `beta_lambda^2 < 0` separately through their trigonometric branch.
    pub fn spectral(&self, lambda: f64) -> SpectralHelpers {
        SpectralHelpers {
            alpha_lambda: (2.0 * (lambda + self.r)).sqrt(),
            beta_lambda: (self.mu * self.mu + 2.0 * (lambda + self.r)).sqrt(),
            beta0: (self.mu * self.mu + 2.0 * self.r).sqrt(),
        }
    }
}
