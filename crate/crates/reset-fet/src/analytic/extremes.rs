//! Laws of the maximum and minimum displacement up to the first exit.
//!
//! The joint law of the maximum with {exit at 0} is the left-exit
//! probability of the subinterval `(0, z)` — but only while the reset point
//! lies inside that subinterval. Once the level passes `x_reset` a reset
//! itself violates the extreme-value event, so the survival factor is the
//! plain killed-at-rate-r exit probability instead. Both branches glue
//! continuously at `z = x_reset`; simulation distinguishes them decisively
//! (the analytic continuation of the resetting formula across `x_reset` is
//! several standard errors off at n = 6e5).

use super::{exit_prob_left, exit_prob_right};
use crate::error::{Error, Result};
use crate::numeric::{eval_hyper_ratio, eval_sinh_ratio, HyperTerm, SinhTerm};
use crate::params::ResettingParams;

/// `P[M_x <= z, exit at 0]`: joint law of the running maximum and a
/// left-side exit. Zero for `z < x`, increasing to `exit_prob_left(x)`
/// at `z = b`.
pub fn max_exit_joint_cdf(params: &ResettingParams, x: f64, z: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    let (_, z) = params.translate_to_origin(z)?;
    if !(0.0 < x && x < p.b) {
        return Err(Error::domain(format!("start x = {x} must be interior")));
    }
    if z < x || z == 0.0 {
        return Ok(0.0);
    }
    let beta0_sq = p.mu * p.mu + 2.0 * p.r;
    if z >= p.x_reset {
        // exit-left probability of the interval (0, z)
        let num = [
            SinhTerm::new(1.0, 0.0, z - p.x_reset),
            SinhTerm::new(1.0, p.mu * (z - x), p.x_reset - x),
        ];
        let den = [
            SinhTerm::new(1.0, 0.0, z - p.x_reset),
            SinhTerm::new(1.0, z * p.mu, p.x_reset),
        ];
        Ok(eval_sinh_ratio(beta0_sq, &num, &den))
    } else {
        // level below the reset point: any reset ends the event, so the
        // motion is killed at rate r inside (0, z)
        let num = [SinhTerm::new(1.0, -p.mu * x, z - x)];
        let den = [SinhTerm::new(1.0, 0.0, z)];
        Ok(eval_sinh_ratio(beta0_sq, &num, &den))
    }
}

/// Conditional CDF of the maximum given exit at 0.
pub fn max_conditional_cdf(params: &ResettingParams, x: f64, z: f64) -> Result<f64> {
    let p0 = exit_prob_left(params, x)?;
    if p0 < 1e-14 {
        return Err(Error::DegenerateConditioning(format!(
            "exit-left probability {p0:.3e} too small to condition on"
        )));
    }
    Ok(max_exit_joint_cdf(params, x, z)? / p0)
}

/// Conditional density of the maximum given exit at 0, for a start at the
/// reset point (`x = x_reset`), where the derivative has a closed form.
///
/// Normalized to integrate to one over `[x_reset, b]`.
pub fn max_conditional_density_at_reset(params: &ResettingParams, z: f64) -> Result<f64> {
    let (p, z) = params.translate_to_origin(z)?;
    let x = p.x_reset;
    if z < x {
        return Err(Error::domain(format!("density support is [{}, {}], got z = {z}", x, p.b)));
    }
    let p0 = exit_prob_left(params, params.a + x)?;
    if p0 < 1e-14 {
        return Err(Error::DegenerateConditioning(format!(
            "exit-left probability {p0:.3e} too small to condition on"
        )));
    }
    let (mu, r) = (p.mu, p.r);
    if p.is_reset_free() {
        if p.is_undrifted() {
            // maximum of undrifted BM before hitting 0: joint density x/z^2
            return Ok(x / (z * z) / p0);
        }
        let joint = mu * (mu * x).sinh() * (-mu * x).exp() / (mu * z).sinh().powi(2);
        return Ok(joint / p0);
    }
    let beta0 = (mu * mu + 2.0 * r).sqrt();
    // d/dz of sinh((z-x)b0) / (sinh((z-x)b0) + e^{z mu} sinh(x b0)),
    // assembled as bounded ratios against the common denominator
    let base = [
        HyperTerm::sinh(1.0, 0.0, z - x),
        HyperTerm::sinh(1.0, z * mu, x),
    ];
    let t1 = eval_hyper_ratio(beta0, &[HyperTerm::sinh(1.0, z * mu, x)], &base);
    let bracket = [
        HyperTerm::cosh(beta0, 0.0, z - x),
        HyperTerm::sinh(-mu, 0.0, z - x),
    ];
    let t2 = eval_hyper_ratio(beta0, &bracket, &base);
    Ok(t1 * t2 / p0)
}

/// `P[m_x > z, exit at b]`: joint survival of the running minimum and a
/// right-side exit. Decreases from `exit_prob_right(x)` at `z = 0` to zero
/// at `z = x`.
pub fn min_exit_joint_survival(params: &ResettingParams, x: f64, z: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    let (_, z) = params.translate_to_origin(z)?;
    if !(0.0 < x && x < p.b) {
        return Err(Error::domain(format!("start x = {x} must be interior")));
    }
    if !(0.0..=x).contains(&z) {
        return Err(Error::domain(format!("level z = {z} outside [0, x = {x}]")));
    }
    if z == 0.0 {
        return exit_prob_right(params, params.a + x);
    }
    if z == x {
        return Ok(0.0);
    }
    let beta0_sq = p.mu * p.mu + 2.0 * p.r;
    if z <= p.x_reset {
        // exit-right probability of the interval (z, b)
        let num = [
            SinhTerm::new(1.0, (p.b - z) * p.mu, p.x_reset - z),
            SinhTerm::new(-1.0, p.mu * (p.b - x), p.x_reset - x),
        ];
        let den = [
            SinhTerm::new(1.0, 0.0, p.b - p.x_reset),
            SinhTerm::new(1.0, (p.b - z) * p.mu, p.x_reset - z),
        ];
        Ok(eval_sinh_ratio(beta0_sq, &num, &den))
    } else {
        // level above the reset point: killed at rate r inside (z, b)
        let num = [SinhTerm::new(1.0, p.mu * (p.b - x), x - z)];
        let den = [SinhTerm::new(1.0, 0.0, p.b - z)];
        Ok(eval_sinh_ratio(beta0_sq, &num, &den))
    }
}

/// Conditional survival function of the minimum given exit at b.
pub fn min_conditional_survival(params: &ResettingParams, x: f64, z: f64) -> Result<f64> {
    let pb = exit_prob_right(params, x)?;
    if pb < 1e-14 {
        return Err(Error::DegenerateConditioning(format!(
            "exit-right probability {pb:.3e} too small to condition on"
        )));
    }
    Ok(min_exit_joint_survival(params, x, z)? / pb)
}
