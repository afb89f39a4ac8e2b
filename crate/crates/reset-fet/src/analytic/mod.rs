//! Closed-form expressions: exit probabilities, Laplace transforms of the
//! survival function and the first-exit time, FET moments, FEA moments
//! (undrifted), the joint tau-area moment, and max/min displacement laws.
//!
//! Every operation accepts parameters on a general interval `(a, b)` and
//! immediately shifts to `(0, b - a)`, so the formulas are coded once.
//! When `r` or `mu` is (numerically) zero the general expressions that would
//! degenerate to 0/0 are dispatched to their explicit limit forms.

mod extremes;
mod fea;

pub use extremes::{
    max_conditional_cdf, max_conditional_density_at_reset, max_exit_joint_cdf,
    min_conditional_survival, min_exit_joint_survival,
};
pub use fea::{
    cov_tau_area_undrifted, fea_mean_constants, fea_mean_undrifted, fea_moments_undrifted,
    fea_second_moment_constants, fea_second_moment_undrifted, joint_moment_parts,
    joint_moment_tau_area_undrifted, FeaMeanConstants, FeaSecondMomentConstants, JointMomentParts,
};

use crate::error::{Error, Result};
use crate::numeric::diff::nth_derivative;
use crate::numeric::{
    eval_hyper_ratio, eval_sinh_ratio, eval_sinh_ratio_complex, CSinhTerm, HyperTerm, SinhTerm,
};
use crate::params::ResettingParams;
use num_complex::Complex64;

/// First and second moment with the variance they imply.
#[derive(Debug, Clone, Copy)]
pub struct MomentSet {
    pub mean: f64,
    pub second: f64,
    pub variance: f64,
}

impl MomentSet {
    fn new(mean: f64, second: f64) -> Result<Self> {
        let variance = second - mean * mean;
        if variance < -1e-9 * second.abs().max(1.0) {
            return Err(Error::numerical(format!(
                "inconsistent moments: second {second} < mean^2 {}",
                mean * mean
            )));
        }
        Ok(Self { mean, second, variance: variance.max(0.0) })
    }
}

/// Exit-side probabilities from the two ends of the interval.
#[derive(Debug, Clone, Copy)]
pub struct ExitLaw {
    pub p_left: f64,
    pub p_right: f64,
}

fn check_position(x: f64, b: f64) -> Result<()> {
    if !(0.0..=b).contains(&x) {
        return Err(Error::domain(format!("position x = {x} outside [0, {b}]")));
    }
    Ok(())
}

/// Probability that the first exit happens through the left end.
///
/// At `r = 0` this reduces to the classical drifted-BM hitting probability
/// `(e^{2(b-x)mu} - 1) / (e^{2 b mu} - 1)`, and further to `(b - x)/b` when
/// also `mu = 0`.
pub fn exit_prob_left(params: &ResettingParams, x: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    let b = p.b;
    if p.is_reset_free() {
        if p.is_undrifted() {
            return Ok((b - x) / b);
        }
        // expm1 keeps the ratio accurate for small and large drift alike
        return Ok((2.0 * (b - x) * p.mu).exp_m1() / (2.0 * b * p.mu).exp_m1());
    }
    let beta0_sq = p.mu * p.mu + 2.0 * p.r;
    let num = [
        SinhTerm::new(1.0, 0.0, b - p.x_reset),
        SinhTerm::new(1.0, p.mu * (b - x), p.x_reset - x),
    ];
    let den = [
        SinhTerm::new(1.0, 0.0, b - p.x_reset),
        SinhTerm::new(1.0, b * p.mu, p.x_reset),
    ];
    Ok(eval_sinh_ratio(beta0_sq, &num, &den))
}

/// Probability that the first exit happens through the right end.
pub fn exit_prob_right(params: &ResettingParams, x: f64) -> Result<f64> {
    Ok(1.0 - exit_prob_left(params, x)?)
}

/// Both exit-side probabilities.
pub fn exit_law(params: &ResettingParams, x: f64) -> Result<ExitLaw> {
    let p_left = exit_prob_left(params, x)?;
    Ok(ExitLaw { p_left, p_right: 1.0 - p_left })
}

/// Term lists for `M(x, lambda)` as a ratio; `lambda` enters linearly in
/// the coefficients, so the same lists serve real and complex arguments.
fn fet_lt_terms(p: &ResettingParams, x: f64) -> ([(f64, f64, f64); 4], [(f64, f64, f64); 3]) {
    let (b, mu, r, xr) = (p.b, p.mu, p.r, p.x_reset);
    // entries: (lambda multiplier flag as coeff split below)
    // numerator: r-terms + lambda-terms; denominator: lambda sinh(b beta) + r-terms
    let num = [
        (r, -(b + xr) * mu, b - xr),
        (r, -xr * mu, xr),
        (f64::NAN, -(b + x) * mu, b - x), // NAN marks "coefficient lambda"
        (f64::NAN, -mu * x, x),
    ];
    let den = [
        (f64::NAN, -b * mu, b),
        (r, -(b + xr) * mu, b - xr),
        (r, -xr * mu, xr),
    ];
    (num, den)
}

/// Laplace transform `M(x, lambda) = E[e^{-lambda tau(x)}]`.
///
/// Valid for every `lambda` to the right of the transform's leftmost
/// singularity; in particular in a two-sided neighborhood of 0, which the
/// moment extraction relies on.
pub fn fet_lt(params: &ResettingParams, x: f64, lambda: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    let beta_sq = p.mu * p.mu + 2.0 * (lambda + p.r);
    if p.is_reset_free() {
        // lambda cancels between numerator and denominator
        let num = [
            SinhTerm::new(1.0, -(p.b + x) * p.mu, p.b - x),
            SinhTerm::new(1.0, -p.mu * x, x),
        ];
        let den = [SinhTerm::new(1.0, -p.b * p.mu, p.b)];
        return Ok(eval_sinh_ratio(beta_sq, &num, &den));
    }
    let (num, den) = fet_lt_terms(&p, x);
    let subst = |(c, e, f): (f64, f64, f64)| {
        SinhTerm::new(if c.is_nan() { lambda } else { c }, e, f)
    };
    let num: Vec<SinhTerm> = num.into_iter().map(subst).collect();
    let den: Vec<SinhTerm> = den.into_iter().map(subst).collect();
    Ok(eval_sinh_ratio(beta_sq, &num, &den))
}

/// `M(x, s)` at a complex argument (used by contour inversion).
pub fn fet_lt_complex(params: &ResettingParams, x: f64, s: Complex64) -> Result<Complex64> {
    let (p, x) = params.translate_to_origin(x)?;
    let beta_sq = Complex64::new(p.mu * p.mu + 2.0 * p.r, 0.0) + 2.0 * s;
    if p.is_reset_free() {
        let num = [
            CSinhTerm::new(Complex64::new(1.0, 0.0), -(p.b + x) * p.mu, p.b - x),
            CSinhTerm::new(Complex64::new(1.0, 0.0), -p.mu * x, x),
        ];
        let den = [CSinhTerm::new(Complex64::new(1.0, 0.0), -p.b * p.mu, p.b)];
        return Ok(eval_sinh_ratio_complex(beta_sq, &num, &den));
    }
    let (num, den) = fet_lt_terms(&p, x);
    let subst = |(c, e, f): (f64, f64, f64)| {
        CSinhTerm::new(if c.is_nan() { s } else { Complex64::new(c, 0.0) }, e, f)
    };
    let num: Vec<CSinhTerm> = num.into_iter().map(subst).collect();
    let den: Vec<CSinhTerm> = den.into_iter().map(subst).collect();
    Ok(eval_sinh_ratio_complex(beta_sq, &num, &den))
}

/// Laplace transform of the survival function, `(1 - M(x, lambda)) / lambda`.
///
/// Evaluated through its own sinh-sum ratio rather than the difference, so
/// no accuracy is lost as `lambda -> 0`.
pub fn survival_lt(params: &ResettingParams, x: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::domain(format!("survival transform needs lambda > 0, got {lambda}")));
    }
    let (p, x) = params.translate_to_origin(x)?;
    let (b, mu, r, xr) = (p.b, p.mu, p.r, p.x_reset);
    let beta_sq = mu * mu + 2.0 * (lambda + r);
    let num = [
        SinhTerm::new(1.0, -b * mu, b),
        SinhTerm::new(-1.0, -(b + x) * mu, b - x),
        SinhTerm::new(-1.0, -mu * x, x),
    ];
    let den = [
        SinhTerm::new(lambda, -b * mu, b),
        SinhTerm::new(r, -(b + xr) * mu, b - xr),
        SinhTerm::new(r, -xr * mu, xr),
    ];
    Ok(eval_sinh_ratio(beta_sq, &num, &den))
}

/// Expected first-exit time.
pub fn fet_mean(params: &ResettingParams, x: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    let (b, mu, r, xr) = (p.b, p.mu, p.r, p.x_reset);
    check_position(x, b)?;
    if p.is_reset_free() {
        if p.is_undrifted() {
            return Ok(x * (b - x));
        }
        return Ok((b * (-2.0 * mu * x).exp_m1() / (-2.0 * mu * b).exp_m1() - x) / mu);
    }
    let beta0_sq = mu * mu + 2.0 * r;
    let num = [
        SinhTerm::new(1.0, -b * mu, b),
        SinhTerm::new(-1.0, -mu * x, x),
        SinhTerm::new(-1.0, -(b + x) * mu, b - x),
    ];
    let den = [
        SinhTerm::new(r, -xr * mu, xr),
        SinhTerm::new(r, -(b + xr) * mu, b - xr),
    ];
    Ok(eval_sinh_ratio(beta0_sq, &num, &den))
}

/// Second moment of the first-exit time.
///
/// The general expression follows from differentiating the survival
/// transform at `lambda = 0`. (The factor `cosh((b - x_R) beta_0)` in the
/// second summand is what that differentiation produces; transcriptions
/// replacing it by `cosh(x_R beta_0)` fail the finite-difference and
/// simulation oracles by percents.)
pub fn fet_second_moment(params: &ResettingParams, x: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    let (b, mu, r, xr) = (p.b, p.mu, p.r, p.x_reset);
    check_position(x, b)?;
    if p.is_reset_free() {
        if p.is_undrifted() {
            // limit of the resetting expression; solves u'' = -4x(b-x)
            return Ok(x / 3.0 * (b * b * b - 2.0 * b * x * x + x * x * x));
        }
        // no printed closed form for the drifted no-reset case: use the
        // transform derivative, which the trig branch makes well-posed
        return fet_moment_numeric(params, x + params.a, 2);
    }
    let beta0 = (mu * mu + 2.0 * r).sqrt();
    let s0 = [
        HyperTerm::sinh(1.0, -xr * mu, xr),
        HyperTerm::sinh(1.0, -(b + xr) * mu, b - xr),
    ];
    let w = [
        HyperTerm::sinh(1.0, -mu * b, b),
        HyperTerm::sinh(-1.0, -mu * x, x),
        HyperTerm::sinh(-1.0, -(b + x) * mu, b - x),
    ];
    let f = [
        HyperTerm::sinh(1.0, -mu * b, b),
        HyperTerm::cosh(r / beta0 * xr, -mu * xr, xr),
        HyperTerm::cosh(r / beta0 * (b - xr), -(b + xr) * mu, b - xr),
    ];
    let c = [
        HyperTerm::cosh(b, -mu * b, b),
        HyperTerm::cosh(-x, -mu * x, x),
        HyperTerm::cosh(-(b - x), -(b + x) * mu, b - x),
    ];
    let w_over_s0 = eval_hyper_ratio(beta0, &w, &s0);
    let f_over_s0 = eval_hyper_ratio(beta0, &f, &s0);
    let c_over_s0 = eval_hyper_ratio(beta0, &c, &s0);
    Ok(2.0 / (r * r) * w_over_s0 * f_over_s0 - 2.0 / (beta0 * r) * c_over_s0)
}

/// Mean and second moment of the FET, with variance.
pub fn fet_moments(params: &ResettingParams, x: f64) -> Result<MomentSet> {
    MomentSet::new(fet_mean(params, x)?, fet_second_moment(params, x)?)
}

/// n-th FET moment as `(-1)^n d^n M / d lambda^n` at 0, by Richardson-
/// extrapolated central differences (n in 1..=4).
pub fn fet_moment_numeric(params: &ResettingParams, x: f64, n: u32) -> Result<f64> {
    if !(1..=4).contains(&n) {
        return Err(Error::domain(format!("moment order {n} not in 1..=4")));
    }
    params.translate_to_origin(x)?;
    // scale the step so evaluations stay inside the transform's analyticity
    // strip: the leftmost pole sits at lambda <= -(r + mu^2/2 + pi^2/(2 b^2))
    // for every x, and the central mean sets the curvature scale.
    let mid = params.a + 0.5 * params.width();
    let scale = fet_mean(params, mid)?.max(1e-12);
    let base = if n <= 2 { 0.16 } else { 0.32 };
    let h0 = (base / 1.0_f64.max(4.0 * scale))
        .min(0.25 * (params.r + std::f64::consts::PI.powi(2) / (2.0 * params.width().powi(2))));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let d = nth_derivative(
        |lam| fet_lt(params, x, lam),
        0.0,
        n,
        h0,
        6,
        1e-4,
    )?;
    Ok(sign * d)
}
