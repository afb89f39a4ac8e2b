//! First-exit-area moments and the joint tau-area moment, for undrifted
//! motion (`mu = 0`). The drifted closed forms are out of scope; the
//! simulation and BVP engines cover that regime.

use super::{fet_mean, MomentSet};
use crate::error::{Error, Result};
use crate::params::ResettingParams;

fn require_undrifted(p: &ResettingParams, what: &str) -> Result<()> {
    if !p.is_undrifted() {
        return Err(Error::domain(format!(
            "{what} is only available in closed form for mu = 0 (got mu = {})",
            p.mu
        )));
    }
    Ok(())
}

fn check_position(x: f64, b: f64) -> Result<()> {
    if !(0.0..=b).contains(&x) {
        return Err(Error::domain(format!("position x = {x} outside [0, {b}]")));
    }
    Ok(())
}

/// Coefficients of `E[A(x)] = c1 e^{-x sqrt(2r)} + c2 e^{x sqrt(2r)} + x/r + c3`.
///
/// `c3` equals `E[A(x_R)]`.
#[derive(Debug, Clone, Copy)]
pub struct FeaMeanConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Constants of the second-moment expression; `at_reset` is `E[A^2(x_R)]`.
#[derive(Debug, Clone, Copy)]
pub struct FeaSecondMomentConstants {
    pub d1: f64,
    pub d2: f64,
    pub at_reset: f64,
}

/// The `c_i` of the area-mean expression (requires `mu = 0`, `r > 0`).
pub fn fea_mean_constants(params: &ResettingParams) -> Result<FeaMeanConstants> {
    let (p, _) = params.translate_to_origin(params.a)?;
    require_undrifted(&p, "fea_mean_constants")?;
    if p.is_reset_free() {
        return Err(Error::domain("area-mean constants need r > 0"));
    }
    Ok(fea_mean_constants_inner(p.r, p.x_reset, p.b))
}

fn fea_mean_constants_inner(r: f64, xr: f64, b: f64) -> FeaMeanConstants {
    let s = (2.0 * r).sqrt();
    let c3 = (xr * (b * s).sinh() - b * (xr * s).sinh())
        / (r * (((b - xr) * s).sinh() + (xr * s).sinh()));
    let c1 = (b / r - c3 * (b * s).exp_m1()) / (2.0 * (b * s).sinh());
    let c2 = (-b / r - c3 * (-(-b * s).exp_m1())) / (2.0 * (b * s).sinh());
    FeaMeanConstants { c1, c2, c3 }
}

fn fea_mean_inner(r: f64, xr: f64, b: f64, x: f64) -> f64 {
    let s = (2.0 * r).sqrt();
    let c = fea_mean_constants_inner(r, xr, b);
    c.c1 * (-x * s).exp() + c.c2 * (x * s).exp() + x / r + c.c3
}

/// Expected first-exit area for `mu = 0`.
///
/// At `r = 0` the defining problem integrates to `x (b^2 - x^2) / 3`.
pub fn fea_mean_undrifted(params: &ResettingParams, x: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    require_undrifted(&p, "fea_mean_undrifted")?;
    check_position(x, p.b)?;
    if p.is_reset_free() {
        return Ok(x * (p.b * p.b - x * x) / 3.0);
    }
    Ok(fea_mean_inner(p.r, p.x_reset, p.b, x))
}

fn fea_second_constants_inner(r: f64, xr: f64, b: f64) -> FeaSecondMomentConstants {
    let s = (2.0 * r).sqrt();
    let c = fea_mean_constants_inner(r, xr, b);
    let (c1, c2, c3) = (c.c1, c.c2, c.c3);
    let r3 = r * r * r;
    // d1 = a + bb * v with v = E[A^2(x_R)]; the self-consistency at x_R
    // closes a 2x2 linear system in (d1, v).
    let a = ((-b * s).exp() * (c1 / s) * (b * b + b / s)
        - (b * s).exp() * (c2 / s) * (b * b - b / s)
        - 2.0 / r3 * (b * s).exp_m1()
        + 2.0 * b * b / (r * r)
        + 2.0 * c3 * b / r)
        / (2.0 * (b * s).sinh());
    let bb = -(b * s).exp_m1() / (2.0 * (b * s).sinh());
    let g = (-xr * s).exp() * (c1 / s) * (xr * xr + xr / s)
        - (xr * s).exp() * (c2 / s) * (xr * xr - xr / s)
        - 2.0 / r3 * (xr * s).exp()
        + 2.0 * xr * xr / (r * r)
        + 2.0 * c3 * xr / r
        + 2.0 / r3;
    let sh = (xr * s).sinh() * (-xr * s).exp();
    let at_reset = (g - 2.0 * a * (xr * s).sinh()) * (-xr * s).exp() / (1.0 + 2.0 * bb * sh);
    let d1 = a + bb * at_reset;
    let d2 = -2.0 / r3 - at_reset - d1;
    FeaSecondMomentConstants { d1, d2, at_reset }
}

fn fea_second_inner(r: f64, xr: f64, b: f64, x: f64) -> f64 {
    let s = (2.0 * r).sqrt();
    let c = fea_mean_constants_inner(r, xr, b);
    let d = fea_second_constants_inner(r, xr, b);
    (-x * s).exp() * (d.d1 + (c.c1 / s) * (x * x + x / s))
        + (x * s).exp() * (d.d2 - (c.c2 / s) * (x * x - x / s))
        + 2.0 * x * x / (r * r)
        + 2.0 * c.c3 * x / r
        + 2.0 / (r * r * r)
        + d.at_reset
}

/// The `d_i` and `E[A^2(x_R)]` of the second-moment expression
/// (requires `mu = 0`, `r > 0`).
pub fn fea_second_moment_constants(params: &ResettingParams) -> Result<FeaSecondMomentConstants> {
    let (p, _) = params.translate_to_origin(params.a)?;
    require_undrifted(&p, "fea_second_moment_constants")?;
    if p.is_reset_free() {
        return Err(Error::domain("area second-moment constants need r > 0"));
    }
    Ok(fea_second_constants_inner(p.r, p.x_reset, p.b))
}

/// Second moment of the first-exit area for `mu = 0`.
///
/// The closed-form expression is undefined at `r = 0`; requests there are
/// answered by Richardson extrapolation of the expression down an `r`-ladder.
/// (Direct evaluation below `r ~ 1e-3/b^2` would be swamped by the `2/r^3`
/// cancellations, so the ladder starts well above that.)
pub fn fea_second_moment_undrifted(params: &ResettingParams, x: f64) -> Result<f64> {
    let (p, x) = params.translate_to_origin(x)?;
    require_undrifted(&p, "fea_second_moment_undrifted")?;
    check_position(x, p.b)?;
    if !p.is_reset_free() {
        return Ok(fea_second_inner(p.r, p.x_reset, p.b, x));
    }
    // r -> 0 limit by extrapolation in r (error expansion in powers of r b^2)
    let b2 = p.b * p.b;
    let ladder = [0.08 / b2, 0.04 / b2, 0.02 / b2, 0.01 / b2];
    let v: Vec<f64> = ladder
        .iter()
        .map(|&r| fea_second_inner(r, p.x_reset, p.b, x))
        .collect();
    let t1: Vec<f64> = (0..3).map(|i| 2.0 * v[i + 1] - v[i]).collect();
    let t2: Vec<f64> = (0..2).map(|i| (4.0 * t1[i + 1] - t1[i]) / 3.0).collect();
    let t3 = (8.0 * t2[1] - t2[0]) / 7.0;
    let scale = t3.abs().max(1e-12);
    if (t3 - t2[1]).abs() > 1e-5 * scale {
        return Err(Error::numerical(format!(
            "r -> 0 extrapolation of E[A^2] unstable: last correction {:.3e} on scale {scale:.3e}",
            (t3 - t2[1]).abs()
        )));
    }
    Ok(t3)
}

/// Mean and second moment of the FEA (`mu = 0`), with variance.
pub fn fea_moments_undrifted(params: &ResettingParams, x: f64) -> Result<MomentSet> {
    MomentSet::new(
        fea_mean_undrifted(params, x)?,
        fea_second_moment_undrifted(params, x)?,
    )
}

/// Intermediates of the joint-moment expression `V(x) = E[tau(x) A(x)]`:
/// the denominators `D_i`, the homogeneous coefficients `beta_i` and the
/// self-consistent value `V(x_R)`, with the particular-solution functions
/// `C_1`, `C_2` exposed for layered verification.
#[derive(Debug, Clone)]
pub struct JointMomentParts {
    r: f64,
    b: f64,
    c: FeaMeanConstants,
    pub d1: f64,
    pub d2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub v_reset: f64,
}

impl JointMomentParts {
    /// Coefficient function multiplying `e^{-x sqrt(2r)}`.
    ///
    /// Twice the published display: the published prefactor `1/(2 sqrt(2r))`
    /// yields exactly half the solution of the defining boundary-value
    /// problem at every x, so the corrected prefactor `1/sqrt(2r)` is used.
    pub fn c1(&self, x: f64) -> f64 {
        let s = (2.0 * self.r).sqrt();
        let r = self.r;
        let ratio = self.d2 / self.d1 + 1.0 / r;
        ((x * s).exp() * ((x / s - 1.0 / (2.0 * r)) * ratio + self.c.c3 / s)
            + (1.0 - (self.b * s).exp()) / (4.0 * self.d1) * x * x
            + self.c.c1 * x
            + (2.0 * x * s).exp()
                * (((-self.b * s).exp() - 1.0) / (8.0 * self.d1) * (2.0 * x / s - 1.0 / (2.0 * r))
                    + self.c.c2 / (2.0 * s)))
            / s
    }

    /// Coefficient function multiplying `e^{x sqrt(2r)}`.
    pub fn c2(&self, x: f64) -> f64 {
        let s = (2.0 * self.r).sqrt();
        let r = self.r;
        let ratio = self.d2 / self.d1 + 1.0 / r;
        ((-x * s).exp() * ((x / s + 1.0 / (2.0 * r)) * ratio + self.c.c3 / s)
            + (1.0 - (-self.b * s).exp()) / (4.0 * self.d1) * x * x
            - self.c.c2 * x
            + (-2.0 * x * s).exp()
                * ((1.0 - (self.b * s).exp()) / (2.0 * self.d1) * (x / (2.0 * s) + 1.0 / (8.0 * r))
                    + self.c.c1 / (2.0 * s)))
            / s
    }

    /// `V(x)` assembled from the parts.
    pub fn eval(&self, x: f64) -> f64 {
        let s = (2.0 * self.r).sqrt();
        (self.c1(x) + self.beta1) * (-x * s).exp()
            + (self.c2(x) + self.beta2) * (x * s).exp()
            + self.v_reset
    }
}

/// Build the joint-moment intermediates (requires `mu = 0`, `r > 0`).
pub fn joint_moment_parts(params: &ResettingParams) -> Result<JointMomentParts> {
    let (p, _) = params.translate_to_origin(params.a)?;
    require_undrifted(&p, "joint_moment_tau_area_undrifted")?;
    if p.is_reset_free() {
        return Err(Error::domain("the joint-moment closed form needs r > 0"));
    }
    let (r, xr, b) = (p.r, p.x_reset, p.b);
    let s = (2.0 * r).sqrt();
    let d1 = r * ((xr * s).sinh() + ((b - xr) * s).sinh());
    let d2 = (b * s).sinh();
    let mut parts = JointMomentParts {
        r,
        b,
        c: fea_mean_constants_inner(r, xr, b),
        d1,
        d2,
        beta1: 0.0,
        beta2: 0.0,
        v_reset: 0.0,
    };
    let (c1_0, c2_0) = (parts.c1(0.0), parts.c2(0.0));
    let (c1_b, c2_b) = (parts.c1(b), parts.c2(b));
    let (c1_xr, c2_xr) = (parts.c1(xr), parts.c2(xr));
    let sh = (xr * s).sinh() / (b * s).sinh();
    let v_reset = (c1_xr * (-2.0 * xr * s).exp() + c2_xr
        - c1_b * sh * (-(xr + b) * s).exp()
        - sh * ((b - xr) * s).exp() * (c2_b - c1_0 - c2_0)
        - c1_0
        - c2_0)
        / (1.0 - sh * (b * s).exp_m1() * (-xr * s).exp());
    let beta1 = -(v_reset * (b * s).exp_m1() - c1_b * (-b * s).exp() - (c2_b - c1_0 - c2_0) * (b * s).exp())
        / (2.0 * (b * s).sinh());
    let beta2 = -v_reset - c1_0 - c2_0 - beta1;
    parts.v_reset = v_reset;
    parts.beta1 = beta1;
    parts.beta2 = beta2;
    Ok(parts)
}

/// Joint moment `E[tau(x) A(x)]` for `mu = 0`, `r > 0`.
pub fn joint_moment_tau_area_undrifted(params: &ResettingParams, x: f64) -> Result<f64> {
    let (p, xs) = params.translate_to_origin(x)?;
    check_position(xs, p.b)?;
    let parts = joint_moment_parts(params)?;
    Ok(parts.eval(xs))
}

/// `Cov[tau(x), A(x)] = E[tau A] - E[tau] E[A]` for `mu = 0`, `r > 0`.
pub fn cov_tau_area_undrifted(params: &ResettingParams, x: f64) -> Result<f64> {
    let v = joint_moment_tau_area_undrifted(params, x)?;
    Ok(v - fet_mean(params, x)? * fea_mean_undrifted(params, x)?)
}
