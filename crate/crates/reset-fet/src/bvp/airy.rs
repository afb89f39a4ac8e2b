//! Airy functions Ai, Bi and their derivatives on the real line.
//!
//! Maclaurin series for `|x| <= 6`, asymptotic expansions beyond. The series
//! loses `exp(4/3 x^{3/2})` digits to cancellation for Ai at positive
//! arguments, which at the switchover radius is ~8 of f64's 16; the series is
//! therefore accumulated in double-double arithmetic. The asymptotic sums are
//! truncated at their smallest term. Consistency of the two representations
//! at the switchover is checked once per process and the classical Wronskian
//! `Ai Bi' - Ai' Bi = 1/pi` is exposed for tests.

use crate::error::{Error, Result};
use crate::numeric::dd::Dd;
use std::sync::OnceLock;

/// Values of the Airy pair and first derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct AiryValues {
    pub ai: f64,
    pub bi: f64,
    pub ai_prime: f64,
    pub bi_prime: f64,
}

impl AiryValues {
    /// `Ai Bi' - Ai' Bi`, identically `1/pi`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// Series/asymptotics switchover radius.
pub const SWITCH_RADIUS: f64 = 6.0;

// Ai(0), -Ai'(0), Bi(0), Bi'(0) as double-doubles.
const AI0: Dd = Dd { hi: 0.3550280538878172, lo: 2.05233632436212e-17 };
const AIP0: Dd = Dd { hi: 0.2588194037928068, lo: -2.522243111610832e-17 };

fn series(x: f64) -> AiryValues {
    let x3 = Dd::from_f64(x).mul(Dd::from_f64(x)).mul(Dd::from_f64(x));
    // f  = sum a_k,  a_0 = 1,      a_{k+1} = a_k x^3 / ((3k+2)(3k+3))
    // g  = sum b_k,  b_0 = x,      b_{k+1} = b_k x^3 / ((3k+3)(3k+4))
    // f' = sum t_k,  t_1 = x^2/2,  t_{k+1} = t_k x^3 / ((3k)(3k+2))
    // g' = sum s_k,  s_0 = 1,      s_{k+1} = s_k x^3 / ((3k+1)(3k+3))
    let mut a = Dd::from_f64(1.0);
    let mut b = Dd::from_f64(x);
    let mut t = Dd::from_f64(0.5 * x * x);
    let mut s = Dd::from_f64(1.0);
    let mut f = a;
    let mut g = b;
    let mut fp = t;
    let mut gp = s;
    for k in 0..200usize {
        let kf = k as f64;
        a = a.mul(x3).div_f64((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        b = b.mul(x3).div_f64((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        s = s.mul(x3).div_f64((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f = f.add(a);
        g = g.add(b);
        gp = gp.add(s);
        if k >= 1 {
            let kf1 = kf;
            t = t.mul(x3).div_f64((3.0 * kf1) * (3.0 * kf1 + 2.0));
            fp = fp.add(t);
        }
        if a.abs() < 1e-40 && b.abs() < 1e-40 && s.abs() < 1e-40 {
            break;
        }
    }
    let sqrt3 = 3f64.sqrt();
    let ai = AI0.mul(f).add(AIP0.mul(g).neg());
    let bi = AI0.mul(f).add(AIP0.mul(g)).mul_f64(sqrt3);
    let aip = AI0.mul(fp).add(AIP0.mul(gp).neg());
    let bip = AI0.mul(fp).add(AIP0.mul(gp)).mul_f64(sqrt3);
    AiryValues {
        ai: ai.to_f64(),
        bi: bi.to_f64(),
        ai_prime: aip.to_f64(),
        bi_prime: bip.to_f64(),
    }
}

/// Asymptotic expansions for `x > SWITCH_RADIUS`, truncated at the smallest
/// term.
fn asymptotic(x: f64) -> Result<AiryValues> {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    if zeta > 700.0 {
        return Err(Error::numerical(format!(
            "Bi({x}) overflows f64 (growth exponent {zeta:.1})"
        )));
    }
    // u_k for values, v_k = u_k (6k+1)/(1-6k) for derivatives
    let mut u = 1.0f64;
    let mut sum_u_alt = 0.0; // sum (-1)^k u_k zeta^-k
    let mut sum_u = 0.0;
    let mut sum_v_alt = 0.0;
    let mut sum_v = 0.0;
    let mut pow = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..40usize {
        if k > 0 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            pow /= zeta;
        }
        let term = u * pow;
        if term.abs() > prev {
            break; // past the smallest term: stop
        }
        prev = term.abs();
        let v = u * (6.0 * k as f64 + 1.0) / (1.0 - 6.0 * k as f64);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum_u_alt += sign * term;
        sum_u += term;
        sum_v_alt += sign * v * pow;
        sum_v += v * pow;
    }
    let sp = std::f64::consts::PI.sqrt();
    let x4 = x.powf(0.25);
    Ok(AiryValues {
        ai: (-zeta).exp() / (2.0 * sp * x4) * sum_u_alt,
        ai_prime: -x4 * (-zeta).exp() / (2.0 * sp) * sum_v_alt,
        bi: zeta.exp() / (sp * x4) * sum_u,
        bi_prime: x4 * zeta.exp() / sp * sum_v,
    })
}

fn switchover_check() -> Result<()> {
    static CHECK: OnceLock<std::result::Result<(), String>> = OnceLock::new();
    CHECK
        .get_or_init(|| {
            let s = series(SWITCH_RADIUS);
            let a = asymptotic(SWITCH_RADIUS).map_err(|e| e.to_string())?;
            for (name, sv, av) in [
                ("Ai", s.ai, a.ai),
                ("Bi", s.bi, a.bi),
                ("Ai'", s.ai_prime, a.ai_prime),
                ("Bi'", s.bi_prime, a.bi_prime),
            ] {
                let rel = (sv - av).abs() / sv.abs();
                if rel > 1e-9 {
                    return Err(format!(
                        "series/asymptotic mismatch for {name} at the switchover: rel {rel:.2e}"
                    ));
                }
            }
            Ok(())
        })
        .clone()
        .map_err(Error::Numerical)
}

/// Evaluate Ai, Bi, Ai', Bi' at a real argument `x >= -SWITCH_RADIUS`.
///
/// Negative arguments beyond the series radius are not needed by the area
/// transform (its arguments are nonnegative) and are rejected.
pub fn airy(x: f64) -> Result<AiryValues> {
    if !x.is_finite() {
        return Err(Error::domain(format!("non-finite Airy argument {x}")));
    }
    if x < -SWITCH_RADIUS {
        return Err(Error::domain(format!(
            "Airy argument {x} below supported range (series radius {SWITCH_RADIUS})"
        )));
    }
    if x <= SWITCH_RADIUS {
        Ok(series(x))
    } else {
        switchover_check()?;
        asymptotic(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath references, 17 significant digits
    const REFS: &[(f64, [f64; 4])] = &[
        (0.0, [0.35502805388781724, 0.61492662744600073, -0.25881940379280680, 0.44828835735382636]),
        (0.5, [0.23169360648083349, 0.85427704310315549, -0.22491053266468389, 0.5445725641405923]),
        (2.0, [0.034924130423274379, 3.2980949999782147, -0.053090384433653632, 4.1006820499328899]),
        (5.5, [3.3685311908599814e-5, 2016.5800386595314, -8.0463391305565143e-5, 4632.5537331390424]),
        (6.0, [9.9476943602528896e-6, 6536.4461048098635, -2.4765200397034955e-5, 15725.602621930477]),
        (8.0, [4.6922076160992316e-8, 1199586.0041244599, -1.3414392979067866e-7, 3354342.3127445389]),
        (12.0, [1.3931846888753608e-13, 329807225829.07418, -4.8547365549853085e-13, 1135507502443.3707]),
        (-2.0, [0.22740742820168558, -0.41230258795639849, 0.61825902074169104, 0.27879516692116952]),
        (-5.0, [0.35076100902411432, -0.13836913490160058, 0.32719281855444314, 0.77841177300189925]),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, [ai, bi, aip, bip]) in REFS {
            let v = airy(x).unwrap();
            for (name, got, want) in
                [("Ai", v.ai, ai), ("Bi", v.bi, bi), ("Ai'", v.ai_prime, aip), ("Bi'", v.bi_prime, bip)]
            {
                let rel = (got - want).abs() / want.abs();
                assert!(rel < 2e-10, "{name}({x}): rel err {rel:.2e}");
            }
        }
    }

    #[test]
    fn wronskian_identity() {
        let inv_pi = 1.0 / std::f64::consts::PI;
        for &x in &[-5.0, -2.0, 0.0, 1.0, 3.0, 5.5, 6.0] {
            let w = airy(x).unwrap().wronskian();
            assert!((w - inv_pi).abs() < 1e-10, "W({x}) = {w}");
        }
    }

    #[test]
    fn switchover_mismatch_below_threshold() {
        let s = series(SWITCH_RADIUS);
        let a = asymptotic(SWITCH_RADIUS).unwrap();
        assert!(((s.ai - a.ai) / s.ai).abs() < 1e-9);
        assert!(((s.bi - a.bi) / s.bi).abs() < 1e-9);
    }

    #[test]
    fn rejects_far_negative_and_overflow() {
        assert!(airy(-10.0).is_err());
        assert!(airy(110.0).is_err()); // zeta ~ 769
    }
}
