//! Stable evaluation of ratios of sums of `c * e^p * sinh(a * beta)` terms.
//!
//! Every transform and moment formula in this crate is a ratio of such sums,
//! with `beta = sqrt(beta_sq)` and `beta_sq = mu^2 + 2(lambda + r)`. Three
//! regimes need care:
//!
//! * `beta_sq` large and positive: `sinh` overflows long before f64 does any
//!   other damage, so each term is split into its two pure exponentials and
//!   the largest exponent over numerator and denominator is factored out.
//! * `beta_sq` near zero: every term vanishes linearly in `beta`; the common
//!   factor is removed analytically by the even series
//!   `sinh(a*beta)/beta = a + a^3*beta_sq/6 + ...`, which is also what makes
//!   evaluation smooth across `beta_sq = 0`.
//! * `beta_sq < 0`: `beta` is imaginary and each `sinh` becomes `i*sin`; the
//!   imaginary unit cancels between numerator and denominator. This branch is
//!   what lets the Laplace transforms be differentiated at `lambda = 0` even
//!   when `r = mu = 0`.

use num_complex::Complex64;

/// One term `coeff * e^(exp_arg) * sinh(factor * beta)`.
#[derive(Debug, Clone, Copy)]
pub struct SinhTerm {
    pub coeff: f64,
    pub exp_arg: f64,
    pub factor: f64,
}

impl SinhTerm {
    pub fn new(coeff: f64, exp_arg: f64, factor: f64) -> Self {
        Self { coeff, exp_arg, factor }
    }
}

fn max_abs_factor(terms: &[SinhTerm]) -> f64 {
    terms.iter().map(|t| t.factor.abs()).fold(0.0, f64::max)
}

/// `sinh(a*beta)/beta` as an even series in `beta_sq`; valid for
/// `|beta_sq| * a^2` small.
fn sinh_over_beta_series(a: f64, beta_sq: f64) -> f64 {
    let a2 = a * a;
    let z = a2 * beta_sq;
    // a * (1 + z/6 + z^2/120 + z^3/5040 + z^4/362880)
    a * (1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0 + z * z * z * z / 362880.0)
}

/// Evaluate `sum(num) / sum(den)` where each term is
/// `c * e^p * sinh(a * sqrt(beta_sq))`, handling all three regimes.
pub fn eval_sinh_ratio(beta_sq: f64, num: &[SinhTerm], den: &[SinhTerm]) -> f64 {
    let amax = max_abs_factor(num).max(max_abs_factor(den));
    if beta_sq.abs() * amax * amax < 1e-2 {
        // common factor beta removed analytically
        let sum = |terms: &[SinhTerm]| -> f64 {
            terms
                .iter()
                .map(|t| t.coeff * t.exp_arg.exp() * sinh_over_beta_series(t.factor, beta_sq))
                .sum()
        };
        return sum(num) / sum(den);
    }
    if beta_sq > 0.0 {
        let beta = beta_sq.sqrt();
        // exponents p +- a*beta; factor out the global maximum
        let shift = num
            .iter()
            .chain(den)
            .map(|t| t.exp_arg + t.factor.abs() * beta)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum = |terms: &[SinhTerm]| -> f64 {
            terms
                .iter()
                .map(|t| {
                    0.5 * t.coeff
                        * ((t.exp_arg + t.factor * beta - shift).exp()
                            - (t.exp_arg - t.factor * beta - shift).exp())
                })
                .sum()
        };
        sum(num) / sum(den)
    } else {
        // beta = i*omega: sinh(a*beta) = i*sin(a*omega); the i cancels
        let omega = (-beta_sq).sqrt();
        let sum = |terms: &[SinhTerm]| -> f64 {
            terms
                .iter()
                .map(|t| t.coeff * t.exp_arg.exp() * (t.factor * omega).sin())
                .sum()
        };
        sum(num) / sum(den)
    }
}

/// One term `coeff * e^(exp_arg) * sinh(factor * beta)` with a complex
/// coefficient (the transform argument enters the coefficients).
#[derive(Debug, Clone, Copy)]
pub struct CSinhTerm {
    pub coeff: Complex64,
    pub exp_arg: f64,
    pub factor: f64,
}

impl CSinhTerm {
    pub fn new(coeff: Complex64, exp_arg: f64, factor: f64) -> Self {
        Self { coeff, exp_arg, factor }
    }
}

/// Complex counterpart of [`eval_sinh_ratio`] for contour inversion.
///
/// The ratio depends on `beta` only through `beta_sq` (each term is odd in
/// `beta` and the parities cancel), so the principal square root is safe.
pub fn eval_sinh_ratio_complex(
    beta_sq: Complex64,
    num: &[CSinhTerm],
    den: &[CSinhTerm],
) -> Complex64 {
    let amax = num
        .iter()
        .chain(den)
        .map(|t| t.factor.abs())
        .fold(0.0, f64::max);
    if beta_sq.norm() * amax * amax < 1e-2 {
        let series = |a: f64| -> Complex64 {
            let z = beta_sq * (a * a);
            (Complex64::new(1.0, 0.0)
                + z / 6.0
                + z * z / 120.0
                + z * z * z / 5040.0
                + z * z * z * z / 362880.0)
                * a
        };
        let sum = |terms: &[CSinhTerm]| -> Complex64 {
            terms
                .iter()
                .map(|t| series(t.factor) * t.coeff * t.exp_arg.exp())
                .sum()
        };
        return sum(num) / sum(den);
    }
    let beta = beta_sq.sqrt();
    let shift = num
        .iter()
        .chain(den)
        .map(|t| t.exp_arg + (t.factor * beta.re).abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let sum = |terms: &[CSinhTerm]| -> Complex64 {
        terms
            .iter()
            .map(|t| {
                let plus = Complex64::new(t.exp_arg + t.factor * beta.re - shift, t.factor * beta.im);
                let minus =
                    Complex64::new(t.exp_arg - t.factor * beta.re - shift, -t.factor * beta.im);
                (plus.exp() - minus.exp()) * t.coeff * 0.5
            })
            .sum()
    };
    sum(num) / sum(den)
}

/// One term `coeff * e^(exp_arg) * sinh_or_cosh(factor * beta)`.
///
/// Used by the second-moment and extreme-value formulas, which mix the two
/// kinds; those are only ever evaluated at `beta > 0`.
#[derive(Debug, Clone, Copy)]
pub struct HyperTerm {
    pub coeff: f64,
    pub exp_arg: f64,
    pub factor: f64,
    pub cosh: bool,
}

impl HyperTerm {
    pub fn sinh(coeff: f64, exp_arg: f64, factor: f64) -> Self {
        Self { coeff, exp_arg, factor, cosh: false }
    }
    pub fn cosh(coeff: f64, exp_arg: f64, factor: f64) -> Self {
        Self { coeff, exp_arg, factor, cosh: true }
    }
}

/// Evaluate `sum(num) / sum(den)` of [`HyperTerm`]s at a fixed `beta > 0`,
/// factoring out the dominant exponential.
pub fn eval_hyper_ratio(beta: f64, num: &[HyperTerm], den: &[HyperTerm]) -> f64 {
    debug_assert!(beta > 0.0);
    let shift = num
        .iter()
        .chain(den)
        .map(|t| t.exp_arg + t.factor.abs() * beta)
        .fold(f64::NEG_INFINITY, f64::max);
    let sum = |terms: &[HyperTerm]| -> f64 {
        terms
            .iter()
            .map(|t| {
                let plus = (t.exp_arg + t.factor * beta - shift).exp();
                let minus = (t.exp_arg - t.factor * beta - shift).exp();
                0.5 * t.coeff * if t.cosh { plus + minus } else { plus - minus }
            })
            .sum()
    };
    sum(num) / sum(den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(beta: f64, terms: &[SinhTerm]) -> f64 {
        terms
            .iter()
            .map(|t| t.coeff * t.exp_arg.exp() * (t.factor * beta).sinh())
            .sum()
    }

    #[test]
    fn matches_naive_in_moderate_range() {
        let num = [SinhTerm::new(1.3, -0.4, 0.75), SinhTerm::new(-0.2, 0.9, -0.3)];
        let den = [SinhTerm::new(0.7, 0.1, 1.0), SinhTerm::new(2.0, -1.0, 0.6)];
        for &bsq in &[0.3f64, 2.0, 17.0] {
            let beta = bsq.sqrt();
            let expect = naive(beta, &num) / naive(beta, &den);
            let got = eval_sinh_ratio(bsq, &num, &den);
            assert!((got - expect).abs() <= 1e-13 * expect.abs(), "bsq={bsq}: {got} vs {expect}");
        }
    }

    #[test]
    fn survives_huge_arguments() {
        // sinh overflows at ~710; the scaled path must not
        let num = [SinhTerm::new(1.0, 0.0, 1.0)];
        let den = [SinhTerm::new(1.0, 0.0, 2.0)];
        let bsq = 1.0e7; // beta ~ 3162, factors 1 and 2
        let got = eval_sinh_ratio(bsq, &num, &den);
        // sinh(beta)/sinh(2 beta) ~ e^{-beta}
        let expect = (-bsq.sqrt()).exp();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn continuous_through_beta_sq_zero() {
        let num = [SinhTerm::new(1.0, 0.2, 0.8), SinhTerm::new(-0.5, 0.0, 0.4)];
        let den = [SinhTerm::new(1.0, 0.0, 1.0)];
        let at = |bsq: f64| eval_sinh_ratio(bsq, &num, &den);
        let left = at(-1e-9);
        let mid = at(0.0);
        let right = at(1e-9);
        assert!((left - mid).abs() < 1e-9);
        assert!((right - mid).abs() < 1e-9);
    }

    #[test]
    fn trig_branch_matches_sin() {
        let num = [SinhTerm::new(1.0, 0.3, 0.7)];
        let den = [SinhTerm::new(1.0, 0.0, 1.0)];
        let bsq = -4.0; // omega = 2
        let got = eval_sinh_ratio(bsq, &num, &den);
        let expect = (0.3f64).exp() * (0.7 * 2.0f64).sin() / (2.0f64).sin();
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn hyper_ratio_matches_naive() {
        let num = [HyperTerm::sinh(1.0, 0.2, 0.9), HyperTerm::cosh(-0.4, -0.1, 0.5)];
        let den = [HyperTerm::cosh(1.0, 0.0, 1.0)];
        let beta = 1.7f64;
        let expect = ((0.2f64).exp() * (0.9 * beta).sinh() - 0.4 * (-0.1f64).exp() * (0.5 * beta).cosh())
            / (1.0 * beta).cosh();
        let got = eval_hyper_ratio(beta, &num, &den);
        assert!((got - expect).abs() < 1e-14 * expect.abs().max(1.0));
    }

    #[test]
    fn complex_agrees_with_real_on_real_axis() {
        let num = [SinhTerm::new(1.3, -0.4, 0.75), SinhTerm::new(-0.2, 0.9, -0.3)];
        let den = [SinhTerm::new(0.7, 0.1, 1.0), SinhTerm::new(2.0, -1.0, 0.6)];
        let lift = |ts: &[SinhTerm]| -> Vec<CSinhTerm> {
            ts.iter()
                .map(|t| CSinhTerm::new(Complex64::new(t.coeff, 0.0), t.exp_arg, t.factor))
                .collect()
        };
        let (cnum, cden) = (lift(&num), lift(&den));
        for &bsq in &[-3.0, 1e-5, 0.3, 40.0] {
            let re = eval_sinh_ratio(bsq, &num, &den);
            let c = eval_sinh_ratio_complex(Complex64::new(bsq, 0.0), &cnum, &cden);
            assert!((c.re - re).abs() <= 1e-11 * re.abs().max(1.0), "bsq={bsq}");
            assert!(c.im.abs() <= 1e-11 * re.abs().max(1.0));
        }
    }
}
