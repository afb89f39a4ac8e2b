//! Central-difference differentiation with Richardson extrapolation.
//!
//! The Laplace transforms handled here are analytic in a (two-sided)
//! neighborhood of `lambda = 0`, so symmetric stencils apply; the evaluators'
//! trigonometric branch covers the negative side.

use crate::error::{Error, Result};

/// Raw central difference for the n-th derivative (error `O(h^2)`).
fn central<F: FnMut(f64) -> Result<f64>>(f: &mut F, x0: f64, n: u32, h: f64) -> Result<f64> {
    Ok(match n {
        1 => (f(x0 + h)? - f(x0 - h)?) / (2.0 * h),
        2 => (f(x0 + h)? - 2.0 * f(x0)? + f(x0 - h)?) / (h * h),
        3 => (f(x0 + 2.0 * h)? - 2.0 * f(x0 + h)? + 2.0 * f(x0 - h)? - f(x0 - 2.0 * h)?)
            / (2.0 * h * h * h),
        4 => (f(x0 + 2.0 * h)? - 4.0 * f(x0 + h)? + 6.0 * f(x0)? - 4.0 * f(x0 - h)?
            + f(x0 - 2.0 * h)?)
            / (h * h * h * h),
        _ => return Err(Error::domain(format!("derivative order {n} not in 1..=4"))),
    })
}

/// n-th derivative of `f` at `x0` via a step ladder `h0, h0/2, ...` and a
/// Richardson table in `h^2`.
///
/// Errors with [`Error::Numerical`] when the last two diagonal entries differ
/// by more than `rel_tol` relative to the result scale.
pub fn nth_derivative<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    x0: f64,
    n: u32,
    h0: f64,
    levels: usize,
    rel_tol: f64,
) -> Result<f64> {
    assert!(levels >= 2);
    let mut diag: Vec<f64> = Vec::with_capacity(levels);
    let mut prev_row: Vec<f64> = Vec::new();
    let mut h = h0;
    for k in 0..levels {
        let mut row = vec![central(&mut f, x0, n, h)?];
        for m in 1..=k {
            let pow = 4f64.powi(m as i32);
            let extr = (pow * row[m - 1] - prev_row[m - 1]) / (pow - 1.0);
            row.push(extr);
        }
        diag.push(*row.last().unwrap());
        prev_row = row;
        h *= 0.5;
    }
    // walk the diagonal until two successive entries agree
    let mut best = diag[0];
    let mut best_gap = f64::INFINITY;
    for w in diag.windows(2) {
        let scale = w[1].abs().max(w[0].abs()).max(1e-300);
        let gap = (w[1] - w[0]).abs() / scale;
        if gap < best_gap {
            best_gap = gap;
            best = w[1];
        }
    }
    if best_gap > rel_tol {
        return Err(Error::numerical(format!(
            "derivative extrapolation did not converge (order {n}, best rel gap {best_gap:.2e} > {rel_tol:.2e})"
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_exp() {
        // all derivatives of e^(2x) at 0 are 2^n
        for n in 1..=4u32 {
            let d = nth_derivative(|x| Ok((2.0 * x).exp()), 0.0, n, 0.1, 6, 1e-6).unwrap();
            assert!(
                (d - 2f64.powi(n as i32)).abs() < 2e-7 * 2f64.powi(n as i32),
                "n={n}: {d}"
            );
        }
    }

    #[test]
    fn reports_nonconvergence_on_noise() {
        // |x| has no second derivative at 0
        let r = nth_derivative(|x| Ok(x.abs()), 0.0, 2, 0.1, 5, 1e-4);
        assert!(r.is_err());
    }
}
