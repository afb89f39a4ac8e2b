//! Minimal double-double arithmetic (~31 significant digits).
//!
//! Used only where f64 cancellation is fatal: the Maclaurin series for the
//! Airy functions loses `exp(4/3 x^(3/2))` digits to cancellation, which at
//! the series/asymptotic switchover radius already eats half of f64. The
//! operations below (Dekker/Knuth error-free transforms, products via FMA)
//! are enough for series accumulation.

/// A number represented as an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Division by an f64, one Newton correction on the f64 quotient.
    #[inline]
    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = ((self.hi - p) - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_digits() {
        // (1 + 1e-20) - 1 is 0 in f64 but representable in dd
        let one = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-20);
        let s = one.add(tiny).add(one.neg());
        assert_eq!(s.to_f64(), 1e-20);
    }

    #[test]
    fn product_carries_roundoff() {
        let a = Dd::from_f64(1.0 + 2f64.powi(-30));
        let b = a.mul(a);
        let exact = 1.0 + 2f64.powi(-29) + 2f64.powi(-60);
        assert!((b.to_f64() - exact).abs() < 1e-30);
    }

    #[test]
    fn division_round_trips() {
        let a = Dd::from_f64(std::f64::consts::PI);
        let b = a.div_f64(7.0).mul_f64(7.0);
        assert!((b.to_f64() - std::f64::consts::PI).abs() < 1e-30);
        assert!((b.hi - std::f64::consts::PI).abs() < 1e-15);
    }
}
