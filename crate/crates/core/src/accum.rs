//! Compensated accumulation primitives.
//!
//! Two layers live here. [`Neumaier`] is an improved Kahan summator for plain
//! `f64` work. [`Dd`] is double-double arithmetic (an unevaluated sum of two
//! doubles, ~106 significant bits) built from the classic error-free
//! transformations; the merit computations run their per-point product
//! recurrences on it because squared merits sit many orders of magnitude
//! below the individual terms being combined.

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`
/// exactly. Works for any ordering of magnitudes (Knuth).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|` (Dekker). One branch cheaper.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via Dekker splitting: `a * b = p + e` exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let p = a * b;
    let ta = SPLITTER * a;
    let ahi = ta - (ta - a);
    let alo = a - ahi;
    let tb = SPLITTER * b;
    let bhi = tb - (tb - b);
    let blo = b - bhi;
    let e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, e)
}

/// Double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[allow(clippy::should_implement_trait)] // named like the f64 intrinsics, used explicitly
    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[allow(clippy::should_implement_trait)]
    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        Dd { hi, lo }
    }

    /// Division by a plain double: one Newton-style correction on the
    /// quotient, accurate to a couple of ulps of the low word.
    #[inline]
    pub fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = ((self.hi - p) - e) + self.lo;
        let q2 = r / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Neumaier's variant of Kahan summation: tracks a running compensation that
/// also survives the case `|x| > |sum|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Neumaier {
        Neumaier::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean of a slice with compensated accumulation.
pub fn neumaier_mean(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_recovers_lost_bits() {
        let (s, e) = two_sum(1.0, 1e-30);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-30);
    }

    #[test]
    fn two_prod_is_exact() {
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60; the product's error term must
        // carry exactly the 2^-60 the rounded product drops.
        let a = 1.0 + (-30f64).exp2();
        let (p, e) = two_prod(a, a);
        let exact = 1.0 + (-29f64).exp2();
        assert_eq!(p, exact);
        assert_eq!(e, (-60f64).exp2());
    }

    #[test]
    fn dd_addition_keeps_small_terms() {
        let mut acc = Dd::ZERO;
        for _ in 0..1000 {
            acc = acc.add_f64(1e-20);
        }
        acc = acc.add_f64(1.0);
        for _ in 0..1000 {
            acc = acc.add_f64(-1e-20);
        }
        acc = acc.add_f64(-1.0);
        // Plain f64 would be left with ~1e-17 of damage; double-double keeps
        // the residual at the level of its own 106-bit rounding.
        assert!(acc.to_f64().abs() < 1e-30, "residual {:e}", acc.to_f64());
    }

    #[test]
    fn dd_product_matches_exact_dyadic() {
        // (1 - 2^-40) * (1 + 2^-40) = 1 - 2^-80, representable as hi=1, lo=-2^-80.
        let a = Dd::from_f64(1.0).add_f64(-(-40f64).exp2());
        let b = Dd::from_f64(1.0).add_f64((-40f64).exp2());
        let p = a.mul(b);
        assert_eq!(p.hi, 1.0);
        assert_eq!(p.lo, -(-80f64).exp2());
    }

    #[test]
    fn dd_div_roundtrips() {
        let x = Dd::from_f64(1.0).add_f64((-70f64).exp2());
        let q = x.div_f64(3.0);
        let back = q.mul_f64(3.0);
        let diff = back.add(Dd {
            hi: -x.hi,
            lo: -x.lo,
        });
        assert!(diff.to_f64().abs() < 1e-31);
    }

    #[test]
    fn neumaier_beats_naive_on_cancellation() {
        let mut acc = Neumaier::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn neumaier_mean_of_constant_is_exact() {
        let xs = vec![0.1; 1001];
        assert_eq!(neumaier_mean(&xs), 0.1);
    }
}
