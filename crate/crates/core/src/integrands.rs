//! The test-function family used throughout the experiments.
//!
//! Eight integrands on `[0,1)^s`, each with a closed-form (or exactly
//! computed) integral and, where the function is smooth, certified sup-norm
//! bounds on all mixed partial derivatives.  The family spans three
//! smoothness classes so that merit/error correlations can be probed on
//! functions the Walsh-coefficient machinery does and does not cover:
//!
//! | id | f(x)                        | class                        |
//! |----|-----------------------------|------------------------------|
//! | f0 | (x_1 + … + x_s)^6           | smooth (polynomial)          |
//! | f1 | exp((2/3)·Σ x_i)            | smooth                       |
//! | f2 | exp((3/2)·Σ x_i)            | smooth                       |
//! | f3 | cos(Σ x_i)                  | smooth                       |
//! | f4 | exp(Σ x_i²)                 | smooth                       |
//! | f5 | Π 1/(x_i² + 1)              | smooth                       |
//! | f6 | Π T(x_i)                    | continuous, not differentiable |
//! | f7 | Π C(x_i)                    | discontinuous                |
//!
//! where `T(x) = min_{i∈Z} |3x − 2i|` is a triangle wave with kinks at the
//! thirds and `C(x) = (−1)^⌊3x⌋` flips sign there.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Smoothness class of an integrand, deciding which bounds apply to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    ContinuousNondifferentiable,
    Discontinuous,
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    /// (Σ x_i)^6
    SumPow6,
    /// exp(a·Σ x_i)
    ExpSum { a: f64 },
    /// cos(Σ x_i)
    CosSum,
    /// Π exp(x_i²)
    GaussProd,
    /// Π 1/(x_i² + 1)
    PeakProd,
    /// Π T(x_i), triangle wave
    HatProd,
    /// Π C(x_i), square wave
    SignProd,
}

const THIRDS: [f64; 2] = [1.0 / 3.0, 2.0 / 3.0];

/// One member of the family, fixed to a dimension.
#[derive(Clone, Debug)]
pub struct Integrand {
    id: &'static str,
    s: usize,
    kind: Kind,
    smoothness: Smoothness,
    exact_integral: f64,
    provenance: &'static str,
}

impl Integrand {
    /// Look up a family member by id (`"f0"`‥`"f7"`) in dimension `s ≥ 1`.
    pub fn by_id(id: &str, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParams("integrand dimension s must be >= 1".into()));
        }
        let (kind, smoothness) = match id {
            "f0" => (Kind::SumPow6, Smoothness::Smooth),
            "f1" => (Kind::ExpSum { a: 2.0 / 3.0 }, Smoothness::Smooth),
            "f2" => (Kind::ExpSum { a: 3.0 / 2.0 }, Smoothness::Smooth),
            "f3" => (Kind::CosSum, Smoothness::Smooth),
            "f4" => (Kind::GaussProd, Smoothness::Smooth),
            "f5" => (Kind::PeakProd, Smoothness::Smooth),
            "f6" => (Kind::HatProd, Smoothness::ContinuousNondifferentiable),
            "f7" => (Kind::SignProd, Smoothness::Discontinuous),
            other => {
                return Err(Error::InvalidParams(format!(
                    "unknown integrand id {other:?}, expected f0..f7"
                )))
            }
        };
        let id: &'static str = FN_IDS[id[1..].parse::<usize>().unwrap()];
        let (exact_integral, provenance) = exact_integral_for(kind, s);
        Ok(Integrand { id, s, kind, smoothness, exact_integral, provenance })
    }

    /// All eight family members in dimension `s`.
    pub fn all(s: usize) -> Result<Vec<Self>> {
        FN_IDS.iter().map(|id| Self::by_id(id, s)).collect()
    }

    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn dimension(&self) -> usize {
        self.s
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// The true integral over `[0,1)^s`.
    pub fn exact_integral(&self) -> f64 {
        self.exact_integral
    }

    /// How the exact integral was obtained (rational moments, closed form,
    /// or a certified series), for reporting.
    pub fn integral_provenance(&self) -> &'static str {
        self.provenance
    }

    /// Per-axis abscissae where the function is not smooth.  Quadrature
    /// rules split panels here so every panel sees an analytic piece.
    pub fn axis_breakpoints(&self) -> &'static [f64] {
        match self.kind {
            Kind::HatProd | Kind::SignProd => &THIRDS,
            _ => &[],
        }
    }

    /// Evaluate at a point of `[0,1)^s`.
    ///
    /// The product-form members (f4..f7) multiply per-axis factors
    /// left-to-right, so factoring an evaluation across axes reproduces the
    /// direct result bit for bit.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.s {
            return Err(Error::ShapeMismatch(format!(
                "integrand {} has dimension {}, point has {}",
                self.id,
                self.s,
                x.len()
            )));
        }
        for (axis, &xi) in x.iter().enumerate() {
            if !(0.0..1.0).contains(&xi) {
                return Err(Error::OutOfDomain { axis, value: xi });
            }
        }
        let v = match self.kind {
            Kind::SumPow6 => x.iter().sum::<f64>().powi(6),
            Kind::ExpSum { a } => (a * x.iter().sum::<f64>()).exp(),
            Kind::CosSum => x.iter().sum::<f64>().cos(),
            Kind::GaussProd => x.iter().fold(1.0, |p, &xi| p * (xi * xi).exp()),
            Kind::PeakProd => x.iter().fold(1.0, |p, &xi| p * (xi * xi + 1.0).recip()),
            Kind::HatProd => x.iter().fold(1.0, |p, &xi| p * triangle(xi)),
            Kind::SignProd => x.iter().fold(1.0, |p, &xi| p * square(xi)),
        };
        if !v.is_finite() {
            return Err(Error::NonFiniteEvaluation { point: x.to_vec() });
        }
        Ok(v)
    }

    /// Certified sup-norm bound on the mixed partial `∂^N f` over `[0,1]^s`,
    /// where `N` gives the derivative order per axis.  Errors for the two
    /// non-smooth members.
    pub fn derivative_bound(&self, n_idx: &[usize]) -> Result<f64> {
        if n_idx.len() != self.s {
            return Err(Error::ShapeMismatch(format!(
                "integrand {} has dimension {}, derivative index has {}",
                self.id,
                self.s,
                n_idx.len()
            )));
        }
        let total: usize = n_idx.iter().sum();
        let s = self.s as f64;
        Ok(match self.kind {
            // ∂^N (Σx)^6 = 6!/(6−|N|)!·(Σx)^{6−|N|}, and Σx ≤ s.
            Kind::SumPow6 => {
                if total > 6 {
                    0.0
                } else {
                    let falling: f64 = (6 - total + 1..=6).map(|k| k as f64).product();
                    falling * s.powi((6 - total) as i32)
                }
            }
            // ∂^N exp(aΣx) = a^{|N|} exp(aΣx) ≤ a^{|N|} e^{as}.
            Kind::ExpSum { a } => a.powi(total as i32) * (a * s).exp(),
            // Every mixed partial of cos(Σx) is ±cos or ±sin of Σx.
            Kind::CosSum => 1.0,
            // Per axis, d^k/dx^k e^{x²} = h_k(x)·e^{x²} with
            // h_{k+1} = h_k' + 2x·h_k; all coefficients are nonnegative, so
            // the sup over [0,1] is h_k(1)·e, attained at x = 1.
            Kind::GaussProd => {
                let e = std::f64::consts::E;
                n_idx.iter().fold(1.0, |p, &k| p * gauss_h_at_one(k) * e)
            }
            // Per axis, 1/(x²+1) = (1/2i)(1/(x−i) − 1/(x+i)), so the k-th
            // derivative is bounded by k!·(1+x²)^{−(k+1)/2} ≤ k!, attained
            // at x = 0 for even k.
            Kind::PeakProd => n_idx.iter().fold(1.0, |p, &k| p * factorial(k)),
            Kind::HatProd | Kind::SignProd => {
                return Err(Error::NotDifferentiable { id: self.id.to_string() })
            }
        })
    }
}

pub const FN_IDS: [&str; 8] = ["f0", "f1", "f2", "f3", "f4", "f5", "f6", "f7"];

/// Triangle wave `T(x) = min_{i∈Z} |3x − 2i|`: 0 at the even thirds, 1 at the
/// odd ones.  The nearest even integer to `3x` realizes the minimum.
fn triangle(x: f64) -> f64 {
    let u = 3.0 * x;
    (u - 2.0 * (u / 2.0).round()).abs()
}

/// Square wave `C(x) = (−1)^⌊3x⌋` on [0,1).
fn square(x: f64) -> f64 {
    if ((3.0 * x).floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |p, t| p * t as f64)
}

/// h_k(1) for the e^{x²} derivative polynomials, exact in BigUint.
fn gauss_h_at_one(k: usize) -> f64 {
    // Coefficient recurrence for h_{k+1} = h_k' + 2x·h_k:
    // c'[t] = (t+1)·c[t+1] + 2·c[t−1].
    let mut c: Vec<BigUint> = vec![BigUint::one()];
    for _ in 0..k {
        let mut next = vec![BigUint::zero(); c.len() + 1];
        for (t, ct) in c.iter().enumerate() {
            if t >= 1 {
                next[t - 1] += ct * BigUint::from(t);
            }
            next[t + 1] += ct * BigUint::from(2u32);
        }
        c = next;
    }
    let sum: BigUint = c.iter().sum();
    sum.to_f64().unwrap_or(f64::INFINITY)
}

fn exact_integral_for(kind: Kind, s: usize) -> (f64, &'static str) {
    match kind {
        Kind::SumPow6 => {
            let v = sum_moment(s, 6).to_f64().expect("moment fits in f64");
            (v, "exact rational moment recurrence")
        }
        Kind::ExpSum { a } => ((a.exp_m1() / a).powi(s as i32), "closed form"),
        Kind::CosSum => {
            // ∫ e^{ix} dx = (e^i − 1)/i = sin 1 + i(1 − cos 1); the integral
            // of cos(Σx) is the real part of the s-th power.
            let z = Complex64::new(1.0f64.sin(), 1.0 - 1.0f64.cos());
            (z.powu(s as u32).re, "closed form")
        }
        Kind::GaussProd => (gauss_1d_integral().powi(s as i32), "certified series"),
        Kind::PeakProd => ((std::f64::consts::PI / 4.0).powi(s as i32), "closed form"),
        Kind::HatProd => (0.5f64.powi(s as i32), "closed form"),
        Kind::SignProd => ((1.0 / 3.0f64).powi(s as i32), "closed form"),
    }
}

/// E[(U_1 + … + U_s)^p] for iid uniforms, exact.  Binomial recurrence over
/// dimensions: E[(S'+U)^p] = Σ_q C(p,q) E[S'^q] E[U^{p−q}], E[U^r] = 1/(r+1).
fn sum_moment(s: usize, p: usize) -> BigRational {
    let uniform: Vec<BigRational> =
        (0..=p).map(|r| BigRational::new(BigInt::one(), BigInt::from(r as i64 + 1))).collect();
    let mut moments = uniform.clone();
    for _ in 1..s {
        let mut next = vec![BigRational::zero(); p + 1];
        for (k, slot) in next.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for q in 0..=k {
                acc += binomial(k, q) * &moments[q] * &uniform[k - q];
            }
            *slot = acc;
        }
        moments = next;
    }
    moments[p].clone()
}

fn binomial(n: usize, k: usize) -> BigRational {
    let mut v = BigInt::one();
    for t in 0..k {
        v *= BigInt::from((n - t) as i64);
    }
    let mut d = BigInt::one();
    for t in 1..=k {
        d *= BigInt::from(t as i64);
    }
    BigRational::new(v, d)
}

/// ∫_0^1 e^{x²} dx = Σ_{k≥0} 1/(k!(2k+1)).  Terms decay faster than
/// geometrically with ratio ≤ 1/(k+1); truncating once a term drops below
/// 1e−18 leaves a tail under 2e−18, far inside the 1e−12 budget.
fn gauss_1d_integral() -> f64 {
    let mut sum = crate::accum::Neumaier::new();
    let mut k_fact = 1.0f64;
    for k in 0..64 {
        if k > 0 {
            k_fact *= k as f64;
        }
        let term = 1.0 / (k_fact * (2 * k + 1) as f64);
        sum.add(term);
        if term < 1e-18 {
            break;
        }
    }
    sum.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, DOMAIN_PROBE};
    use rand::Rng;

    // --- independent quadrature oracle -----------------------------------
    //
    // Panel-subdivided Gauss–Legendre on [0,1], panels split at the
    // integrand's breakpoints and then halved until two refinements agree.
    // Everything below is 1-D; multi-dimensional checks combine 1-D results
    // through the integrands' product/sum structure, which is itself
    // exercised by the direct low-dimension tensor checks.

    const GL8_X: [f64; 4] =
        [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
    const GL8_W: [f64; 4] =
        [0.362683783378362, 0.31370664587788727, 0.22238103445337448, 0.10122853629037626];

    fn gl8(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for t in 0..4 {
            acc += GL8_W[t] * (f(c - h * GL8_X[t]) + f(c + h * GL8_X[t]));
        }
        acc * h
    }

    fn quad_1d(f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        let mut edges = vec![0.0, 1.0];
        edges.extend_from_slice(breaks);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::NAN;
        for level in 0..10u32 {
            let sub = 1usize << level;
            let mut total = 0.0;
            for w in edges.windows(2) {
                let width = (w[1] - w[0]) / sub as f64;
                for t in 0..sub {
                    let a = w[0] + t as f64 * width;
                    total += gl8(&f, a, a + width);
                }
            }
            if (total - prev).abs() < 1e-13 {
                return total;
            }
            prev = total;
        }
        prev
    }

    /// Structure-aware oracle integral: per-axis quadrature combined through
    /// the product (f1..f7) or exact multinomial (f0) decomposition.
    fn oracle_integral(id: &str, s: usize) -> f64 {
        match id {
            "f0" => multinomial_moment(s),
            "f1" => quad_1d(|x| (2.0 / 3.0 * x).exp(), &[]).powi(s as i32),
            "f2" => quad_1d(|x| (1.5 * x).exp(), &[]).powi(s as i32),
            "f3" => {
                let c = quad_1d(|x| x.cos(), &[]);
                let d = quad_1d(|x| x.sin(), &[]);
                Complex64::new(c, d).powu(s as u32).re
            }
            "f4" => quad_1d(|x| (x * x).exp(), &[]).powi(s as i32),
            "f5" => quad_1d(|x| 1.0 / (x * x + 1.0), &[]).powi(s as i32),
            "f6" => quad_1d(triangle, &THIRDS).powi(s as i32),
            "f7" => quad_1d(square, &THIRDS).powi(s as i32),
            _ => unreachable!(),
        }
    }

    /// Termwise-integrated multinomial expansion of (Σx)^6, exact.
    fn multinomial_moment(s: usize) -> f64 {
        fn rec(s: usize, left: usize, acc: BigRational, out: &mut BigRational) {
            if s == 1 {
                let mut term = acc;
                term *= BigRational::new(BigInt::one(), BigInt::from(left as i64 + 1));
                for t in 1..=left {
                    term /= BigRational::from(BigInt::from(t as i64));
                }
                *out += term;
                return;
            }
            for k in 0..=left {
                let mut next = acc.clone();
                next *= BigRational::new(BigInt::one(), BigInt::from(k as i64 + 1));
                for t in 1..=k {
                    next /= BigRational::from(BigInt::from(t as i64));
                }
                rec(s - 1, left - k, next, out);
            }
        }
        let mut total = BigRational::zero();
        let six_fact = BigRational::from(BigInt::from(720));
        rec(s, 6, six_fact, &mut total);
        total.to_f64().unwrap()
    }

    #[test]
    fn hand_values_at_simple_points() {
        let q = [0.5, 0.5, 0.5, 0.5];
        assert_eq!(Integrand::by_id("f0", 4).unwrap().eval(&q).unwrap(), 64.0);
        assert_eq!(Integrand::by_id("f6", 1).unwrap().eval(&[0.5]).unwrap(), 0.5);
        assert_eq!(Integrand::by_id("f7", 1).unwrap().eval(&[0.5]).unwrap(), -1.0);
        assert_eq!(Integrand::by_id("f7", 1).unwrap().eval(&[0.0]).unwrap(), 1.0);
        // T has value 1 at the odd thirds and 0 at the even ones.
        let f6 = Integrand::by_id("f6", 1).unwrap();
        assert!((f6.eval(&[1.0 / 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(f6.eval(&[2.0 / 3.0]).unwrap().abs() < 1e-15);
        let f3 = Integrand::by_id("f3", 2).unwrap();
        assert!((f3.eval(&[0.25, 0.25]).unwrap() - 0.5f64.cos()).abs() < 1e-16);
    }

    #[test]
    fn exact_integrals_match_quadrature_oracle() {
        for s in [1usize, 2, 4] {
            for f in Integrand::all(s).unwrap() {
                let oracle = oracle_integral(f.id(), s);
                let exact = f.exact_integral();
                assert!(
                    (exact - oracle).abs() <= 1e-9 * oracle.abs().max(1.0),
                    "{} s={s}: exact {exact} vs oracle {oracle}",
                    f.id()
                );
            }
        }
    }

    #[test]
    fn low_dimension_tensor_quadrature_agrees_directly() {
        // Validates the structural reduction used by the oracle: a direct
        // 2-D tensor quadrature, no product shortcuts.
        let f1 = Integrand::by_id("f1", 2).unwrap();
        let inner = |y: f64| quad_1d(|x| (2.0 / 3.0 * (x + y)).exp(), &[]);
        let direct = quad_1d(inner, &[]);
        assert!((f1.exact_integral() - direct).abs() < 1e-10);

        let f0 = Integrand::by_id("f0", 2).unwrap();
        let inner0 = |y: f64| quad_1d(move |x| (x + y).powi(6), &[]);
        let direct0 = quad_1d(inner0, &[]);
        assert!((f0.exact_integral() - direct0).abs() < 1e-9 * direct0);
    }

    #[test]
    fn moment_recurrence_equals_multinomial_expansion() {
        for s in 1..=6 {
            let rec = sum_moment(s, 6).to_f64().unwrap();
            let multi = multinomial_moment(s);
            assert_eq!(rec, multi, "s = {s}");
        }
        // s=1: E[U^6] = 1/7.
        assert_eq!(sum_moment(1, 6), BigRational::new(BigInt::one(), BigInt::from(7)));
    }

    #[test]
    fn moment_value_confirmed_by_monte_carlo() {
        let f0 = Integrand::by_id("f0", 4).unwrap();
        let mut rng = stream_rng(99, DOMAIN_PROBE, 0, 0);
        let n = 10_000_000usize;
        let mut sum = crate::accum::Neumaier::new();
        let mut sumsq = crate::accum::Neumaier::new();
        let mut x = [0.0f64; 4];
        for _ in 0..n {
            for xi in x.iter_mut() {
                *xi = rng.random::<f64>();
            }
            let v = f0.eval(&x).unwrap();
            sum.add(v);
            sumsq.add(v * v);
        }
        let mean = sum.value() / n as f64;
        let var = (sumsq.value() / n as f64 - mean * mean).max(0.0);
        let sigma = (var / n as f64).sqrt();
        let err = (mean - f0.exact_integral()).abs();
        assert!(err <= 4.0 * sigma, "MC {mean} vs exact {} ({err} > 4σ = {})", f0.exact_integral(), 4.0 * sigma);
    }

    #[test]
    fn derivative_bound_hand_values() {
        let f1 = Integrand::by_id("f1", 1).unwrap();
        let a = 2.0f64 / 3.0;
        assert!((f1.derivative_bound(&[1]).unwrap() - a * a.exp()).abs() < 1e-15);

        let f3 = Integrand::by_id("f3", 3).unwrap();
        assert_eq!(f3.derivative_bound(&[2, 0, 5]).unwrap(), 1.0);

        // (Σx)^6 with |N| = 6 differentiates to the constant 6!.
        let f0 = Integrand::by_id("f0", 2).unwrap();
        assert_eq!(f0.derivative_bound(&[3, 3]).unwrap(), 720.0);
        assert_eq!(f0.derivative_bound(&[4, 3]).unwrap(), 0.0);
        // |N| = 1: 6·(Σx)^5 ≤ 6·2^5 at s = 2.
        assert_eq!(f0.derivative_bound(&[1, 0]).unwrap(), 192.0);

        // f5: per-axis k! bounds.
        let f5 = Integrand::by_id("f5", 2).unwrap();
        assert_eq!(f5.derivative_bound(&[3, 2]).unwrap(), 12.0);

        // f4 per-axis values h_k(1)·e with h_k(1) = 1, 2, 6, 20, 76.
        let f4 = Integrand::by_id("f4", 1).unwrap();
        let e = std::f64::consts::E;
        for (k, h) in [1.0, 2.0, 6.0, 20.0, 76.0].iter().enumerate() {
            assert!((f4.derivative_bound(&[k]).unwrap() - h * e).abs() < 1e-12 * h * e);
        }
    }

    #[test]
    fn gauss_polynomials_match_independent_recurrence() {
        // a_k = h_k(1) also satisfies a_k = 2a_{k−1} + 2(k−1)a_{k−2}:
        // differentiate h_k e^{x²} twice symbolically and evaluate at 1.
        let mut a = vec![1.0f64, 2.0];
        for k in 2..12 {
            let next = 2.0 * a[k - 1] + 2.0 * (k as f64 - 1.0) * a[k - 2];
            a.push(next);
        }
        for (k, want) in a.iter().enumerate() {
            assert_eq!(gauss_h_at_one(k), *want, "k = {k}");
        }
    }

    #[test]
    fn gauss_bound_dominates_sampled_second_derivative() {
        // d²/dx² e^{x²} = (2 + 4x²) e^{x²}; check the k=2 bound is a true
        // sup bound and is attained at x = 1.
        let f4 = Integrand::by_id("f4", 1).unwrap();
        let bound = f4.derivative_bound(&[2]).unwrap();
        let mut max_seen = 0.0f64;
        for t in 0..=1000 {
            let x = t as f64 / 1000.0;
            let d2 = (2.0 + 4.0 * x * x) * (x * x).exp();
            max_seen = max_seen.max(d2);
            assert!(d2 <= bound * (1.0 + 1e-12));
        }
        assert!((max_seen - bound).abs() < 1e-9 * bound);
    }

    #[test]
    fn non_smooth_members_refuse_derivative_bounds() {
        for id in ["f6", "f7"] {
            let f = Integrand::by_id(id, 2).unwrap();
            let err = f.derivative_bound(&[1, 0]).unwrap_err();
            assert!(err.to_string().contains("not differentiable"), "{err}");
        }
    }

    #[test]
    fn domain_and_shape_are_enforced() {
        let f = Integrand::by_id("f1", 2).unwrap();
        match f.eval(&[0.5, 1.0]) {
            Err(Error::OutOfDomain { axis: 1, value }) => assert_eq!(value, 1.0),
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
        assert!(f.eval(&[0.5]).is_err());
        assert!(f.eval(&[-0.1, 0.5]).is_err());
        assert!(Integrand::by_id("f9", 2).is_err());
        assert!(Integrand::by_id("f1", 0).is_err());
    }

    #[test]
    fn product_members_factor_bit_for_bit() {
        let mut rng = stream_rng(7, DOMAIN_PROBE, 1, 0);
        for id in ["f4", "f5", "f6", "f7"] {
            let f3d = Integrand::by_id(id, 3).unwrap();
            let f1d = Integrand::by_id(id, 1).unwrap();
            for _ in 0..200 {
                let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                let direct = f3d.eval(&x).unwrap();
                let factored = x.iter().fold(1.0, |p, &xi| p * f1d.eval(&[xi]).unwrap());
                assert_eq!(direct.to_bits(), factored.to_bits(), "{id} at {x:?}");
            }
        }
    }

    #[test]
    fn registry_is_complete_and_consistent() {
        let all = Integrand::all(3).unwrap();
        assert_eq!(all.len(), 8);
        for (k, f) in all.iter().enumerate() {
            assert_eq!(f.id(), format!("f{k}"));
            assert_eq!(f.dimension(), 3);
        }
        assert_eq!(all[5].smoothness(), Smoothness::Smooth);
        assert_eq!(all[6].smoothness(), Smoothness::ContinuousNondifferentiable);
        assert_eq!(all[7].smoothness(), Smoothness::Discontinuous);
        assert_eq!(all[0].integral_provenance(), "exact rational moment recurrence");
        assert_eq!(all[4].integral_provenance(), "certified series");
    }

    #[test]
    fn known_integral_values() {
        // Σ over one axis: E[U^6] = 1/7; products: (π/4)^2, (1/2)^3, (1/3)^2.
        assert!((Integrand::by_id("f0", 1).unwrap().exact_integral() - 1.0 / 7.0).abs() < 1e-16);
        let f5 = Integrand::by_id("f5", 2).unwrap();
        assert!((f5.exact_integral() - (std::f64::consts::PI / 4.0).powi(2)).abs() < 1e-16);
        assert_eq!(Integrand::by_id("f6", 3).unwrap().exact_integral(), 0.125);
        assert!((Integrand::by_id("f7", 2).unwrap().exact_integral() - 1.0 / 9.0).abs() < 1e-16);
        // cos: s = 1 → sin 1.
        assert!((Integrand::by_id("f3", 1).unwrap().exact_integral() - 1.0f64.sin()).abs() < 1e-15);
    }
}
