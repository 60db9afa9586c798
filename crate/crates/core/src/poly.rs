//! Exact univariate polynomial arithmetic over arbitrary-precision rationals.
//!
//! [`Polynomial`] is the dense integer-exponent workhorse; it supports
//! closed-form summation over index ranges ([`Polynomial::range_sum`]), which
//! the error-constant machinery uses for moment accumulation. [`TermPoly`] is
//! a generalized sparse term list `c * n^e` with *rational* exponents, needed
//! for walks of fractional degree; it evaluates through floating point and
//! its range sums fall back to direct summation with integral bracketing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Arbitrary-precision rational scalar used for all exact coefficient work.
pub type Rational = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Dense univariate polynomial in the loop counter `n` with rational
/// coefficients; `coeffs[i]` holds the coefficient of `n^i`.
///
/// The zero polynomial is the empty coefficient list, and the trailing
/// coefficient of a nonzero polynomial is never zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    /// Builds a polynomial from ascending-degree coefficients, stripping
    /// trailing zeros.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Polynomial { coeffs };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `n^1` with unit coefficient.
    pub fn identity() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// Builds from integer coefficients, ascending degree.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c, 1)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` marks the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Polynomial::new(out)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_u64(&self, x: u64) -> Rational {
        self.eval(&Rational::from_integer(BigInt::from(x)))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(c);
        }
        acc
    }

    /// Closed-form range sum: returns `S` with `S(N) = sum_{i=1}^{N} self(i)`
    /// for every integer `N >= 0`. Sums over a window `[a, b]` are
    /// `S(b) - S(a-1)`. Raises the degree by one for nonzero input.
    pub fn range_sum(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&power_sum(k).scale(c));
            }
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})n^{i}")?;
        }
        Ok(())
    }
}

/// Faulhaber power sum: the degree-`k+1` polynomial `S_k` with
/// `S_k(N) = sum_{i=1}^{N} i^k`, via the binomial-expansion recurrence
/// `(N+1)^{k+1} - 1 = sum_{j<=k} C(k+1, j) S_j(N)`.
pub fn power_sum(k: usize) -> Polynomial {
    let mut sums: Vec<Polynomial> = Vec::with_capacity(k + 1);
    let n_plus_1 = Polynomial::new(vec![Rational::one(), Rational::one()]);
    for kk in 0..=k {
        // (N+1)^{kk+1} - 1
        let mut lhs = Polynomial::constant(Rational::one());
        for _ in 0..=kk {
            lhs = lhs.mul(&n_plus_1);
        }
        lhs = lhs.sub(&Polynomial::constant(Rational::one()));
        for (j, s) in sums.iter().enumerate() {
            lhs = lhs.sub(&s.scale(&binomial(kk + 1, j)));
        }
        sums.push(lhs.scale(&Rational::new(BigInt::one(), BigInt::from(kk as i64 + 1))));
    }
    sums.pop().expect("k+1 sums computed")
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc *= Rational::new(BigInt::from((n - i) as i64), BigInt::from(i as i64 + 1));
    }
    acc
}

/// Lossy conversion at the float boundary. Falls back to a quotient of
/// rounded parts when the exact parts overflow `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let num = bigint_to_f64(r.numer());
        let den = bigint_to_f64(r.denom());
        num / den
    })
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(if x.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// A single term `coeff * n^expo` with rational exponent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Term {
    pub coeff: Rational,
    pub expo: Rational,
}

/// Generalized polynomial: a sum of terms `c * n^e` with rational exponents
/// `e >= 0`, kept sorted by ascending exponent with no zero coefficients.
///
/// Ordinary polynomials embed via [`TermPoly::from_polynomial`]; walks of
/// fractional degree (`n^(1/2)` and the like) live here natively. Evaluation
/// with fractional exponents is inherently floating point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TermPoly {
    terms: Vec<Term>,
}

impl TermPoly {
    pub fn new(terms: Vec<(Rational, Rational)>) -> Self {
        let mut tp = TermPoly { terms: Vec::new() };
        for (coeff, expo) in terms {
            tp.push(coeff, expo);
        }
        tp
    }

    pub fn zero() -> Self {
        TermPoly { terms: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![(c, Rational::zero())])
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        Self::new(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), rat(i as i64, 1)))
                .collect(),
        )
    }

    /// Dense form, available when every exponent is a nonnegative integer.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        let mut coeffs: Vec<Rational> = Vec::new();
        for t in &self.terms {
            if !t.expo.is_integer() || t.expo.is_negative() {
                return None;
            }
            let i = t.expo.to_integer().to_usize()?;
            if coeffs.len() <= i {
                coeffs.resize(i + 1, Rational::zero());
            }
            coeffs[i] = t.coeff.clone();
        }
        Some(Polynomial::new(coeffs))
    }

    fn push(&mut self, coeff: Rational, expo: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|t| t.expo.cmp(&expo)) {
            Ok(i) => {
                self.terms[i].coeff += coeff;
                if self.terms[i].coeff.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, Term { coeff, expo }),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Rational exponent of the leading term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<&Rational> {
        self.terms.last().map(|t| &t.expo)
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.last()
    }

    pub fn add(&self, other: &TermPoly) -> TermPoly {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.coeff.clone(), t.expo.clone());
        }
        out
    }

    pub fn neg(&self) -> TermPoly {
        TermPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: -t.coeff.clone(),
                    expo: t.expo.clone(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &TermPoly) -> TermPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TermPoly) -> TermPoly {
        let mut out = TermPoly::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.push(&a.coeff * &b.coeff, &a.expo + &b.expo);
            }
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> TermPoly {
        if factor.is_zero() {
            return TermPoly::zero();
        }
        TermPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: &t.coeff * factor,
                    expo: t.expo.clone(),
                })
                .collect(),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += rational_to_f64(&t.coeff) * pow_f64(x, &t.expo);
        }
        acc
    }

    /// Exact evaluation, defined only when every exponent is integral.
    pub fn eval_rational(&self, x: &Rational) -> Option<Rational> {
        self.as_polynomial().map(|p| p.eval(x))
    }
}

fn pow_f64(x: f64, e: &Rational) -> f64 {
    if e.is_integer() {
        match e.to_integer().to_i32() {
            Some(k) => x.powi(k),
            None => x.powf(rational_to_f64(e)),
        }
    } else {
        x.powf(rational_to_f64(e))
    }
}

/// Bracket for `sum_{i=a}^{b} f(i)` of a generalized polynomial with
/// nonnegative exponents, as a `(lower, upper)` pair.
///
/// Short windows are summed directly (exactly, up to f64 rounding). Long
/// windows are bracketed per term by the closed-form integral: a monotone
/// term `c n^e` satisfies `int_{a-1}^{b} <= sum <= int_a^{b+1}` when it
/// increases, with the bracket flipped when it decreases.
pub fn window_sum_bracket(tp: &TermPoly, a: u64, b: u64) -> (f64, f64) {
    if a > b || tp.is_zero() {
        return (0.0, 0.0);
    }
    const DIRECT_LIMIT: u64 = 1 << 14;
    if b - a <= DIRECT_LIMIT {
        let mut s = 0.0;
        for i in a..=b {
            s += tp.eval_f64(i as f64);
        }
        return (s, s);
    }
    let mut lo = 0.0;
    let mut hi = 0.0;
    for t in tp.terms() {
        let c = rational_to_f64(&t.coeff);
        let e = rational_to_f64(&t.expo);
        // antiderivative of x^e is x^(e+1)/(e+1); exponents here are >= 0
        let integral = |x0: f64, x1: f64| (x1.powf(e + 1.0) - x0.powf(e + 1.0)) / (e + 1.0);
        let inc = integral(a.saturating_sub(1) as f64, b as f64);
        let sup = integral(a as f64, (b + 1) as f64);
        if c >= 0.0 {
            lo += c * inc;
            hi += c * sup;
        } else {
            lo += c * sup;
            hi += c * inc;
        }
    }
    (lo, hi)
}
