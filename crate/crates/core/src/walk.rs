//! The polynomial random walk model: branch polynomials, moment polynomials,
//! and the degree preconditions the analysis needs.
//!
//! A walk updates `y <- y + q1[n]` with probability `p` and `y <- y + q2[n]`
//! otherwise, while `y > 0`. Both the drift `E(X_n)` and the central variance
//! `Var(X_n)` are (generalized) polynomials in `n`; the analysis applies when
//! the variance degree dominates the drift degree.

use crate::poly::{rat, rational_to_f64, Rational, TermPoly};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("branch probability must satisfy 0 < p < 1, got {0}")]
    InvalidProbability(String),
    #[error("q1 and q2 coincide: the walk is deterministic and its variance vanishes")]
    DegenerateVariance,
    #[error("initial value y0 must be positive, got {0}")]
    NonpositiveStart(String),
    #[error("variance vanishes at iteration n = {0}")]
    VanishingVariance(u64),
    #[error("negative exponents are not part of the walk model")]
    NegativeExponent,
}

/// A polynomial random walk `(q1, q2, p, y0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkSpec {
    q1: TermPoly,
    q2: TermPoly,
    p: Rational,
    y0: Rational,
}

impl WalkSpec {
    /// Equal branches (`q1 = q2`) are accepted here so that degenerate walks
    /// can still be simulated; [`moments`] rejects them, so every analysis
    /// path sees the variance invariant enforced.
    pub fn new(q1: TermPoly, q2: TermPoly, p: Rational, y0: Rational) -> Result<Self, WalkError> {
        if p <= Rational::zero() || p >= Rational::one() {
            return Err(WalkError::InvalidProbability(p.to_string()));
        }
        if y0 <= Rational::zero() {
            return Err(WalkError::NonpositiveStart(y0.to_string()));
        }
        for t in q1.terms().iter().chain(q2.terms()) {
            if t.expo.is_negative() {
                return Err(WalkError::NegativeExponent);
            }
        }
        Ok(WalkSpec { q1, q2, p, y0 })
    }

    pub fn q1(&self) -> &TermPoly {
        &self.q1
    }

    pub fn q2(&self) -> &TermPoly {
        &self.q2
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn y0(&self) -> &Rational {
        &self.y0
    }

    /// `deg(P) = max(deg q1, deg q2)` as a rational exponent (fractional
    /// degrees are the rational exponent of the leading term).
    pub fn degree(&self) -> Rational {
        let d1 = self.q1.degree().cloned().unwrap_or_else(|| rat(0, 1));
        let d2 = self.q2.degree().cloned().unwrap_or_else(|| rat(0, 1));
        d1.max(d2)
    }
}

/// Moment data derived from a [`WalkSpec`]: drift polynomial `E(X_n)`,
/// central variance `Var(X_n) = p(1-p)(q1-q2)^2`, and the pieces needed for
/// third-absolute-moment sums.
#[derive(Debug, Clone)]
pub struct WalkMoments {
    pub mean: TermPoly,
    pub var: TermPoly,
    /// `q1 - q2`; the variance is `p(1-p) diff^2` and the third absolute
    /// central moment is `p(1-p)(p^2+(1-p)^2) |diff|^3`.
    pub diff: TermPoly,
    pub p: Rational,
    pub y0: Rational,
    pub deg_walk: Rational,
    /// `None` marks the identically-zero drift.
    pub deg_mean: Option<Rational>,
    pub deg_var: Rational,
}

impl WalkMoments {
    /// Third absolute central moment `E|X_n - E(X_n)|^3` at `n`.
    pub fn abs3(&self, n: f64) -> f64 {
        let p = rational_to_f64(&self.p);
        let d = self.diff.eval_f64(n).abs();
        p * (1.0 - p) * (p * p + (1.0 - p) * (1.0 - p)) * d * d * d
    }

    /// Exact coefficient of `|diff|^3` in the third absolute central moment.
    pub fn abs3_factor(&self) -> Rational {
        let p = &self.p;
        let q = Rational::one() - p;
        p * &q * (p * p + &q * &q)
    }

    pub fn p_f64(&self) -> f64 {
        rational_to_f64(&self.p)
    }

    pub fn y0_f64(&self) -> f64 {
        rational_to_f64(&self.y0)
    }
}

/// Precondition report for the CDF-convergence and PAST-threshold arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    /// `deg(Var) > 2 deg(E) + 1`; trivially true for zero drift.
    pub variance_dominance: bool,
    /// `deg(P) > deg(E)`: the step degree strictly exceeds the drift degree.
    pub drift_condition: bool,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.variance_dominance && self.drift_condition
    }
}

/// Computes `E(X_n) = p q1 + (1-p) q2` and the central variance
/// `Var(X_n) = p (q1 - E)^2 + (1-p) (q2 - E)^2`, expanded exactly.
///
/// Errors if the variance polynomial is identically zero, or vanishes at some
/// iteration `n >= 1` (the analysis needs strictly positive step variance).
pub fn moments(w: &WalkSpec) -> Result<WalkMoments, WalkError> {
    let p = w.p.clone();
    let q = Rational::one() - &p;
    let mean = w.q1.scale(&p).add(&w.q2.scale(&q));
    let diff = w.q1.sub(&w.q2);
    let var = diff.mul(&diff).scale(&(&p * &q));
    if var.is_zero() {
        return Err(WalkError::DegenerateVariance);
    }
    check_positive_from_one(&diff)?;
    let deg_walk = w.degree();
    let deg_mean = mean.degree().cloned();
    let deg_var = var.degree().cloned().expect("variance is nonzero");
    Ok(WalkMoments {
        mean,
        var,
        diff,
        p,
        y0: w.y0.clone(),
        deg_walk,
        deg_mean,
        deg_var,
    })
}

/// The variance is `p(1-p) diff(n)^2`, so it vanishes exactly at integer
/// roots of `diff`. Integer roots can only occur below the point where the
/// leading term dominates the others; scan up to that bound.
fn check_positive_from_one(diff: &TermPoly) -> Result<(), WalkError> {
    let bound = sign_stable_from(diff).min(1_000_000);
    if let Some(p) = diff.as_polynomial() {
        for n in 1..=bound {
            if p.eval_u64(n).is_zero() {
                return Err(WalkError::VanishingVariance(n));
            }
        }
    } else {
        for n in 1..=bound {
            if diff.eval_f64(n as f64) == 0.0 {
                return Err(WalkError::VanishingVariance(n));
            }
        }
    }
    Ok(())
}

/// Smallest `N` such that for all `n >= N` the leading term of `tp` strictly
/// dominates the combined magnitude of the lower-order terms, so `tp(n)` has
/// the sign of its leading coefficient. Returns 1 for single-term inputs.
pub(crate) fn sign_stable_from(tp: &TermPoly) -> u64 {
    let Some(lead) = tp.leading() else { return 1 };
    let terms = tp.terms();
    if terms.len() == 1 {
        return 1;
    }
    let lead_c = rational_to_f64(&lead.coeff).abs();
    let lead_e = rational_to_f64(&lead.expo);
    let mut rest: f64 = 0.0;
    let mut next_e = f64::NEG_INFINITY;
    for t in &terms[..terms.len() - 1] {
        rest += rational_to_f64(&t.coeff).abs();
        next_e = next_e.max(rational_to_f64(&t.expo));
    }
    let gap = lead_e - next_e;
    // sum |c_i| n^{e_i} <= rest * n^{next_e} < lead_c * n^{lead_e}
    // as soon as n^gap > rest / lead_c
    let n = (rest / lead_c).powf(1.0 / gap);
    if !n.is_finite() {
        return u64::MAX;
    }
    (n.floor() as u64).saturating_add(2).max(1)
}

/// Checks the two degree preconditions.
pub fn check_preconditions(m: &WalkMoments) -> ConditionReport {
    let two = rat(2, 1);
    let one = rat(1, 1);
    let variance_dominance = match &m.deg_mean {
        None => true,
        Some(dm) => m.deg_var > &two * dm + &one,
    };
    let drift_condition = match &m.deg_mean {
        None => true,
        Some(dm) => m.deg_walk > *dm,
    };
    ConditionReport {
        variance_dominance,
        drift_condition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn tp(coeffs: &[i64]) -> TermPoly {
        TermPoly::from_polynomial(&Polynomial::from_ints(coeffs))
    }

    fn walk(q1: &[i64], q2: &[i64], p: (i64, i64), y0: i64) -> WalkSpec {
        WalkSpec::new(tp(q1), tp(q2), rat(p.0, p.1), rat(y0, 1)).unwrap()
    }

    #[test]
    fn invariants_rejected() {
        assert!(WalkSpec::new(tp(&[0, 1]), tp(&[0, -1]), rat(1, 1), rat(1, 1)).is_err());
        assert!(WalkSpec::new(tp(&[0, 1]), tp(&[0, -1]), rat(1, 2), rat(0, 1)).is_err());
        // equal branches construct (simulation still works) but never analyze
        let w = WalkSpec::new(tp(&[0, 1]), tp(&[0, 1]), rat(1, 2), rat(1, 1)).unwrap();
        assert!(matches!(moments(&w), Err(WalkError::DegenerateVariance)));
    }

    #[test]
    fn figure_walk_moments() {
        // q1 = -n+3, q2 = n+5, p = 1/2: mean = 4, var = (n+1)^2
        let m = moments(&walk(&[3, -1], &[5, 1], (1, 2), 1)).unwrap();
        assert_eq!(m.mean.as_polynomial().unwrap(), Polynomial::from_ints(&[4]));
        assert_eq!(
            m.var.as_polynomial().unwrap(),
            Polynomial::from_ints(&[1, 2, 1])
        );
        assert_eq!(m.deg_var, rat(2, 1));
        assert_eq!(m.deg_mean, Some(rat(0, 1)));
    }

    #[test]
    fn symmetric_zero_drift() {
        let m = moments(&walk(&[0, 1], &[0, -1], (1, 2), 1)).unwrap();
        assert!(m.mean.is_zero());
        assert_eq!(
            m.var.as_polynomial().unwrap(),
            Polynomial::from_ints(&[0, 0, 1])
        );
        assert_eq!(m.deg_mean, None);
    }

    #[test]
    fn skewed_cubic_zero_mean() {
        // q1 = n^3/0.99 with p = 0.99, q2 = -n^3/0.01: mean = 0,
        // var = n^6 (1/0.99 + 100), cross-checked at n = 1, 2 against the
        // explicit two-point distribution.
        let q1 = TermPoly::new(vec![(rat(100, 99), rat(3, 1))]);
        let q2 = TermPoly::new(vec![(rat(-100, 1), rat(3, 1))]);
        let w = WalkSpec::new(q1, q2, rat(99, 100), rat(1, 1)).unwrap();
        let m = moments(&w).unwrap();
        assert!(m.mean.is_zero());
        for n in [1u64, 2] {
            let x1 = 100.0 / 99.0 * (n as f64).powi(3);
            let x2 = -100.0 * (n as f64).powi(3);
            let (p, q) = (0.99, 0.01);
            let mean = p * x1 + q * x2;
            let var_oracle = p * (x1 - mean).powi(2) + q * (x2 - mean).powi(2);
            let var = m.var.eval_f64(n as f64);
            assert!((var - var_oracle).abs() < 1e-9 * var_oracle);
            let expect = (1.0 / 0.99 + 100.0) * (n as f64).powi(6);
            assert!((var - expect).abs() < 1e-9 * expect);
        }
    }

    #[test]
    fn preconditions_examples() {
        // mean = 4 constant, var = (n+1)^2: 2 > 1 and 1 > 0
        let r = check_preconditions(&moments(&walk(&[3, -1], &[5, 1], (1, 2), 1)).unwrap());
        assert!(r.variance_dominance && r.drift_condition);

        // zero drift: both hold for any degree
        let r = check_preconditions(&moments(&walk(&[0, 1], &[0, -1], (1, 2), 1)).unwrap());
        assert!(r.all_hold());

        // q1 = n, q2 = 3n: mean = 2n has the walk degree; analyzer refuses
        let r = check_preconditions(&moments(&walk(&[0, 1], &[0, 3], (1, 2), 1)).unwrap());
        assert!(!r.drift_condition);
    }

    #[test]
    fn vanishing_variance_detected() {
        // diff = n - 5 vanishes at n = 5
        let w = walk(&[-5, 1], &[0], (1, 2), 1);
        assert!(matches!(moments(&w), Err(WalkError::VanishingVariance(5))));
    }

    #[test]
    fn fractional_degree_walk() {
        let q1 = TermPoly::new(vec![(rat(1, 1), rat(1, 2))]);
        let q2 = TermPoly::new(vec![(rat(-1, 1), rat(1, 2))]);
        let w = WalkSpec::new(q1, q2, rat(1, 2), rat(1, 1)).unwrap();
        let m = moments(&w).unwrap();
        assert_eq!(w.degree(), rat(1, 2));
        assert_eq!(m.deg_var, rat(1, 1));
        assert!(check_preconditions(&m).all_hold());
    }

    #[test]
    fn preconditions_invariant_under_branch_swap() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let deg = rng.gen_range(1..=4usize);
            let mut c1 = vec![0i64; deg + 1];
            let mut c2 = vec![0i64; deg + 1];
            for i in 0..=deg {
                c1[i] = rng.gen_range(-10..=10);
                c2[i] = rng.gen_range(-10..=10);
            }
            c1[deg] = rng.gen_range(1..=10);
            c2[deg] = -rng.gen_range(1..=10);
            let pn = rng.gen_range(1..=9);
            let (w1, w2) = (
                WalkSpec::new(tp(&c1), tp(&c2), rat(pn, 10), rat(1, 1)),
                WalkSpec::new(tp(&c2), tp(&c1), rat(10 - pn, 10), rat(1, 1)),
            );
            let (Ok(w1), Ok(w2)) = (w1, w2) else { continue };
            let (Ok(m1), Ok(m2)) = (moments(&w1), moments(&w2)) else {
                continue;
            };
            assert_eq!(check_preconditions(&m1), check_preconditions(&m2));
        }
    }

    proptest! {
        /// Moments agree with the exact two-point distribution, exactly in
        /// rational arithmetic and to 1e-12 relative for abs3.
        #[test]
        fn moments_match_two_point_distribution(
            c1 in proptest::collection::vec(-10i64..=10, 1..=5),
            c2 in proptest::collection::vec(-10i64..=10, 1..=5),
            pn in 1i64..10,
            n in 1u64..=20,
        ) {
            let (q1, q2) = (tp(&c1), tp(&c2));
            prop_assume!(q1 != q2);
            let p = rat(pn, 10);
            let Ok(w) = WalkSpec::new(q1.clone(), q2.clone(), p.clone(), rat(1, 1)) else {
                return Ok(());
            };
            let Ok(m) = moments(&w) else { return Ok(()) };

            let x = Rational::from_integer(BigInt::from(n));
            let v1 = q1.eval_rational(&x).unwrap();
            let v2 = q2.eval_rational(&x).unwrap();
            let q = Rational::one() - &p;
            let mean = &p * &v1 + &q * &v2;
            prop_assert_eq!(m.mean.eval_rational(&x).unwrap(), mean.clone());
            let var = &p * (&v1 - &mean) * (&v1 - &mean) + &q * (&v2 - &mean) * (&v2 - &mean);
            let got_var = m.var.eval_rational(&x).unwrap();
            prop_assert_eq!(got_var.clone(), var.clone());
            prop_assert!(got_var >= Rational::zero());

            let pf = rational_to_f64(&p);
            let (v1f, v2f, mf) = (rational_to_f64(&v1), rational_to_f64(&v2), rational_to_f64(&mean));
            let abs3_oracle = pf * (v1f - mf).abs().powi(3) + (1.0 - pf) * (v2f - mf).abs().powi(3);
            let abs3 = m.abs3(n as f64);
            if abs3_oracle > 0.0 {
                prop_assert!((abs3 - abs3_oracle).abs() <= 1e-12 * abs3_oracle.max(1.0));
            }
        }
    }
}
