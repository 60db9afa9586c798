//! Error constants for the window-summation view of a walk.
//!
//! The transformed program accumulates geometrically growing windows of
//! steps: a warm-up of `n0` iterations, then windows `(n', ceil(k n')]`.
//! Each window sum is almost normally distributed; this module computes the
//! constants quantifying "almost":
//!
//! * `c0` — the worst-case CDF deviation from the normal, from the
//!   Berry-Esseen ratio of the window plus the normalized drift;
//! * `delta1` — the sub-Gaussian tail offset, the normalized drift alone;
//! * `delta'` — the variance-growth slack relating consecutive windows;
//! * `C1 = 4p(1-p)` — the sub-Gaussian variance factor of two-point steps;
//! * `b` — the tail-bound constant of the conditioned summation process.
//!
//! Suprema/infima over all windows are evaluated on the geometric grid
//! `n0, ceil(k n0), ...` and closed off beyond a cap by a leading-term
//! envelope: once the lower-order coefficient mass of the cumulative
//! polynomials is small, every later window is bounded through the leading
//! terms alone, whose ratio decays like `n^(-1/2)`.

use crate::poly::{rational_to_f64, window_sum_bracket, Polynomial, Rational, TermPoly};
use crate::walk::{check_preconditions, sign_stable_from, WalkMoments};
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Berry-Esseen absolute constant (refined bound).
pub const BERRY_ESSEEN: f64 = 0.5591;

/// Pinned CDF deviation in exponent-only mode.
pub const EXPONENT_ONLY_C0: f64 = 1e-8;
/// Pinned tail offset in exponent-only mode.
pub const EXPONENT_ONLY_DELTA1: f64 = 1e-8;
/// Pinned variance-growth slack in exponent-only mode; `delta'` approaches 1
/// from below, so the pinned value sits just under it.
pub const EXPONENT_ONLY_DELTA_PRIME: f64 = 1.0 - 1e-8;

/// How the error constants are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Compute `c0`, `delta1`, `delta'` from the walk and `(n0, k)`; the
    /// resulting survival bound is fully certified and an explicit expected
    /// stopping-time bound can be derived.
    Certified,
    /// Pin the convergent constants at their limits (they vanish as `n0`
    /// grows); only the exponent of the survival bound is meaningful.
    ExponentOnly,
}

#[derive(Debug, Error)]
pub enum ConstError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

/// Program-transformation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    /// Warm-up iterations before the first guard check.
    pub n0: u64,
    /// Window growth factor, `> 1`.
    pub k: f64,
    /// Variance-growth ratio `d = delta' k^(2 deg + 1) - 1`.
    pub d: f64,
    /// Conditioning fraction (termination-probability lower bound).
    pub epsilon: f64,
    /// Rounding slack `1/n0` entering the survival exponent.
    pub tau: f64,
}

impl TransformParams {
    pub fn new(n0: u64, k: f64, d: f64, epsilon: f64) -> Self {
        TransformParams {
            n0,
            k,
            d,
            epsilon,
            tau: 1.0 / n0 as f64,
        }
    }
}

/// The assembled constants of one analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorConstants {
    pub c0: f64,
    pub delta1: f64,
    pub delta_prime: f64,
    pub c1: f64,
    pub b: f64,
}

/// Sub-Gaussian variance factor `C1 = 4p(1-p)` of a two-point step.
pub fn c1_of(p: f64) -> f64 {
    4.0 * p * (1.0 - p)
}

/// `C1` from the exact branch probability. The rational product makes the
/// value bit-identical under `p <-> 1-p`, which float evaluation does not
/// guarantee.
pub fn c1_of_rational(p: &Rational) -> f64 {
    let q = Rational::from_integer(1.into()) - p;
    rational_to_f64(&(Rational::from_integer(4.into()) * p * q))
}

/// Smallest admissible tail-bound constant
/// `b = sqrt(2 ln(1/(1-eps))) / (sqrt(C1) (sqrt(1+d) - 1))`.
pub fn compute_b(epsilon: f64, d: f64, c1: f64) -> Result<f64, ConstError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ConstError::Domain(format!("epsilon not in (0,1): {epsilon}")));
    }
    if d <= 0.0 {
        return Err(ConstError::Domain(format!("d must be positive: {d}")));
    }
    if !(c1 > 0.0 && c1 <= 1.0) {
        return Err(ConstError::Domain(format!("C1 not in (0,1]: {c1}")));
    }
    let num = (2.0 * (1.0 / (1.0 - epsilon)).ln()).sqrt();
    Ok(num / (c1.sqrt() * ((1.0 + d).sqrt() - 1.0)))
}

/// `ceil(k * n)`; the one rounding convention shared by every window
/// computation (grid steps, window ends, the transformed program's windows).
pub fn ceil_mul(k: f64, n: u64) -> u64 {
    let v = (k * n as f64).ceil();
    if v <= n as f64 {
        n + 1
    } else {
        v as u64
    }
}

/// CDF-deviation constant `c0`: an upper bound for the deviation of every
/// window sum from the normal CDF.
///
/// Per window this is the Berry-Esseen ratio
/// `0.5591 * sum E|X-EX|^3 / (sum Var)^(3/2)` plus the normalized drift
/// `|sum E| / sqrt(sum Var)`; the warm-up window additionally carries `y0`.
pub fn compute_c0(w: &WalkMoments, t: &TransformParams) -> Result<f64, ConstError> {
    let sums = MomentSums::build(w, t)?;
    sums.sup_window_deviation(true)
}

/// Tail offset `delta1`: the normalized drift
/// `max(|sum E| / sqrt(sum Var), (y0 + sum E)/sqrt(sum Var))` over windows.
pub fn compute_delta1(w: &WalkMoments, t: &TransformParams) -> Result<f64, ConstError> {
    let sums = MomentSums::build(w, t)?;
    sums.sup_window_deviation(false)
}

/// Variance-growth slack: the largest `delta' <= 1` with
/// `q_var(ceil(k n)) - q_var(n) >= (delta' k^m - 1) q_var(n)` for all
/// `n >= n0`, where `q_var` is the cumulative variance and `m` its degree.
pub fn compute_delta_prime(w: &WalkMoments, t: &TransformParams) -> Result<f64, ConstError> {
    if w.deg_var < Rational::from_integer(1.into()) {
        return Err(ConstError::PreconditionViolated(
            "variance degree must be at least 1".into(),
        ));
    }
    let var_sums = CumQuantity::build(&w.var)?;
    let m = rational_to_f64(&w.deg_var) + 1.0;
    let km = t.k.powf(m);

    let mut delta = f64::INFINITY;
    let mut n = t.n0;
    let mut steps = 0usize;
    loop {
        let hi_end = ceil_mul(t.k, n);
        let (q_lo, _) = var_sums.prefix(hi_end);
        let (_, q_hi) = var_sums.prefix(n);
        if q_hi <= 0.0 {
            return Err(ConstError::PreconditionViolated(format!(
                "cumulative variance not positive at n = {n}"
            )));
        }
        delta = delta.min(q_lo / (km * q_hi));
        steps += 1;
        n = hi_end;
        if steps >= GRID_STEPS {
            // envelope bound covers every n beyond the cap
            let eta = var_sums.envelope(n);
            let beyond = (1.0 - eta) / (1.0 + eta);
            if beyond >= delta || steps >= GRID_STEPS_MAX || n >= GRID_N_MAX {
                delta = delta.min(beyond);
                break;
            }
        }
    }
    if delta <= 0.0 || delta.is_nan() {
        return Err(ConstError::Unsupported(
            "variance-growth ratio could not be bounded away from zero".into(),
        ));
    }
    Ok(delta.min(1.0))
}

/// Assembles all constants for a walk at the given parameters and mode.
pub fn error_constants(
    w: &WalkMoments,
    t: &TransformParams,
    mode: Mode,
) -> Result<ErrorConstants, ConstError> {
    let c1 = c1_of_rational(&w.p);
    let (c0, delta1, delta_prime) = match mode {
        Mode::ExponentOnly => (
            EXPONENT_ONLY_C0,
            EXPONENT_ONLY_DELTA1,
            EXPONENT_ONLY_DELTA_PRIME,
        ),
        Mode::Certified => (
            compute_c0(w, t)?,
            compute_delta1(w, t)?,
            compute_delta_prime(w, t)?,
        ),
    };
    let b = compute_b(t.epsilon, t.d, c1)?;
    Ok(ErrorConstants {
        c0,
        delta1,
        delta_prime,
        c1,
        b,
    })
}

const GRID_STEPS: usize = 20;
const GRID_STEPS_MAX: usize = 200;
const GRID_N_MAX: u64 = 1_000_000_000_000_000;

/// A cumulative sum `S(n) = sum_{i=1}^n f(i)` of a generalized polynomial,
/// with window sums, a leading-term model and an envelope factor.
struct CumQuantity {
    /// Closed form when every exponent is integral.
    exact: Option<Polynomial>,
    /// The summand, for the bracketing fallback.
    summand: TermPoly,
    /// `(c, m)` of the leading behavior `c n^m` of the cumulative sum.
    lead_coeff: f64,
    lead_expo: f64,
}

impl CumQuantity {
    fn build(summand: &TermPoly) -> Result<Self, ConstError> {
        if summand.is_zero() {
            return Ok(CumQuantity {
                exact: Some(Polynomial::zero()),
                summand: summand.clone(),
                lead_coeff: 0.0,
                lead_expo: 0.0,
            });
        }
        let exact = summand.as_polynomial().map(|p| p.range_sum());
        let (lead_coeff, lead_expo) = match &exact {
            Some(rs) => {
                let d = rs.degree().expect("nonzero range sum") as f64;
                (rational_to_f64(rs.leading_coeff().expect("nonzero")), d)
            }
            None => {
                let t = summand.leading().expect("nonzero");
                let e = rational_to_f64(&t.expo);
                (rational_to_f64(&t.coeff) / (e + 1.0), e + 1.0)
            }
        };
        Ok(CumQuantity {
            exact,
            summand: summand.clone(),
            lead_coeff,
            lead_expo,
        })
    }

    fn is_zero(&self) -> bool {
        self.summand.is_zero()
    }

    /// `(lower, upper)` for `S(n)`.
    fn prefix(&self, n: u64) -> (f64, f64) {
        match &self.exact {
            Some(rs) => {
                let v = rational_to_f64(&rs.eval_u64(n));
                (v, v)
            }
            None => window_sum_bracket(&self.summand, 1, n),
        }
    }

    /// `(lower, upper)` for the window sum over `[a, b]`.
    fn window(&self, a: u64, b: u64) -> (f64, f64) {
        match &self.exact {
            Some(rs) => {
                let v = rational_to_f64(&(rs.eval_u64(b) - rs.eval_u64(a - 1)));
                (v, v)
            }
            None => window_sum_bracket(&self.summand, a, b),
        }
    }

    /// Envelope factor `eta` with `S(x)` within `(1 +- eta) c x^m` for all
    /// `x >= cap`: the relative mass of everything below the leading term,
    /// which only shrinks as `x` grows.
    fn envelope(&self, cap: u64) -> f64 {
        let lead = self.lead_coeff.abs() * (cap as f64).powf(self.lead_expo);
        if lead == 0.0 {
            return 0.0;
        }
        match &self.exact {
            Some(rs) => {
                let x = cap as f64;
                let mut mass = 0.0;
                let deg = rs.degree().unwrap_or(0);
                for (i, c) in rs.coeffs().iter().enumerate() {
                    if i < deg {
                        mass += rational_to_f64(&c.abs()) * x.powi(i as i32);
                    }
                }
                mass / lead
            }
            None => {
                let (lo, hi) = self.prefix(cap);
                let dev = (hi - self.lead_coeff * (cap as f64).powf(self.lead_expo))
                    .abs()
                    .max((self.lead_coeff * (cap as f64).powf(self.lead_expo) - lo).abs());
                dev / lead
            }
        }
    }
}

/// Window-sum machinery for one walk: cumulative drift, variance, and cubed
/// branch gap, with the sign threshold that turns `|diff|^3` sums into
/// polynomial sums.
struct MomentSums {
    n0: u64,
    k: f64,
    y0: f64,
    /// `E|X-EX|^3 = kappa |diff|^3`.
    kappa: f64,
    mean: CumQuantity,
    var: CumQuantity,
    /// Cumulative `diff^3` (signed).
    d3: CumQuantity,
    /// `diff` keeps the sign of its leading coefficient from here on.
    sign_from: u64,
    lead_sign: f64,
    diff: TermPoly,
    variance_dominance: bool,
}

impl MomentSums {
    fn build(w: &WalkMoments, t: &TransformParams) -> Result<Self, ConstError> {
        let report = check_preconditions(w);
        if !report.variance_dominance {
            return Err(ConstError::PreconditionViolated(
                "variance degree does not dominate twice the drift degree plus one".into(),
            ));
        }
        if t.n0 == 0 || t.k <= 1.0 {
            return Err(ConstError::Domain(format!(
                "need n0 >= 1 and k > 1, got n0 = {}, k = {}",
                t.n0, t.k
            )));
        }
        let d3_poly = w.diff.mul(&w.diff).mul(&w.diff);
        let sign_from = sign_stable_from(&w.diff);
        if sign_from > 10_000_000 {
            return Err(ConstError::Unsupported(
                "branch gap changes sign too deep into the walk".into(),
            ));
        }
        let lead_sign = w
            .diff
            .leading()
            .map(|t| if t.coeff.is_negative() { -1.0 } else { 1.0 })
            .unwrap_or(1.0);
        Ok(MomentSums {
            n0: t.n0,
            k: t.k,
            y0: w.y0_f64(),
            kappa: rational_to_f64(&w.abs3_factor()),
            mean: CumQuantity::build(&w.mean)?,
            var: CumQuantity::build(&w.var)?,
            d3: CumQuantity::build(&d3_poly)?,
            sign_from,
            lead_sign,
            diff: w.diff.clone(),
            variance_dominance: report.variance_dominance,
        })
    }

    /// Upper bound for `sum_{i=a}^{b} |diff(i)|^3`.
    fn abs_d3_hi(&self, a: u64, b: u64) -> f64 {
        if a > b {
            return 0.0;
        }
        if a > self.sign_from {
            let (lo, hi) = self.d3.window(a, b);
            return if self.lead_sign >= 0.0 { hi } else { -lo };
        }
        let split = b.min(self.sign_from);
        let mut head = 0.0;
        for i in a..=split {
            head += self.diff.eval_f64(i as f64).abs().powi(3);
        }
        head + self.abs_d3_hi(split + 1, b)
    }

    /// Upper bound for `|sum_{i=a}^{b} mean(i)|`.
    fn abs_mean_hi(&self, a: u64, b: u64) -> f64 {
        let (lo, hi) = self.mean.window(a, b);
        lo.abs().max(hi.abs())
    }

    /// Berry-Esseen ratio plus drift deviation for the window `[a, b]`;
    /// `with_be` toggles the Berry-Esseen part (off for `delta1`), and
    /// `initial` adds `y0` to the drift numerator.
    fn window_term(&self, a: u64, b: u64, with_be: bool, initial: bool) -> Result<f64, ConstError> {
        let (var_lo, _) = self.var.window(a, b);
        if var_lo <= 0.0 {
            return Err(ConstError::PreconditionViolated(format!(
                "window [{a}, {b}] has no positive variance"
            )));
        }
        let mut drift = self.abs_mean_hi(a, b);
        if initial {
            let (mlo, mhi) = self.mean.window(a, b);
            drift = (self.y0 + mlo).abs().max((self.y0 + mhi).abs());
        }
        let mut v = drift / var_lo.sqrt();
        if with_be {
            v += BERRY_ESSEEN * self.kappa * self.abs_d3_hi(a, b) / var_lo.powf(1.5);
        }
        if !v.is_finite() {
            return Err(ConstError::Unsupported(
                "window sums overflow double precision".into(),
            ));
        }
        Ok(v)
    }

    /// Bound for every window starting at or beyond `cap`, via leading-term
    /// envelopes; decreasing in the window start by the degree bookkeeping
    /// (`-1/2` for the Berry-Esseen part, negative for the drift part by the
    /// dominance precondition).
    fn beyond_cap(&self, cap: u64, with_be: bool) -> Result<f64, ConstError> {
        let eta_v = self.var.envelope(cap);
        let m_v = self.var.lead_expo;
        let gamma = (1.0 - eta_v) * self.k.powf(m_v) - (1.0 + eta_v);
        if gamma <= 0.0 {
            return Ok(f64::INFINITY); // caller extends the grid
        }
        let k_plus = self.k + 1.0 / cap as f64;
        let x = cap as f64;
        let var_floor = self.var.lead_coeff * gamma * x.powf(m_v);
        let mut v = 0.0;
        if !self.mean.is_zero() {
            let eta_m = self.mean.envelope(cap);
            let m_m = self.mean.lead_expo;
            let num = 2.0 * (1.0 + eta_m) * self.mean.lead_coeff.abs() * (k_plus * x).powf(m_m);
            v += num / var_floor.sqrt();
        }
        if with_be {
            let eta_a = self.d3.envelope(cap);
            let m_a = self.d3.lead_expo;
            let num = (1.0 + eta_a) * self.d3.lead_coeff.abs() * (k_plus * x).powf(m_a);
            v += BERRY_ESSEEN * self.kappa * num / var_floor.powf(1.5);
        }
        Ok(v)
    }

    /// Sup over the warm-up window and all later windows.
    fn sup_window_deviation(&self, with_be: bool) -> Result<f64, ConstError> {
        debug_assert!(self.variance_dominance);
        let mut sup = self.window_term(1, self.n0, with_be, true)?;
        let mut n = self.n0;
        let mut steps = 0usize;
        loop {
            let end = ceil_mul(self.k, n);
            sup = sup.max(self.window_term(n + 1, end, with_be, false)?);
            n = end;
            steps += 1;
            if steps >= GRID_STEPS {
                let beyond = self.beyond_cap(n, with_be)?;
                if beyond <= sup || steps >= GRID_STEPS_MAX || n >= GRID_N_MAX {
                    if !beyond.is_finite() {
                        return Err(ConstError::Unsupported(
                            "leading-term envelope did not stabilize".into(),
                        ));
                    }
                    return Ok(sup.max(beyond));
                }
            }
        }
    }
}
