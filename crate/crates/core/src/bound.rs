//! Inductive CDF lower-bound sets over the conditioned summation process.
//!
//! A bound set states `P(S_n <= a_i sqrt(sum sigma^2)) >= b_i` at anchors
//! `a_1 < ... < a_m`, with extra tail anchors `c_j` where a Chernoff bound
//! supplies the mass. One conditioning-plus-increment step maps a bound set
//! to a new one on the same anchors ([`update`]); a set is *inductive* when
//! the update does not fall below it and the initial window already satisfies
//! it ([`is_inductive`]). Feasible sets are found by iterating the monotone
//! update downward from the base-case cap ([`solve_feasibility`]); a
//! brute-force grid enumeration ([`grid_oracle`]) provides the independent
//! check for small instances.

use crate::special::phi;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("bound sets live on different anchors and cannot be compared")]
    IncomparableAnchors,
    #[error("invalid bound set: {0}")]
    Invalid(String),
}

/// Absolute slack that [`is_inductive_within`] grants certificates printed
/// with 8 decimal digits: rounding each entry by up to 5e-9 can break the
/// exact inequalities by a few 1e-9 even though the underlying solution was
/// feasible. Solver-produced sets verify with zero slack.
pub const PRINTED_CERT_SLACK: f64 = 1e-8;

/// Anchored CDF lower bounds `(a, b)` plus Chernoff tail anchors `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    /// Interval anchors in units of `sqrt(sum sigma^2)`, strictly ascending,
    /// `a[0] <= 0`.
    pub a: Vec<f64>,
    /// CDF lower bounds at the anchors, nondecreasing, within `[0, 1]`.
    pub b: Vec<f64>,
    /// Tail anchors, strictly ascending, `c[0] > a[m-1]`.
    pub c: Vec<f64>,
}

impl BoundSet {
    pub fn validate(&self) -> Result<(), BoundError> {
        if self.a.is_empty() {
            return Err(BoundError::Invalid("no anchors".into()));
        }
        if self.a.len() != self.b.len() {
            return Err(BoundError::Invalid("anchor/bound length mismatch".into()));
        }
        if self.a[0] > 0.0 {
            return Err(BoundError::Invalid("first anchor must be <= 0".into()));
        }
        if self.a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BoundError::Invalid("anchors not strictly ascending".into()));
        }
        if self.c.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BoundError::Invalid(
                "tail anchors not strictly ascending".into(),
            ));
        }
        if let (Some(&last_a), Some(&first_c)) = (self.a.last(), self.c.first()) {
            if first_c <= last_a {
                return Err(BoundError::Invalid(
                    "tail anchors must lie beyond the last anchor".into(),
                ));
            }
        }
        if self.b.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(BoundError::Invalid("bounds outside [0,1]".into()));
        }
        if self.b.windows(2).any(|w| w[0] > w[1]) {
            return Err(BoundError::Invalid("bounds not nondecreasing".into()));
        }
        Ok(())
    }
}

/// Fixed parameters of the bound machinery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub epsilon: f64,
    pub d: f64,
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub delta1: f64,
    pub b_const: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<(), BoundError> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(BoundError::Invalid(format!(
                "epsilon not in (0,1): {}",
                self.epsilon
            )));
        }
        if self.d <= 0.0 {
            return Err(BoundError::Invalid(format!("d not positive: {}", self.d)));
        }
        if !(self.c0 >= 0.0 && self.delta1 >= 0.0) {
            return Err(BoundError::Invalid("c0 and delta1 must be >= 0".into()));
        }
        if !(self.c1 > 0.0 && self.c1 <= 1.0) {
            return Err(BoundError::Invalid(format!("C1 not in (0,1]: {}", self.c1)));
        }
        // the tail-bound constant must be admissible for (epsilon, d, C1)
        let min_b = crate::constants::compute_b(self.epsilon, self.d, self.c1)
            .map_err(|e| BoundError::Invalid(e.to_string()))?;
        if self.b_const < min_b * (1.0 - 1e-12) {
            return Err(BoundError::Invalid(format!(
                "b_const {} below the admissible minimum {min_b}",
                self.b_const
            )));
        }
        Ok(())
    }
}

/// A self-contained, serializable certificate: parameters plus bound set.
///
/// Floats round-trip exactly through JSON (shortest-roundtrip encoding), so
/// verification verdicts are reproducible bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub epsilon: f64,
    pub d: f64,
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    pub delta1: f64,
    pub b_const: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl Certificate {
    pub fn new(set: BoundSet, params: BoundParams) -> Self {
        Certificate {
            epsilon: params.epsilon,
            d: params.d,
            c0: params.c0,
            c1: params.c1,
            delta1: params.delta1,
            b_const: params.b_const,
            a: set.a,
            b: set.b,
            c: set.c,
        }
    }

    pub fn params(&self) -> BoundParams {
        BoundParams {
            epsilon: self.epsilon,
            d: self.d,
            c0: self.c0,
            c1: self.c1,
            delta1: self.delta1,
            b_const: self.b_const,
        }
    }

    pub fn bound_set(&self) -> BoundSet {
        BoundSet {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    /// Structural validation plus inductivity at the given slack.
    pub fn verify(&self, slack: f64) -> Result<(), BoundError> {
        let set = self.bound_set();
        set.validate()?;
        self.params().validate()?;
        if !is_inductive_within(&set, &self.params(), slack) {
            return Err(BoundError::Invalid("bound set is not inductive".into()));
        }
        Ok(())
    }
}

/// Partial order of bounds on identical anchors: `b1 <= b2` iff every
/// probability entry of `b1` is at least the corresponding entry of `b2`
/// (lower in the order = stronger bound).
pub fn leq(b1: &BoundSet, b2: &BoundSet) -> Result<bool, BoundError> {
    if b1.a != b2.a || b1.c != b2.c {
        return Err(BoundError::IncomparableAnchors);
    }
    Ok(b1.b.iter().zip(&b2.b).all(|(x, y)| x >= y))
}

/// Chernoff tail value `exp(-C1 (x - b - delta1)^2 / 2)`, clamped to 1 for
/// arguments left of the offset.
fn chernoff(params: &BoundParams, x: f64) -> f64 {
    let t = x - params.b_const - params.delta1;
    if t <= 0.0 {
        1.0
    } else {
        (-params.c1 * t * t / 2.0).exp()
    }
}

/// Maximal admissible interval weights of the conditioned variable: interval
/// `(a_{j-1}, a_j]` carries `(b_j - b_{j-1})/(1-eps)` (with `b_0 = eps`),
/// `(a_m, c_1]` carries `(1 - chern(c_1) - b_m)/(1-eps)`, and later Chernoff
/// pieces carry the differences of tail values. Entries clamp at zero.
pub fn tail_weights(set: &BoundSet, params: &BoundParams) -> Vec<f64> {
    let m = set.a.len();
    let kt = set.c.len();
    let denom = 1.0 - params.epsilon;
    let mut w = Vec::with_capacity(m + kt);
    w.push(((set.b[0] - params.epsilon) / denom).max(0.0));
    for i in 1..m {
        w.push(((set.b[i] - set.b[i - 1]) / denom).max(0.0));
    }
    if kt > 0 {
        w.push(((1.0 - chernoff(params, set.c[0]) - set.b[m - 1]) / denom).max(0.0));
        for j in 1..kt {
            w.push(
                ((chernoff(params, set.c[j - 1]) - chernoff(params, set.c[j])) / denom).max(0.0),
            );
        }
    }
    w
}

/// Coefficient matrix of the one-step update: entry `(i, j)` is
/// `max(0, phi((a_i sqrt(1+d) - x_j) / sqrt(d)) - c0)` where `x` ranges over
/// the interval anchors followed by the tail anchors.
struct UpdateMatrix {
    rows: usize,
    cols: usize,
    coef: Vec<f64>,
}

impl UpdateMatrix {
    fn build(set: &BoundSet, params: &BoundParams) -> Self {
        let rows = set.a.len();
        let cols = set.a.len() + set.c.len();
        let sq1d = (1.0 + params.d).sqrt();
        let sqd = params.d.sqrt();
        let mut coef = Vec::with_capacity(rows * cols);
        for &ai in &set.a {
            for &xj in set.a.iter().chain(&set.c) {
                let v = phi((ai * sq1d - xj) / sqd) - params.c0;
                coef.push(v.max(0.0));
            }
        }
        UpdateMatrix { rows, cols, coef }
    }

    fn apply(&self, weights: &[f64], out: &mut [f64]) {
        debug_assert_eq!(weights.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.coef[i * self.cols..(i + 1) * self.cols];
            let mut acc = 0.0;
            for (w, c) in weights.iter().zip(row) {
                acc += w * c;
            }
            *o = acc.clamp(0.0, 1.0);
        }
    }
}

/// One conditioning-plus-increment step: produces the bound the process
/// satisfies after cutting the lowest `eps` of mass and adding a fresh
/// almost-normal increment of variance `d` times the accumulated one.
///
/// The union-bound value is intersected with the base-case cap
/// `phi(a_i) - c0`: a carried bound must also hold for the initial window,
/// and weakening a lower bound is always sound. This makes the update
/// exactly the solver's one-step map and keeps inductivity closed under it.
pub fn update(set: &BoundSet, params: &BoundParams) -> BoundSet {
    let matrix = UpdateMatrix::build(set, params);
    let weights = tail_weights(set, params);
    let mut b = vec![0.0; set.a.len()];
    matrix.apply(&weights, &mut b);
    for (bi, &ai) in b.iter_mut().zip(&set.a) {
        *bi = bi.min((phi(ai) - params.c0).clamp(0.0, 1.0));
    }
    BoundSet {
        a: set.a.clone(),
        b,
        c: set.c.clone(),
    }
}

/// Exact inductivity: the updated bound stays at or above the current one,
/// the initial window satisfies the bound (`phi(a_i) - c0 >= b_i`), and the
/// boundary conditions `a_1 <= 0`, `b_1 >= eps` hold.
pub fn is_inductive(set: &BoundSet, params: &BoundParams) -> bool {
    is_inductive_within(set, params, 0.0)
}

/// Inductivity with an absolute slack on the probability comparisons; see
/// [`PRINTED_CERT_SLACK`].
pub fn is_inductive_within(set: &BoundSet, params: &BoundParams, slack: f64) -> bool {
    if set.validate().is_err() {
        return false;
    }
    if set.a[0] > 0.0 || set.b[0] < params.epsilon - slack {
        return false;
    }
    // base case: the initial almost-normal window satisfies the bound
    if set
        .a
        .iter()
        .zip(&set.b)
        .any(|(&ai, &bi)| phi(ai) - params.c0 < bi - slack)
    {
        return false;
    }
    let next = update(set, params);
    next.b.iter().zip(&set.b).all(|(new, old)| new >= &(old - slack))
}

/// Outcome of a feasibility solve.
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(BoundSet),
    Infeasible,
    /// Iteration cap exhausted before reaching a verdict; treated as
    /// infeasible by callers (conservative).
    NonConvergence,
}

impl Feasibility {
    pub fn bound_set(self) -> Option<BoundSet> {
        match self {
            Feasibility::Feasible(set) => Some(set),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iters: 100_000 }
    }
}

/// Greatest-fixed-point feasibility solve on the given anchors.
///
/// Starts from the base-case cap `b_i = phi(a_i) - c0` and iterates
/// `b <- min(b, update(b))`. The update operator is monotone, so iterates
/// decrease toward the greatest feasible point; the loop stops at the first
/// iterate that the update no longer lowers (exactly feasible), or declares
/// infeasibility as soon as `b_1` drops below `eps`.
pub fn solve_feasibility(
    params: &BoundParams,
    anchors_a: &[f64],
    anchors_c: &[f64],
) -> Feasibility {
    solve_feasibility_with(params, anchors_a, anchors_c, SolverOptions::default())
}

pub fn solve_feasibility_with(
    params: &BoundParams,
    anchors_a: &[f64],
    anchors_c: &[f64],
    opts: SolverOptions,
) -> Feasibility {
    let mut set = BoundSet {
        a: anchors_a.to_vec(),
        b: anchors_a
            .iter()
            .map(|&ai| (phi(ai) - params.c0).clamp(0.0, 1.0))
            .collect(),
        c: anchors_c.to_vec(),
    };
    if set.validate().is_err() {
        return Feasibility::Infeasible;
    }
    if set.b[0] < params.epsilon {
        return Feasibility::Infeasible;
    }
    let matrix = UpdateMatrix::build(&set, params);
    let mut rhs = vec![0.0; set.a.len()];
    for _ in 0..opts.max_iters {
        let weights = tail_weights(&set, params);
        matrix.apply(&weights, &mut rhs);
        let mut changed = false;
        for (bi, &ri) in set.b.iter_mut().zip(&rhs) {
            if ri < *bi {
                *bi = ri;
                changed = true;
            }
        }
        if set.b[0] < params.epsilon {
            return Feasibility::Infeasible;
        }
        if !changed {
            debug_assert!(is_inductive(&set, params));
            return Feasibility::Feasible(set);
        }
    }
    Feasibility::NonConvergence
}

/// Brute-force feasibility oracle for tiny instances (at most 3 interval
/// anchors, exactly one tail anchor): enumerates nondecreasing `b` vectors
/// on a uniform grid over `[eps, 1]` and tests the constraint system
/// directly, written out from the defining inequalities rather than shared
/// with [`update`].
pub fn grid_oracle(
    params: &BoundParams,
    anchors_a: &[f64],
    anchors_c: &[f64],
    resolution: usize,
) -> bool {
    assert!(
        anchors_a.len() <= 3 && anchors_c.len() == 1,
        "grid oracle handles at most 3 anchors and a single tail anchor"
    );
    let m = anchors_a.len();
    let eps = params.epsilon;
    if anchors_a[0] > 0.0 {
        return false;
    }

    // grid of candidate probability values
    let value = |t: usize| eps + (1.0 - eps) * t as f64 / resolution as f64;

    // per-anchor caps from the base case
    let caps: Vec<usize> = anchors_a
        .iter()
        .map(|&ai| {
            let cap = phi(ai) - params.c0;
            if cap < eps {
                return usize::MAX; // marker: no admissible value
            }
            // largest t with value(t) <= cap
            let t = ((cap - eps) / (1.0 - eps) * resolution as f64).floor() as usize;
            t.min(resolution)
        })
        .collect();
    if caps.contains(&usize::MAX) {
        return false;
    }

    // Chernoff tail mass at the single tail anchor
    let shift = anchors_c[0] - params.b_const - params.delta1;
    let chern = if shift <= 0.0 {
        1.0
    } else {
        (-params.c1 * shift * shift / 2.0).exp()
    };

    let sq1d = (1.0 + params.d).sqrt();
    let sqd = params.d.sqrt();
    let coef = |ai: f64, xj: f64| (phi((ai * sq1d - xj) / sqd) - params.c0).max(0.0);

    let feasible = |b: &[f64]| -> bool {
        // auxiliary weights straight from the constraint system
        let mut w = Vec::with_capacity(m + 1);
        w.push(((b[0] - eps) / (1.0 - eps)).max(0.0));
        for i in 1..m {
            w.push(((b[i] - b[i - 1]) / (1.0 - eps)).max(0.0));
        }
        w.push(((1.0 - chern - b[m - 1]) / (1.0 - eps)).max(0.0));
        // induction inequality per anchor
        for (i, &ai) in anchors_a.iter().enumerate() {
            let mut rhs = 0.0;
            for (j, &xj) in anchors_a.iter().enumerate() {
                rhs += w[j] * coef(ai, xj);
            }
            rhs += w[m] * coef(ai, anchors_c[0]);
            if b[i] > rhs {
                return false;
            }
        }
        true
    };

    let mut idx = vec![0usize; m];
    let mut b = vec![0.0; m];
    // nested enumeration of nondecreasing index vectors within the caps
    fn rec(
        level: usize,
        m: usize,
        idx: &mut Vec<usize>,
        b: &mut Vec<f64>,
        caps: &[usize],
        value: &dyn Fn(usize) -> f64,
        feasible: &dyn Fn(&[f64]) -> bool,
    ) -> bool {
        if level == m {
            return feasible(b);
        }
        let lo = if level == 0 { 0 } else { idx[level - 1] };
        for t in lo..=caps[level] {
            idx[level] = t;
            b[level] = value(t);
            if rec(level + 1, m, idx, b, caps, value, feasible) {
                return true;
            }
        }
        false
    }
    rec(0, m, &mut idx, &mut b, &caps, &value, &feasible)
}
