//! Termination analysis for polynomial random walks.
//!
//! The crate proves positive almost-sure termination (PAST) of loops that add
//! a polynomial step `q1[n]` with probability `p` and `q2[n]` otherwise, by
//! synthesizing an inductive lower-bound set for the CDF of the accumulated
//! sum and turning it into a certified survival bound `P(T >= n) <= B n^m`.
//!
//! Module map:
//! * [`poly`] — exact rational polynomial arithmetic and closed-form range sums;
//! * [`walk`] — the walk model, its moment polynomials and degree preconditions;
//! * [`special`] — normal CDF, its inverse, and the Hurwitz zeta function;
//! * [`constants`] — the convergent error constants (`c0`, `delta1`, `delta'`, `C1`, `b`);
//! * [`bound`] — inductive bound sets, the one-step update, feasibility solver and verifier;
//! * [`search`] — genetic parameter search, survival/expected-time bounds and verdicts;
//! * [`mc`] — Monte-Carlo ground truth (stopping times, survival curves, tail exponents).

pub mod bound;
pub mod constants;
pub mod mc;
pub mod poly;
pub mod search;
#[allow(clippy::excessive_precision)] // msun erf coefficients at source precision
pub mod special;
pub mod walk;

pub use bound::{BoundParams, BoundSet, Certificate, Feasibility};
pub use constants::{ErrorConstants, Mode, TransformParams};
pub use mc::SimResult;
pub use poly::{Polynomial, Rational, TermPoly};
pub use search::{AnalysisReport, SearchConfig, Verdict};
pub use walk::{WalkMoments, WalkSpec};
