//! Monte-Carlo ground truth: simulates walks directly, estimates the
//! survival curve `P(T >= n)` on a geometric grid, and fits the empirical
//! tail exponent with the Theil-Sen estimator.
//!
//! Paths are keyed individually by `(seed, path index)`, so results are
//! reproducible and independent of the degree of parallelism.

use crate::poly::{rational_to_f64, TermPoly};
use crate::walk::WalkSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error("insufficient tail: {0}")]
    InsufficientTail(String),
}

/// Survival estimate at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    pub n: u64,
    pub survival: f64,
    pub stderr: f64,
}

/// Summary statistics of the observed stopping times. The mean and variance
/// cover uncensored paths only; the censored count is disclosed alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopSummary {
    pub mean: f64,
    pub variance: f64,
    pub p10: u64,
    pub p50: u64,
    pub p90: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub samples: u64,
    pub cap: u64,
    pub censored: u64,
    pub stop_times: StopSummary,
    /// `P(T >= n)` on a geometric grid; exact (unbiased by censoring) for
    /// every `n <= cap`.
    pub survival: Vec<SurvivalPoint>,
}

/// Branch evaluation prepared for the hot loop.
enum FastPoly {
    Dense(Vec<f64>),
    Terms(Vec<(f64, f64)>),
}

impl FastPoly {
    fn build(tp: &TermPoly) -> FastPoly {
        if let Some(p) = tp.as_polynomial() {
            FastPoly::Dense(p.coeffs().iter().map(rational_to_f64).collect())
        } else {
            FastPoly::Terms(
                tp.terms()
                    .iter()
                    .map(|t| (rational_to_f64(&t.coeff), rational_to_f64(&t.expo)))
                    .collect(),
            )
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        match self {
            FastPoly::Dense(c) => {
                let mut acc = 0.0;
                for v in c.iter().rev() {
                    acc = acc * x + v;
                }
                acc
            }
            FastPoly::Terms(ts) => ts.iter().map(|(c, e)| c * x.powf(*e)).sum(),
        }
    }
}

fn splitmix(seed: u64, idx: u64) -> u64 {
    let mut x = seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Simulates `samples` independent paths of the walk, each capped at `cap`
/// iterations; `T` is the first `n` with `y <= 0`.
pub fn simulate(w: &WalkSpec, samples: u64, cap: u64, seed: u64) -> SimResult {
    simulate_paths(w, samples, cap, seed, false)
}

/// `flip` complements the branch decision (`u >= 1-p` instead of `u < p`),
/// which makes `(p, q1, q2)` and `(1-p, q2, q1)` runs produce identical
/// paths from the same seed.
fn simulate_paths(w: &WalkSpec, samples: u64, cap: u64, seed: u64, flip: bool) -> SimResult {
    assert!(samples >= 1 && cap >= 1);
    let q1 = FastPoly::build(w.q1());
    let q2 = FastPoly::build(w.q2());
    let p = rational_to_f64(w.p());
    let y0 = rational_to_f64(w.y0());

    let mut stops: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed, i));
            let mut y = y0;
            for n in 1..=cap {
                let u: f64 = rng.gen();
                let take_q1 = if flip { u >= 1.0 - p } else { u < p };
                let x = n as f64;
                y += if take_q1 { q1.eval(x) } else { q2.eval(x) };
                if y <= 0.0 {
                    return n;
                }
            }
            cap + 1 // censored marker
        })
        .collect();
    stops.sort_unstable();

    let censored = stops.iter().filter(|&&t| t > cap).count() as u64;
    let uncensored = &stops[..(samples - censored) as usize];
    let mean = if uncensored.is_empty() {
        f64::NAN
    } else {
        uncensored.iter().map(|&t| t as f64).sum::<f64>() / uncensored.len() as f64
    };
    let variance = if uncensored.len() < 2 {
        0.0
    } else {
        uncensored
            .iter()
            .map(|&t| (t as f64 - mean).powi(2))
            .sum::<f64>()
            / (uncensored.len() - 1) as f64
    };
    let quantile = |q: f64| -> u64 {
        if uncensored.is_empty() {
            return cap;
        }
        let i = ((uncensored.len() - 1) as f64 * q).round() as usize;
        uncensored[i]
    };

    let mut survival = Vec::new();
    for n in survival_grid(cap) {
        // paths with T >= n: stops is sorted, count entries >= n
        let idx = stops.partition_point(|&t| t < n);
        let hits = (samples as usize - idx) as f64;
        let p_hat = hits / samples as f64;
        survival.push(SurvivalPoint {
            n,
            survival: p_hat,
            stderr: (p_hat * (1.0 - p_hat) / samples as f64).sqrt(),
        });
    }

    SimResult {
        samples,
        cap,
        censored,
        stop_times: StopSummary {
            mean,
            variance,
            p10: quantile(0.1),
            p50: quantile(0.5),
            p90: quantile(0.9),
        },
        survival,
    }
}

/// Geometric grid `1, 2, 3, ..., ceil(1.1^j), ...` up to the cap, so the
/// log-log points are evenly spaced.
fn survival_grid(cap: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = 1u64;
    while n <= cap {
        out.push(n);
        let next = ((n as f64) * 1.1).ceil() as u64;
        n = next.max(n + 1);
    }
    out
}

/// A grid point enters the tail fit only while this many paths still
/// survive; below that the log-survival noise drowns the slope.
const MIN_TAIL_HITS: f64 = 20.0;

/// Robust tail-exponent fit: Theil-Sen (median of pairwise slopes) on
/// `(ln n, ln P(T >= n))`, restricted to the top `tail_fraction` of the
/// log-range of the well-estimated points. Excluded: zero-survival points,
/// points with fewer than [`MIN_TAIL_HITS`] surviving paths, the final
/// decade before the cap, and points where censoring could account for more
/// than 1% of the estimate.
pub fn fit_exponent(r: &SimResult, tail_fraction: f64) -> Result<(f64, f64), McError> {
    let censored_frac = r.censored as f64 / r.samples as f64;
    let usable: Vec<&SurvivalPoint> = r
        .survival
        .iter()
        .filter(|pt| pt.survival * r.samples as f64 >= MIN_TAIL_HITS)
        .filter(|pt| pt.n <= r.cap / 10)
        .filter(|pt| censored_frac <= 0.01 * pt.survival)
        .collect();
    if usable.len() < 10 {
        return Err(McError::InsufficientTail(format!(
            "{} usable grid points",
            usable.len()
        )));
    }
    let ln_min = (usable.first().unwrap().n as f64).ln();
    let ln_max = (usable.last().unwrap().n as f64).ln();
    let cutoff = ln_min + (1.0 - tail_fraction.clamp(0.0, 1.0)) * (ln_max - ln_min);
    let pts: Vec<(f64, f64)> = usable
        .iter()
        .filter(|pt| (pt.n as f64).ln() >= cutoff)
        .map(|pt| ((pt.n as f64).ln(), pt.survival.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(McError::InsufficientTail(format!(
            "{} points in the fitted tail",
            pts.len()
        )));
    }
    Ok(theil_sen(&pts))
}

/// Median of pairwise slopes; intercept is the median residual.
pub fn theil_sen(pts: &[(f64, f64)]) -> (f64, f64) {
    let mut slopes = Vec::with_capacity(pts.len() * (pts.len() - 1) / 2);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = pts[j].0 - pts[i].0;
            if dx != 0.0 {
                slopes.push((pts[j].1 - pts[i].1) / dx);
            }
        }
    }
    let slope = median(&mut slopes);
    let mut residuals: Vec<f64> = pts.iter().map(|&(x, y)| y - slope * x).collect();
    (slope, median(&mut residuals))
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Writes the survival curve as CSV with header `n,survival,stderr`.
pub fn write_survival_csv<W: Write>(r: &SimResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,survival,stderr")?;
    for pt in &r.survival {
        writeln!(out, "{},{},{}", pt.n, pt.survival, pt.stderr)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Polynomial};

    fn tp(coeffs: &[i64]) -> TermPoly {
        TermPoly::from_polynomial(&Polynomial::from_ints(coeffs))
    }

    fn walk(q1: &[i64], q2: &[i64], p: (i64, i64), y0: i64) -> WalkSpec {
        WalkSpec::new(tp(q1), tp(q2), rat(p.0, p.1), rat(y0, 1)).unwrap()
    }

    #[test]
    fn deterministic_walk_stops_exactly() {
        // both branches decrease by 1 from y0 = 5; T = 5 always
        let w = walk(&[-1], &[-1, 0], (1, 2), 5);
        let r = simulate(&w, 500, 100, 1);
        assert_eq!(r.censored, 0);
        assert_eq!(r.stop_times.mean, 5.0);
        assert_eq!(r.stop_times.variance, 0.0);
        for pt in &r.survival {
            let expect = if pt.n <= 5 { 1.0 } else { 0.0 };
            assert_eq!(pt.survival, expect, "at n = {}", pt.n);
        }
    }

    #[test]
    fn survival_starts_at_one_and_decreases() {
        let w = walk(&[0, 1], &[0, -1], (1, 2), 1);
        let r = simulate(&w, 20_000, 100_000, 7);
        assert_eq!(r.survival[0].survival, 1.0);
        for pair in r.survival.windows(2) {
            assert!(pair[0].survival >= pair[1].survival);
        }
    }

    #[test]
    fn same_seed_reproduces() {
        let w = walk(&[0, 0, 1], &[0, 0, -1], (1, 2), 10);
        let a = simulate(&w, 5_000, 100_000, 3);
        let b = simulate(&w, 5_000, 100_000, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_seeds_agree_statistically() {
        let w = walk(&[0, 1], &[0, -1], (1, 2), 100);
        let a = simulate(&w, 30_000, 1_000_000, 11);
        let b = simulate(&w, 30_000, 1_000_000, 12);
        let se = |r: &SimResult| (r.stop_times.variance / r.samples as f64).sqrt();
        let combined = (se(&a).powi(2) + se(&b).powi(2)).sqrt();
        assert!(
            (a.stop_times.mean - b.stop_times.mean).abs() <= 3.0 * combined,
            "means {} vs {} beyond 3 SE {combined}",
            a.stop_times.mean,
            b.stop_times.mean
        );
    }

    #[test]
    fn branch_swap_with_complement_is_identical() {
        // (p, q1, q2) vs (1-p, q2, q1) with complemented uniforms gives the
        // same stopping-time distribution path by path
        let q1 = TermPoly::new(vec![(rat(10, 9), rat(3, 1))]);
        let q2 = TermPoly::new(vec![(rat(-10, 1), rat(3, 1))]);
        let w1 = WalkSpec::new(q1.clone(), q2.clone(), rat(9, 10), rat(50, 1)).unwrap();
        let w2 = WalkSpec::new(q2, q1, rat(1, 10), rat(50, 1)).unwrap();
        let a = simulate_paths(&w1, 4_000, 100_000, 21, false);
        let b = simulate_paths(&w2, 4_000, 100_000, 21, true);
        assert_eq!(a.stop_times, b.stop_times);
        assert_eq!(a.survival, b.survival);
    }

    #[test]
    fn planted_power_law_recovered() {
        // synthetic survival exactly n^(-1.5)
        let survival: Vec<SurvivalPoint> = survival_grid(1_000_000)
            .into_iter()
            .map(|n| SurvivalPoint {
                n,
                survival: (n as f64).powf(-1.5),
                stderr: 0.0,
            })
            .collect();
        let r = SimResult {
            samples: 1,
            cap: 1_000_000,
            censored: 0,
            stop_times: StopSummary {
                mean: 0.0,
                variance: 0.0,
                p10: 0,
                p50: 0,
                p90: 0,
            },
            survival,
        };
        let (slope, _) = fit_exponent(&r, 0.5).unwrap();
        assert!((slope + 1.5).abs() < 0.01, "slope = {slope}");
    }

    #[test]
    fn insufficient_tail_detected() {
        let r = SimResult {
            samples: 10,
            cap: 100,
            censored: 0,
            stop_times: StopSummary {
                mean: 1.0,
                variance: 0.0,
                p10: 1,
                p50: 1,
                p90: 1,
            },
            survival: vec![SurvivalPoint {
                n: 1,
                survival: 1.0,
                stderr: 0.0,
            }],
        };
        assert!(matches!(
            fit_exponent(&r, 0.5),
            Err(McError::InsufficientTail(_))
        ));
    }

    #[test]
    fn csv_format() {
        let w = walk(&[-1], &[-1, 0], (1, 2), 2);
        let r = simulate(&w, 10, 10, 1);
        let mut buf = Vec::new();
        write_survival_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,survival,stderr"));
        assert!(lines.next().unwrap().starts_with("1,1,"));
    }

    #[test]
    fn theil_sen_ignores_outliers() {
        let mut pts: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        pts[10].1 += 100.0;
        pts[30].1 -= 80.0;
        let (slope, intercept) = theil_sen(&pts);
        assert!((slope - 2.0).abs() < 1e-9);
        assert!((intercept - 1.0).abs() < 0.5);
    }
}
