//! Three-valued divergence classification.
//!
//! The symbolic path inspects the leading-order behaviour of the summand
//! on each end of the integer line and applies the p-series rules; it
//! never returns `Inconclusive`. The numeric path estimates the tail
//! exponent by log-log regression on dyadic increments of the partial
//! sums and is advisory: it may return `Inconclusive`, and its verdicts
//! carry the estimated exponent and a geometric remainder bound.

use super::{PartialSumTrace, WindowMode};
use crate::seqlang::{FamilyExpr, Leading};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Diverges,
    Converges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Symbolic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceVerdict {
    pub verdict: Verdict,
    pub method: Method,
    /// Estimated (numeric) or derived (symbolic) tail exponent `p` of the
    /// summand, when a power-law tail applies.
    pub tail_exponent: Option<f64>,
    /// Geometric bound on the remainder past the last checkpoint, for
    /// numeric convergence verdicts.
    pub remainder_bound: Option<f64>,
}

impl DivergenceVerdict {
    pub fn symbolic(verdict: Verdict, tail_exponent: Option<f64>) -> Self {
        debug_assert!(verdict != Verdict::Inconclusive);
        DivergenceVerdict {
            verdict,
            method: Method::Symbolic,
            tail_exponent,
            remainder_bound: None,
        }
    }

    fn numeric(verdict: Verdict, tail_exponent: Option<f64>, remainder_bound: Option<f64>) -> Self {
        DivergenceVerdict {
            verdict,
            method: Method::Numeric,
            tail_exponent,
            remainder_bound,
        }
    }

    pub fn is_diverges(&self) -> bool {
        self.verdict == Verdict::Diverges
    }

    pub fn is_converges(&self) -> bool {
        self.verdict == Verdict::Converges
    }
}

/// Classification policy: exponent margin around the `p = -1` boundary
/// and the minimum number of dyadic levels the numeric path needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyPolicy {
    pub delta: f64,
    pub min_levels: usize,
}

impl Default for ClassifyPolicy {
    fn default() -> Self {
        ClassifyPolicy {
            delta: 0.05,
            min_levels: 4,
        }
    }
}

pub enum ClassifyInput<'a> {
    Trace(&'a PartialSumTrace),
    Symbolic(&'a FamilyExpr),
}

/// Classify either a partial-sum trace or a symbolic summand (two-sided
/// window). A symbolic input with no applicable extraction rule is
/// `Inconclusive`: compute a trace for the numeric fallback instead.
pub fn classify(input: ClassifyInput<'_>, policy: &ClassifyPolicy) -> DivergenceVerdict {
    match input {
        ClassifyInput::Trace(trace) => classify_trace(trace, policy),
        ClassifyInput::Symbolic(summand) => classify_symbolic(summand, WindowMode::TwoSided)
            .unwrap_or(DivergenceVerdict::numeric(Verdict::Inconclusive, None, None)),
    }
}

/// Per-end series verdict: diverges with a definite sign, or converges
/// absolutely.
enum EndV {
    Div(f64),
    Conv,
}

fn end_verdict(l: Leading) -> Option<EndV> {
    let rm1 = crate::seqlang::Rational::from_integer(-1);
    match l {
        Leading::Zero => Some(EndV::Conv),
        Leading::Pow { p, lq, c, .. } => {
            if p > rm1 {
                Some(EndV::Div(c.signum()))
            } else if p == rm1 {
                if lq >= rm1 {
                    Some(EndV::Div(c.signum()))
                } else {
                    Some(EndV::Conv)
                }
            } else {
                Some(EndV::Conv)
            }
        }
        Leading::Exp { c, k, .. } => {
            if c > 0.0 {
                if k == 0.0 {
                    None
                } else {
                    Some(EndV::Div(k.signum()))
                }
            } else {
                Some(EndV::Conv)
            }
        }
        Leading::Hyper { grow, sign } => {
            if grow {
                if sign == 0.0 {
                    None
                } else {
                    Some(EndV::Div(sign))
                }
            } else {
                Some(EndV::Conv)
            }
        }
        Leading::Unknown => None,
    }
}

/// Largest power-law exponent among the ends, for diagnostics.
fn symbolic_tail_exponent(leads: &[Leading]) -> Option<f64> {
    leads
        .iter()
        .filter_map(|l| match l {
            Leading::Pow { p, .. } => Some(super::rational_to_f64(*p)),
            _ => None,
        })
        .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
}

/// Sound symbolic classification of `sum summand(n)` over the window.
///
/// Divergence requires every divergent end to diverge with one consistent
/// sign (otherwise signed cancellation between ends could produce a
/// conditionally convergent series and the numeric path must decide).
pub fn classify_symbolic(summand: &FamilyExpr, window: WindowMode) -> Option<DivergenceVerdict> {
    let ends = summand.ends();
    let leads: Vec<Leading> = match window {
        WindowMode::TwoSided => ends.all().to_vec(),
        WindowMode::PositiveOnly => ends.positive().to_vec(),
    };
    let mut divergent_signs: Vec<f64> = Vec::new();
    for l in &leads {
        match end_verdict(*l)? {
            EndV::Conv => {}
            EndV::Div(s) => divergent_signs.push(s),
        }
    }
    let tail = symbolic_tail_exponent(&leads);
    if divergent_signs.is_empty() {
        return Some(DivergenceVerdict::symbolic(Verdict::Converges, tail));
    }
    let first = divergent_signs[0];
    if first != 0.0 && divergent_signs.iter().all(|s| *s == first) {
        return Some(DivergenceVerdict::symbolic(Verdict::Diverges, tail));
    }
    None
}

/// Numeric classification of a dyadic partial-sum trace.
pub fn classify_trace(trace: &PartialSumTrace, policy: &ClassifyPolicy) -> DivergenceVerdict {
    let sums = &trace.sums;
    if sums.iter().any(|s| s.is_nan()) {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    // a nonnegative series overflowing f64 has terms that cannot tend to 0
    if trace.min_summand >= 0.0 && sums.iter().any(|s| s.is_infinite()) {
        return DivergenceVerdict::numeric(Verdict::Diverges, None, None);
    }
    if sums.iter().any(|s| !s.is_finite()) {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    let last = *sums.last().unwrap();
    if last.abs() <= 1e-18 && sums.iter().all(|s| s.abs() <= 1e-18) {
        // numerically the zero series
        return DivergenceVerdict::numeric(Verdict::Converges, None, Some(0.0));
    }
    if sums.len() < policy.min_levels {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    let scale = sums.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let mut increments = Vec::with_capacity(sums.len() - 1);
    for i in 0..sums.len() - 1 {
        let d = sums[i + 1] - sums[i];
        if d < -1e-12 * scale.max(1.0) {
            // non-monotone trace: summand is not (eventually) nonnegative
            return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
        }
        increments.push((trace.checkpoints[i + 1] as f64, d.max(0.0)));
    }
    // trailing zero increments: the terms have died out numerically
    let trailing_zero = increments.iter().rev().take_while(|(_, d)| *d == 0.0).count();
    if trailing_zero >= 2 {
        return DivergenceVerdict::numeric(Verdict::Converges, None, Some(0.0));
    }
    let pts: Vec<(f64, f64)> = increments
        .iter()
        .filter(|(_, d)| *d > 0.0)
        .map(|(n, d)| (n.ln(), d.ln()))
        .collect();
    if pts.len() < 3 {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    let slope = regression_slope(&pts);
    let p_hat = slope - 1.0;
    if p_hat >= -1.0 + policy.delta {
        return DivergenceVerdict::numeric(Verdict::Diverges, Some(p_hat), None);
    }
    if p_hat <= -1.0 - policy.delta {
        let rho = 2f64.powf(p_hat + 1.0);
        let d_last = increments.last().map(|(_, d)| *d).unwrap_or(0.0);
        let remainder = d_last * rho / (1.0 - rho);
        if remainder.is_finite() {
            return DivergenceVerdict::numeric(Verdict::Converges, Some(p_hat), Some(remainder));
        }
    }
    DivergenceVerdict::numeric(Verdict::Inconclusive, Some(p_hat), None)
}

fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|(x, _)| x).sum();
    let sy: f64 = pts.iter().map(|(_, y)| y).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Classifier for ratio traces (the Delta functional at dyadic windows):
/// "diverges" means the values tend to infinity. Monotone growth is not
/// guaranteed, so local dips below 10% are tolerated.
pub(crate) fn classify_ratio_trace(
    checkpoints: &[u32],
    values: &[f64],
    policy: &ClassifyPolicy,
) -> DivergenceVerdict {
    if values.iter().any(|v| v.is_nan()) {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    if values.iter().any(|v| v.is_infinite()) {
        return DivergenceVerdict::numeric(Verdict::Diverges, None, None);
    }
    if values.iter().all(|v| v.abs() <= 1e-18) {
        return DivergenceVerdict::numeric(Verdict::Converges, None, Some(0.0));
    }
    if values.len() < policy.min_levels {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    let dips_ok = values
        .windows(2)
        .all(|w| w[1] >= 0.9 * w[0] || (w[1] - w[0]).abs() <= 1e-12 * w[0].abs().max(1.0));
    let pts: Vec<(f64, f64)> = checkpoints
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0)
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return DivergenceVerdict::numeric(Verdict::Inconclusive, None, None);
    }
    let slope = regression_slope(&pts);
    let first = values[0];
    let last = *values.last().unwrap();
    if dips_ok && slope >= policy.delta && last > first.max(0.0) {
        return DivergenceVerdict::numeric(Verdict::Diverges, Some(slope), None);
    }
    let len = values.len();
    let settled = (values[len - 1] - values[len - 2]).abs() <= 0.05 * values[len - 1].abs().max(1.0);
    if slope.abs() < policy.delta && settled {
        return DivergenceVerdict::numeric(Verdict::Converges, Some(slope), None);
    }
    DivergenceVerdict::numeric(Verdict::Inconclusive, Some(slope), None)
}
