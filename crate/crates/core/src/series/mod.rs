//! Criterion series as partial-sum traces with a three-valued divergence
//! classifier.
//!
//! Every orthogonality condition reduces to "does this nonnegative series
//! over `n` in `Z` diverge". Series are assembled symbolically out of the
//! measure's parameter families, so each one can first be handed to the
//! sound symbolic classifier; dyadic partial-sum traces back the numeric
//! fallback. Divergence of an infinite series is undecidable from finite
//! data, so the symbolic path is authoritative when it applies and the
//! numeric path may return `Inconclusive`.

mod classify;

pub use classify::{classify, classify_symbolic, classify_trace, ClassifyInput, ClassifyPolicy};
pub(crate) use classify::classify_ratio_trace;

use crate::identities::{IdentityError, SquareMatrix};
use crate::seqlang::{DomainError, FamilyExpr, ParseError, Rational};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("series kind {kind} requires m = {required}, spec has m = {m}")]
    UnsupportedKindForM {
        kind: String,
        required: usize,
        m: usize,
    },
    #[error("row index {k} outside 1..={m}")]
    BadRowIndex { k: usize, m: usize },
    #[error("row count {rows} does not match m = {m}")]
    RowCountMismatch { rows: usize, m: usize },
    #[error("m = {m} outside supported range 1..=8")]
    UnsupportedM { m: usize },
    #[error("window half-width {n_max} too small (need at least 16)")]
    WindowTooSmall { n_max: u32 },
    #[error("requested window {n} exceeds configured n_max = {n_max}")]
    WindowExceeded { n: u32, n_max: u32 },
    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },
    #[error("b-family for row {row} not strictly positive at n = {n} (value {value})")]
    PositivityViolation { row: usize, n: i64, value: f64 },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] DomainError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

/// Symbolic description of a Gaussian product measure on `m` two-sided
/// rows: precision families `b_k(n) > 0` and mean families `a_k(n)`,
/// evaluated over the window `|n| <= n_max`.
///
/// Construction checks positivity of every `b` row over the whole window
/// by exhaustive evaluation (`+inf` overflow is tolerated, NaN is not);
/// the irreducibility pipeline additionally requires `m <= 2` at its
/// entry points.
#[derive(Debug, Clone)]
pub struct MeasureFamilySpec {
    m: usize,
    n_max: u32,
    b: Vec<FamilyExpr>,
    a: Vec<FamilyExpr>,
}

impl MeasureFamilySpec {
    pub fn new(
        m: usize,
        n_max: u32,
        b: Vec<FamilyExpr>,
        a: Vec<FamilyExpr>,
    ) -> Result<Self, SeriesError> {
        if m == 0 || m > 8 {
            return Err(SeriesError::UnsupportedM { m });
        }
        if n_max < 16 {
            return Err(SeriesError::WindowTooSmall { n_max });
        }
        if b.len() != m {
            return Err(SeriesError::RowCountMismatch { rows: b.len(), m });
        }
        if a.len() != m {
            return Err(SeriesError::RowCountMismatch { rows: a.len(), m });
        }
        let spec = MeasureFamilySpec { m, n_max, b, a };
        spec.check_b_positive()?;
        spec.check_a_evaluates()?;
        Ok(spec)
    }

    pub fn parse(m: usize, n_max: u32, b: &[&str], a: &[&str]) -> Result<Self, SeriesError> {
        let b = b
            .iter()
            .map(|s| FamilyExpr::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        let a = a
            .iter()
            .map(|s| FamilyExpr::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(m, n_max, b, a)
    }

    fn check_b_positive(&self) -> Result<(), SeriesError> {
        let half = self.n_max as i64;
        for (row, fam) in self.b.iter().enumerate() {
            for n in -half..=half {
                let v = fam.eval(n)?;
                // strictly positive near the origin; further out a zero is
                // tolerated as f64 underflow of a decaying positive family
                let bad = v < 0.0 || v.is_nan() || (v == 0.0 && n.abs() <= 32);
                if bad {
                    return Err(SeriesError::PositivityViolation {
                        row: row + 1,
                        n,
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }

    fn check_a_evaluates(&self) -> Result<(), SeriesError> {
        let half = self.n_max as i64;
        for fam in &self.a {
            for n in -half..=half {
                fam.eval(n)?;
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Precision family of row `k` (1-based).
    pub fn b_row(&self, k: usize) -> &FamilyExpr {
        &self.b[k - 1]
    }

    /// Mean family of row `k` (1-based).
    pub fn a_row(&self, k: usize) -> &FamilyExpr {
        &self.a[k - 1]
    }

    /// Diagonal precision entries `(b_1(n), .., b_m(n))`.
    pub fn b_at(&self, n: i64) -> Result<Vec<f64>, SeriesError> {
        self.b.iter().map(|f| Ok(f.eval(n)?)).collect()
    }

    /// Mean entries `(a_1(n), .., a_m(n))`.
    pub fn a_at(&self, n: i64) -> Result<Vec<f64>, SeriesError> {
        self.a.iter().map(|f| Ok(f.eval(n)?)).collect()
    }

    fn require_m(&self, required: usize, kind: &str) -> Result<(), SeriesError> {
        if self.m != required {
            return Err(SeriesError::UnsupportedKindForM {
                kind: kind.to_string(),
                required,
                m: self.m,
            });
        }
        Ok(())
    }
}

/// The criterion series families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SeriesKind {
    /// `S^L_{kj} = sum_n  b_k/2 (1/(2 b_j) + a_j^2)`, `k != j`.
    SL { k: usize, j: usize },
    /// `S^{L,-}_{kj}(t) = t^2/4 sum b_k/b_j + sum b_k/2 (-2 a_k + t a_j)^2`.
    SLminus { k: usize, j: usize, t: f64 },
    /// `Sigma_1(s) = sum (s^2 sqrt(b_1/b_2) - s^{-2} sqrt(b_2/b_1))^2`.
    Sigma1 { s: f64 },
    /// `Sigma_2^-(phi, s)`: the mean part of the `tau_-(phi,s)` test.
    Sigma2Minus { phi: f64, s: f64 },
    /// `Sigma_2(C_1, C_2) = sum (C_1^2 b_1 + C_2^2 b_2)(C_1 a_1 + C_2 a_2)^2`.
    Sigma2C { c1: f64, c2: f64 },
    /// `Sigma^-_{12}(tau_-(phi,s)) = sin^2(phi) Sigma_1(s) + Sigma_2^-`.
    Sigma12Minus { phi: f64, s: f64 },
    /// `S^L_{11} = 4 sum b_1 a_1^2`.
    SL11,
    /// `S^L_{22} = 4 sum b_2 a_2^2`.
    SL22,
    /// `Sigma^{12} = sum b_1/b_2`.
    RatioB12,
    /// `Sigma^{21} = sum b_2/b_1`.
    RatioB21,
    /// `sum_n sum_r b_r (sum_s (t_rs - delta_rs) a_s)^2`.
    MeanShift { t: SquareMatrix },
    /// `||f||^2 = sum a_1^2 / (1/(2b_1) + 1/(2b_2))`.
    NormF,
    /// `||g||^2 = sum a_2^2 / (1/(2b_1) + 1/(2b_2))`.
    NormG,
    /// `||f + s g||^2 = sum (a_1 + s a_2)^2 / (1/(2b_1) + 1/(2b_2))`.
    FplusSG { s: f64 },
}

impl SeriesKind {
    fn name(&self) -> &'static str {
        match self {
            SeriesKind::SL { .. } => "SL",
            SeriesKind::SLminus { .. } => "SLminus",
            SeriesKind::Sigma1 { .. } => "Sigma1",
            SeriesKind::Sigma2Minus { .. } => "Sigma2Minus",
            SeriesKind::Sigma2C { .. } => "Sigma2C",
            SeriesKind::Sigma12Minus { .. } => "Sigma12Minus",
            SeriesKind::SL11 => "SL11",
            SeriesKind::SL22 => "SL22",
            SeriesKind::RatioB12 => "RatioB12",
            SeriesKind::RatioB21 => "RatioB21",
            SeriesKind::MeanShift { .. } => "MeanShift",
            SeriesKind::NormF => "NormF",
            SeriesKind::NormG => "NormG",
            SeriesKind::FplusSG { .. } => "FplusSG",
        }
    }

    /// Assemble the summand of this series as an expression in `n`.
    pub fn summand(&self, spec: &MeasureFamilySpec) -> Result<FamilyExpr, SeriesError> {
        use FamilyExpr as F;
        let m = spec.m();
        let row = |k: usize| -> Result<(), SeriesError> {
            if k == 0 || k > m {
                Err(SeriesError::BadRowIndex { k, m })
            } else {
                Ok(())
            }
        };
        let b = |k: usize| spec.b_row(k).clone();
        let a = |k: usize| spec.a_row(k).clone();
        let num = F::num;

        let expr = match self {
            SeriesKind::SL { k, j } => {
                row(*k)?;
                row(*j)?;
                if k == j {
                    return Err(SeriesError::InvalidParameter {
                        what: "SL requires k != j".into(),
                    });
                }
                F::mul(
                    F::div(b(*k), num(2.0)),
                    F::add(F::recip(F::mul(num(2.0), b(*j))), F::sq(a(*j))),
                )
            }
            SeriesKind::SLminus { k, j, t } => {
                row(*k)?;
                row(*j)?;
                if k == j {
                    return Err(SeriesError::InvalidParameter {
                        what: "SLminus requires k != j".into(),
                    });
                }
                F::add(
                    F::mul(num(t * t / 4.0), F::div(b(*k), b(*j))),
                    F::mul(
                        F::div(b(*k), num(2.0)),
                        F::sq(F::add(F::mul(num(-2.0), a(*k)), F::mul(num(*t), a(*j)))),
                    ),
                )
            }
            SeriesKind::Sigma1 { s } => {
                spec.require_m(2, self.name())?;
                positive_param(*s, "s")?;
                let s2 = s * s;
                F::sq(F::sub(
                    F::mul(num(s2), F::sqrt(F::div(b(1), b(2)))),
                    F::mul(num(1.0 / s2), F::sqrt(F::div(b(2), b(1)))),
                ))
            }
            SeriesKind::Sigma2Minus { phi, s } => {
                spec.require_m(2, self.name())?;
                positive_param(*s, "s")?;
                sigma2_minus_summand(spec, *phi, *s)
            }
            SeriesKind::Sigma2C { c1, c2 } => {
                spec.require_m(2, self.name())?;
                if *c1 == 0.0 && *c2 == 0.0 {
                    return Err(SeriesError::InvalidParameter {
                        what: "Sigma2C requires (C1, C2) != (0, 0)".into(),
                    });
                }
                F::mul(
                    F::add(F::mul(num(c1 * c1), b(1)), F::mul(num(c2 * c2), b(2))),
                    F::sq(F::add(F::mul(num(*c1), a(1)), F::mul(num(*c2), a(2)))),
                )
            }
            SeriesKind::Sigma12Minus { phi, s } => {
                spec.require_m(2, self.name())?;
                positive_param(*s, "s")?;
                let sigma1 = SeriesKind::Sigma1 { s: *s }.summand(spec)?;
                let sin_phi = snap_zero(phi.sin());
                F::add(
                    F::mul(num(sin_phi * sin_phi), sigma1),
                    sigma2_minus_summand(spec, *phi, *s),
                )
            }
            SeriesKind::SL11 => {
                row(1)?;
                F::mul(num(4.0), F::mul(b(1), F::sq(a(1))))
            }
            SeriesKind::SL22 => {
                row(2)?;
                F::mul(num(4.0), F::mul(b(2), F::sq(a(2))))
            }
            SeriesKind::RatioB12 => {
                spec.require_m(2, self.name())?;
                F::div(b(1), b(2))
            }
            SeriesKind::RatioB21 => {
                spec.require_m(2, self.name())?;
                F::div(b(2), b(1))
            }
            SeriesKind::MeanShift { t } => {
                if t.dim() != m {
                    return Err(SeriesError::Identity(IdentityError::DimensionMismatch {
                        left: t.dim(),
                        right: m,
                    }));
                }
                let mut total = num(0.0);
                for r in 1..=m {
                    let mut inner = num(0.0);
                    for s in 1..=m {
                        let delta = if r == s { 1.0 } else { 0.0 };
                        let coeff = t.get(r - 1, s - 1) - delta;
                        inner = F::add(inner, F::mul(num(coeff), a(s)));
                    }
                    total = F::add(total, F::mul(b(r), F::sq(inner)));
                }
                total
            }
            SeriesKind::NormF => {
                spec.require_m(2, self.name())?;
                F::div(F::sq(a(1)), half_inv_sum(spec))
            }
            SeriesKind::NormG => {
                spec.require_m(2, self.name())?;
                F::div(F::sq(a(2)), half_inv_sum(spec))
            }
            SeriesKind::FplusSG { s } => {
                spec.require_m(2, self.name())?;
                F::div(
                    F::sq(F::add(a(1), F::mul(num(*s), a(2)))),
                    half_inv_sum(spec),
                )
            }
        };
        Ok(expr)
    }
}

fn positive_param(v: f64, what: &str) -> Result<(), SeriesError> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(SeriesError::InvalidParameter {
            what: format!("{what} must be > 0, got {v}"),
        })
    }
}

/// `1/(2 b_1) + 1/(2 b_2)`.
fn half_inv_sum(spec: &MeasureFamilySpec) -> FamilyExpr {
    use FamilyExpr as F;
    F::add(
        F::recip(F::mul(F::num(2.0), spec.b_row(1).clone())),
        F::recip(F::mul(F::num(2.0), spec.b_row(2).clone())),
    )
}

/// Exact multiples of pi land exactly on the zeros of the trigonometric
/// weights; without the snap a 1e-16 residue would multiply a divergent
/// family and flip a classification.
fn snap_zero(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

/// `(4 sin^2(phi/2) b_1 + 4 cos^2(phi/2) s^{-4} b_2)
///  * (sin(phi/2) a_1 - s^2 cos(phi/2) a_2)^2`.
fn sigma2_minus_summand(spec: &MeasureFamilySpec, phi: f64, s: f64) -> FamilyExpr {
    use FamilyExpr as F;
    let sh = snap_zero((phi / 2.0).sin());
    let ch = snap_zero((phi / 2.0).cos());
    let s2 = s * s;
    let weight = F::add(
        F::mul(F::num(4.0 * sh * sh), spec.b_row(1).clone()),
        F::mul(F::num(4.0 * ch * ch / (s2 * s2)), spec.b_row(2).clone()),
    );
    let shift = F::sub(
        F::mul(F::num(sh), spec.a_row(1).clone()),
        F::mul(F::num(s2 * ch), spec.a_row(2).clone()),
    );
    F::mul(weight, F::sq(shift))
}

/// Summation window of a partial-sum trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WindowMode {
    /// `n` runs over `[-N, N]`.
    TwoSided,
    /// `n` runs over `[1, N]`.
    PositiveOnly,
}

/// Dyadic partial sums of a series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSumTrace {
    pub checkpoints: Vec<u32>,
    pub sums: Vec<f64>,
    /// Smallest summand value observed (sign information).
    pub min_summand: f64,
    pub window: WindowMode,
}

impl PartialSumTrace {
    /// Sum the given summand up to every dyadic checkpoint <= `n_limit`.
    pub fn compute(
        summand: &FamilyExpr,
        n_limit: u32,
        window: WindowMode,
    ) -> Result<Self, SeriesError> {
        let checkpoints = dyadic_checkpoints(n_limit);
        let mut sums = Vec::with_capacity(checkpoints.len());
        let mut acc = 0.0f64;
        let mut min_summand = f64::INFINITY;
        let eval = |n: i64, acc: &mut f64, min_summand: &mut f64| -> Result<(), SeriesError> {
            let v = summand.eval(n)?;
            if v < *min_summand {
                *min_summand = v;
            }
            *acc += v;
            Ok(())
        };
        let mut next = 0usize;
        match window {
            WindowMode::TwoSided => {
                eval(0, &mut acc, &mut min_summand)?;
                for n in 1..=(n_limit as i64) {
                    eval(n, &mut acc, &mut min_summand)?;
                    eval(-n, &mut acc, &mut min_summand)?;
                    while next < checkpoints.len() && checkpoints[next] as i64 == n {
                        sums.push(acc);
                        next += 1;
                    }
                }
            }
            WindowMode::PositiveOnly => {
                for n in 1..=(n_limit as i64) {
                    eval(n, &mut acc, &mut min_summand)?;
                    while next < checkpoints.len() && checkpoints[next] as i64 == n {
                        sums.push(acc);
                        next += 1;
                    }
                }
            }
        }
        Ok(PartialSumTrace {
            checkpoints,
            sums,
            min_summand,
            window,
        })
    }

    pub fn final_sum(&self) -> f64 {
        *self.sums.last().expect("trace has at least one checkpoint")
    }
}

/// Powers of two in `[16, n_limit]`, plus `n_limit` itself when it is not
/// one of them.
fn dyadic_checkpoints(n_limit: u32) -> Vec<u32> {
    let mut cps = Vec::new();
    let mut n = 16u32;
    while n <= n_limit {
        cps.push(n);
        match n.checked_mul(2) {
            Some(next) => n = next,
            None => break,
        }
    }
    if cps.last().copied() != Some(n_limit) {
        cps.push(n_limit);
    }
    cps
}

/// Default evaluation grids for the universally quantified test-element
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grids {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub phi: Vec<f64>,
    pub c: Vec<(f64, f64)>,
}

impl Default for Grids {
    fn default() -> Self {
        let t = vec![-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0];
        let s = vec![0.25, 0.5, 1.0, 2.0, 4.0];
        let phi = (0..16)
            .map(|k| k as f64 * std::f64::consts::PI / 8.0)
            .collect();
        let mut c: Vec<(f64, f64)> = t.iter().map(|&v| (1.0, v)).collect();
        c.push((0.0, 1.0));
        Grids { t, s, phi, c }
    }
}

/// Verdict plus the trace that produced it (the trace is only computed
/// when the symbolic path does not decide).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesOutcome {
    pub kind_name: String,
    pub verdict: DivergenceVerdict,
    pub final_sum: Option<f64>,
}

pub use classify::{DivergenceVerdict, Method, Verdict};

/// Compute the partial sums of a criterion series.
pub fn partial_sums(
    spec: &MeasureFamilySpec,
    kind: &SeriesKind,
    n: u32,
) -> Result<PartialSumTrace, SeriesError> {
    if n > spec.n_max() {
        return Err(SeriesError::WindowExceeded {
            n,
            n_max: spec.n_max(),
        });
    }
    let summand = kind.summand(spec)?;
    PartialSumTrace::compute(&summand, n, WindowMode::TwoSided)
}

/// Classify a criterion series: symbolic first, numeric trace fallback.
pub fn classify_series(
    spec: &MeasureFamilySpec,
    kind: &SeriesKind,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<SeriesOutcome, SeriesError> {
    let summand = kind.summand(spec)?;
    let outcome = classify_summand(&summand, n.min(spec.n_max()), WindowMode::TwoSided, policy)?;
    Ok(SeriesOutcome {
        kind_name: kind.name().to_string(),
        ..outcome
    })
}

/// Classify an arbitrary summand expression over the given window.
pub fn classify_summand(
    summand: &FamilyExpr,
    n_limit: u32,
    window: WindowMode,
    policy: &ClassifyPolicy,
) -> Result<SeriesOutcome, SeriesError> {
    if let Some(verdict) = classify_symbolic(summand, window) {
        return Ok(SeriesOutcome {
            kind_name: String::new(),
            verdict,
            final_sum: None,
        });
    }
    let trace = match PartialSumTrace::compute(summand, n_limit, window) {
        Ok(trace) => trace,
        // inf/inf and underflow-to-zero-denominator artifacts of f64
        // arithmetic exhaust the advisory numeric path; the families
        // themselves were validated at bind time
        Err(SeriesError::Eval(
            DomainError::NotANumber { .. } | DomainError::DivisionByZero { .. },
        )) => {
            return Ok(SeriesOutcome {
                kind_name: String::new(),
                verdict: DivergenceVerdict {
                    verdict: Verdict::Inconclusive,
                    method: Method::Numeric,
                    tail_exponent: None,
                    remainder_bound: None,
                },
                final_sum: None,
            });
        }
        Err(other) => return Err(other),
    };
    let verdict = classify_trace(&trace, policy);
    Ok(SeriesOutcome {
        kind_name: String::new(),
        final_sum: Some(trace.final_sum()),
        verdict,
    })
}

/// Verdicts of `Sigma_1(s)` and the equivalent criterion
/// `Sigma_2(s) = sum (s^4 b_1/b_2 - 1)^2 + (s^{-4} b_2/b_1 - 1)^2`,
/// which must agree (divergence-wise) for every `s > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub sigma1: DivergenceVerdict,
    pub sigma2: DivergenceVerdict,
    pub agree: bool,
}

pub fn check_sigma1_sigma2_equivalence(
    spec: &MeasureFamilySpec,
    s: f64,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<EquivalenceCheck, SeriesError> {
    use FamilyExpr as F;
    spec.require_m(2, "Sigma1/Sigma2 equivalence")?;
    positive_param(s, "s")?;
    let sigma1 = classify_series(spec, &SeriesKind::Sigma1 { s }, n, policy)?.verdict;
    let s4 = s.powi(4);
    let b1 = spec.b_row(1).clone();
    let b2 = spec.b_row(2).clone();
    let summand = F::add(
        F::sq(F::sub(F::mul(F::num(s4), F::div(b1.clone(), b2.clone())), F::num(1.0))),
        F::sq(F::sub(F::mul(F::num(1.0 / s4), F::div(b2, b1)), F::num(1.0))),
    );
    let sigma2 = classify_summand(&summand, n.min(spec.n_max()), WindowMode::TwoSided, policy)?.verdict;
    let agree = matches!(
        (sigma1.verdict, sigma2.verdict),
        (Verdict::Diverges, Verdict::Diverges) | (Verdict::Converges, Verdict::Converges)
    );
    Ok(EquivalenceCheck {
        sigma1,
        sigma2,
        agree,
    })
}

/// `p`-series style rational exponent helper used in diagnostics.
pub(crate) fn rational_to_f64(r: Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec2(b1: &str, b2: &str, a1: &str, a2: &str) -> MeasureFamilySpec {
        MeasureFamilySpec::parse(2, 4096, &[b1, b2], &[a1, a2]).unwrap()
    }

    fn policy() -> ClassifyPolicy {
        ClassifyPolicy::default()
    }

    #[test]
    fn sl_constant_summand_quarter() {
        // b = 1, a = 0: summand of S^L_{12} is 1/2 * (1/2 + 0) = 1/4
        let spec = spec2("1", "1", "0", "0");
        let trace = partial_sums(&spec, &SeriesKind::SL { k: 1, j: 2 }, 64).unwrap();
        for (cp, s) in trace.checkpoints.iter().zip(&trace.sums) {
            let expect = (2 * cp + 1) as f64 / 4.0;
            assert!((s - expect).abs() < 1e-9, "{cp}: {s} vs {expect}");
        }
    }

    #[test]
    fn sigma1_symmetric_is_zero() {
        let spec = spec2("1", "1", "0", "0");
        let trace = partial_sums(&spec, &SeriesKind::Sigma1 { s: 1.0 }, 64).unwrap();
        assert!(trace.sums.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn sl11_constant_families() {
        // b = 1, a = 1: S^L_11 partial sums are 4 (2N + 1)
        let spec = MeasureFamilySpec::parse(1, 4096, &["1"], &["1"]).unwrap();
        let trace = partial_sums(&spec, &SeriesKind::SL11, 64).unwrap();
        for (cp, s) in trace.checkpoints.iter().zip(&trace.sums) {
            assert!((s - 4.0 * (2 * cp + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_shift_identity_is_zero() {
        let spec = spec2("1", "1", "1", "1");
        let t = SquareMatrix::identity(2);
        let trace = partial_sums(&spec, &SeriesKind::MeanShift { t }, 64).unwrap();
        assert!(trace.sums.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn mean_shift_scalar_case() {
        // m=1, b=1, a=1, t=(2): summand 1*(1*1)^2 = 1, S_N = 2N+1
        let spec = MeasureFamilySpec::parse(1, 4096, &["1"], &["1"]).unwrap();
        let t = SquareMatrix::from_rows(&[vec![2.0]]).unwrap();
        let trace = partial_sums(&spec, &SeriesKind::MeanShift { t }, 64).unwrap();
        for (cp, s) in trace.checkpoints.iter().zip(&trace.sums) {
            assert!((s - (2 * cp + 1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn kind_requires_matching_m() {
        let spec = MeasureFamilySpec::parse(1, 4096, &["1"], &["1"]).unwrap();
        assert!(matches!(
            SeriesKind::Sigma1 { s: 1.0 }.summand(&spec),
            Err(SeriesError::UnsupportedKindForM { .. })
        ));
    }

    #[test]
    fn positivity_checked_at_bind_time() {
        let err = MeasureFamilySpec::parse(1, 16, &["n"], &["1"]).unwrap_err();
        assert!(matches!(err, SeriesError::PositivityViolation { .. }));
    }

    #[test]
    fn classify_constant_diverges_symbolically() {
        let spec = spec2("1", "1", "0", "0");
        let out = classify_series(&spec, &SeriesKind::SL { k: 1, j: 2 }, 4096, &policy()).unwrap();
        assert_eq!(out.verdict.verdict, Verdict::Diverges);
        assert_eq!(out.verdict.method, Method::Symbolic);
    }

    #[test]
    fn classify_power_law_tails() {
        // summand |n|^{-2}: converges; 1/(1+|n|): diverges (harmonic)
        let conv = FamilyExpr::parse("1/(1+abs(n))^2").unwrap();
        let div = FamilyExpr::parse("1/(1+abs(n))").unwrap();
        let p = policy();
        let vc = classify_summand(&conv, 4096, WindowMode::TwoSided, &p).unwrap();
        assert_eq!(vc.verdict.verdict, Verdict::Converges);
        assert_eq!(vc.verdict.method, Method::Symbolic);
        let vd = classify_summand(&div, 4096, WindowMode::TwoSided, &p).unwrap();
        assert_eq!(vd.verdict.verdict, Verdict::Diverges);
        assert_eq!(vd.verdict.method, Method::Symbolic);
    }

    #[test]
    fn numeric_fallback_on_hidden_cancellation() {
        // (sqrt(r) - 1/sqrt(r))^2 with r = 1 + 1/(1+|n|): terms ~ n^{-2},
        // leading orders cancel so the numeric path must decide
        let spec = spec2("1", "1 + 1/(1+abs(n))", "0", "0");
        let out = classify_series(&spec, &SeriesKind::Sigma1 { s: 1.0 }, 4096, &policy()).unwrap();
        assert_eq!(out.verdict.verdict, Verdict::Converges);
        assert_eq!(out.verdict.method, Method::Numeric);
    }

    #[test]
    fn numeric_harmonic_boundary() {
        // terms (1+|n|)^{-1} plus a bounded wiggle: numeric path, diverges
        let f = FamilyExpr::parse("(2+alt(n)) / ((1+abs(n)) - 0.5*alt(n))").unwrap();
        let p = policy();
        let out = classify_summand(&f, 4096, WindowMode::TwoSided, &p).unwrap();
        assert_eq!(out.verdict.verdict, Verdict::Diverges);
    }

    #[test]
    fn sigma_equivalence_on_exponential_ratio() {
        let spec = spec2("1", "exp(abs(n))", "0", "0");
        let chk = check_sigma1_sigma2_equivalence(&spec, 1.0, 4096, &policy()).unwrap();
        assert_eq!(chk.sigma1.verdict, Verdict::Diverges);
        assert_eq!(chk.sigma2.verdict, Verdict::Diverges);
        assert!(chk.agree);
    }

    #[test]
    fn sigma_equivalence_on_identical_rows() {
        let spec = spec2("2", "2", "0", "0");
        let chk = check_sigma1_sigma2_equivalence(&spec, 1.0, 4096, &policy()).unwrap();
        assert_eq!(chk.sigma1.verdict, Verdict::Converges);
        assert_eq!(chk.sigma2.verdict, Verdict::Converges);
        assert!(chk.agree);
    }

    #[test]
    fn norm_combination_kinds() {
        // b = 1 both rows: the weight (1/(2b1) + 1/(2b2)) is 1, so the
        // ||f + s g||^2 summand is just (a1 + s a2)^2
        let spec = spec2("1", "1", "1", "alt(n)");
        let trace = partial_sums(&spec, &SeriesKind::FplusSG { s: 2.0 }, 64).unwrap();
        // (1 + 2 alt)^2 is 9 on even, 1 on odd indices
        let expect = |n: u32| {
            let evens = n + 1; // 0 and the n/2 pairs... indices -n..=n
            let odds = 2 * n + 1 - evens;
            9.0 * evens as f64 + odds as f64
        };
        for (cp, s) in trace.checkpoints.iter().zip(&trace.sums) {
            assert!((s - expect(*cp)).abs() < 1e-9, "{cp}: {s}");
        }
        let out = classify_series(&spec, &SeriesKind::FplusSG { s: 2.0 }, 4096, &policy()).unwrap();
        assert_eq!(out.verdict.verdict, Verdict::Diverges);

        let nf = classify_series(&spec, &SeriesKind::NormF, 4096, &policy()).unwrap();
        let ng = classify_series(&spec, &SeriesKind::NormG, 4096, &policy()).unwrap();
        assert_eq!(nf.verdict.verdict, Verdict::Diverges);
        assert_eq!(ng.verdict.verdict, Verdict::Diverges);
    }

    #[test]
    fn dyadic_checkpoints_cover_limit() {
        assert_eq!(dyadic_checkpoints(64), vec![16, 32, 64]);
        assert_eq!(dyadic_checkpoints(100), vec![16, 32, 64, 100]);
        assert_eq!(dyadic_checkpoints(8), vec![8]);
    }
}
