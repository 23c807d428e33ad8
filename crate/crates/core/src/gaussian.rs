//! Finite-dimensional Gaussian measure algebra.
//!
//! A block is the product of `m` one-dimensional Gaussians with density
//! `sqrt(b/pi) exp(-b (x - a)^2)` per coordinate, i.e. precision diagonal
//! `B = diag(b_1..b_m)` (covariance `(2B)^{-1}`) and mean `a`. Left
//! translation by an invertible `t` pushes the block to the full-precision
//! Gaussian with precision `t^T B t` and mean `t^{-1} a`. The Hellinger
//! integral of two centered Gaussians has the closed form
//! `H = (det B det C / det^2((B+C)/2))^{1/4}`, and the Kakutani dichotomy
//! turns per-index Hellinger values into an orthogonality verdict via the
//! series `sum (H_n^{-2} - 1)`.

use crate::identities::{IdentityError, SquareMatrix};
use crate::seqlang::{DomainError, FamilyExpr};
use crate::series::{
    classify_summand, ClassifyPolicy, DivergenceVerdict, MeasureFamilySpec, PartialSumTrace,
    SeriesError, SeriesKind, Verdict, WindowMode,
};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GaussianError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is singular (|det| <= 1e-12)")]
    SingularMatrix,
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("precision entries must be strictly positive")]
    NonPositivePrecision,
    #[error("Hellinger term H_{n} = {value} outside (0, 1]")]
    InvalidHellingerValue { n: i64, value: f64 },
    #[error("family not strictly positive at n = {n} (value {value})")]
    FamilyNotPositive { n: i64, value: f64 },
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Eval(#[from] DomainError),
}

/// Product Gaussian with diagonal precision `B` and mean `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianBlock {
    precision: Vec<f64>,
    mean: Vec<f64>,
}

impl GaussianBlock {
    pub fn new(precision: Vec<f64>, mean: Vec<f64>) -> Result<Self, GaussianError> {
        if precision.len() != mean.len() {
            return Err(GaussianError::DimensionMismatch {
                left: precision.len(),
                right: mean.len(),
            });
        }
        if precision.is_empty() || precision.iter().any(|b| !b.is_finite() || *b <= 0.0) {
            return Err(GaussianError::NonPositivePrecision);
        }
        Ok(GaussianBlock { precision, mean })
    }

    pub fn dim(&self) -> usize {
        self.precision.len()
    }

    pub fn precision(&self) -> &[f64] {
        &self.precision
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Density `(det B / pi^m)^{1/2} exp(-(B(x-a), x-a))` at `x`.
    pub fn density(&self, x: &[f64]) -> Result<f64, GaussianError> {
        let m = self.dim();
        if x.len() != m {
            return Err(GaussianError::DimensionMismatch {
                left: m,
                right: x.len(),
            });
        }
        let det: f64 = self.precision.iter().product();
        let norm = (det / std::f64::consts::PI.powi(m as i32)).sqrt();
        let quad: f64 = (0..m)
            .map(|k| {
                let d = x[k] - self.mean[k];
                self.precision[k] * d * d
            })
            .sum();
        Ok(norm * (-quad).exp())
    }
}

/// Image of a [`GaussianBlock`] under a left translation: full precision
/// matrix `t^T B t` and mean `t^{-1} a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushedGaussian {
    pub precision: SquareMatrix,
    pub mean: Vec<f64>,
}

impl PushedGaussian {
    /// Density `(det P / pi^m)^{1/2} exp(-(P(x-a), x-a))` at `x`.
    pub fn density(&self, x: &[f64]) -> Result<f64, GaussianError> {
        let m = self.precision.dim();
        if x.len() != m {
            return Err(GaussianError::DimensionMismatch {
                left: m,
                right: x.len(),
            });
        }
        let diff: Vec<f64> = x.iter().zip(&self.mean).map(|(xi, ai)| xi - ai).collect();
        let pd = self.precision.mul_vec(&diff)?;
        let quad: f64 = pd.iter().zip(&diff).map(|(u, v)| u * v).sum();
        let norm = (self.precision.det() / std::f64::consts::PI.powi(m as i32)).sqrt();
        Ok(norm * (-quad).exp())
    }
}

/// Push a block through the left action of `t`: the law of `t^{-1} x`.
pub fn pushforward_left(
    block: &GaussianBlock,
    t: &SquareMatrix,
) -> Result<PushedGaussian, GaussianError> {
    let m = block.dim();
    if t.dim() != m {
        return Err(GaussianError::DimensionMismatch {
            left: t.dim(),
            right: m,
        });
    }
    if t.det().abs() <= 1e-12 {
        return Err(GaussianError::SingularMatrix);
    }
    let b = SquareMatrix::diagonal(block.precision())?;
    let precision = t.transpose().mul(&b)?.mul(t)?;
    let t_inv = t.inverse().map_err(|_| GaussianError::SingularMatrix)?;
    let mean = t_inv.mul_vec(block.mean())?;
    Ok(PushedGaussian { precision, mean })
}

/// Hellinger integral of two centered Gaussians with symmetric positive
/// definite precisions `B` and `C`:
/// `H = (det B det C / det^2((B+C)/2))^{1/4}` in `(0, 1]`, with `H = 1`
/// exactly when `B = C`.
pub fn hellinger_pair(b: &SquareMatrix, c: &SquareMatrix) -> Result<f64, GaussianError> {
    if b.dim() != c.dim() {
        return Err(GaussianError::DimensionMismatch {
            left: b.dim(),
            right: c.dim(),
        });
    }
    for m in [b, c] {
        if !m.is_symmetric(1e-9) || !m.is_positive_definite() {
            return Err(GaussianError::NotPositiveDefinite);
        }
    }
    let mid = b.add(c)?.scale(0.5);
    let det_mid = mid.det();
    Ok((b.det() * c.det() / (det_mid * det_mid)).powf(0.25))
}

/// Hellinger integral between a centered diagonal block and its left
/// translate by `t`, via `H^{-2} = det(I + X^T X) / (2^m |det t|)` with
/// `X = B^{1/2} t B^{-1/2}`.
pub fn hellinger_left_action(
    precision_diag: &[f64],
    t: &SquareMatrix,
) -> Result<f64, GaussianError> {
    let m = precision_diag.len();
    if t.dim() != m {
        return Err(GaussianError::DimensionMismatch {
            left: t.dim(),
            right: m,
        });
    }
    if precision_diag.iter().any(|b| b.is_nan() || *b <= 0.0) {
        return Err(GaussianError::NonPositivePrecision);
    }
    let det_t = t.det();
    if det_t.abs() <= 1e-12 {
        return Err(GaussianError::SingularMatrix);
    }
    let x = scaled_conjugate(precision_diag, t)?;
    let gram = x.transpose().mul(&x)?;
    let mut a = gram;
    for k in 0..m {
        a.set(k, k, a.get(k, k) + 1.0);
    }
    let h_inv_sq = a.det() / (2f64.powi(m as i32) * det_t.abs());
    Ok(h_inv_sq.powf(-0.5))
}

/// `X = B^{1/2} t B^{-1/2}` for a diagonal positive `B`.
pub fn scaled_conjugate(
    precision_diag: &[f64],
    t: &SquareMatrix,
) -> Result<SquareMatrix, GaussianError> {
    let m = precision_diag.len();
    if t.dim() != m {
        return Err(GaussianError::DimensionMismatch {
            left: t.dim(),
            right: m,
        });
    }
    Ok(SquareMatrix::from_fn(m, |i, j| {
        t.get(i, j) * (precision_diag[i] / precision_diag[j]).sqrt()
    })?)
}

/// Partial sums of the mean-shift criterion series
/// `sum_n sum_r b_r(n) (sum_s (t_rs - delta_rs) a_s(n))^2`.
pub fn mean_shift_series(
    spec: &MeasureFamilySpec,
    t: &SquareMatrix,
    n: u32,
) -> Result<PartialSumTrace, GaussianError> {
    Ok(crate::series::partial_sums(
        spec,
        &SeriesKind::MeanShift { t: t.clone() },
        n,
    )?)
}

/// Kolmogorov zero-one law for `mu_b(l_2(a))`: the measure of the
/// weighted-l2 ball is 0 when `sum_{k>=1} a_k/b_k` diverges and 1 when it
/// converges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroOneVerdict {
    Zero,
    One,
    Inconclusive,
}

pub fn zero_one_law(
    a_fam: &FamilyExpr,
    b_fam: &FamilyExpr,
    n_limit: u32,
    policy: &ClassifyPolicy,
) -> Result<(ZeroOneVerdict, DivergenceVerdict), GaussianError> {
    for n in 1..=(n_limit as i64) {
        for fam in [a_fam, b_fam] {
            let v = fam.eval(n)?;
            // far out, a zero is tolerated as underflow of a decaying
            // positive family
            if v < 0.0 || v.is_nan() || (v == 0.0 && n <= 32) {
                return Err(GaussianError::FamilyNotPositive { n, value: v });
            }
        }
    }
    let summand = FamilyExpr::div(a_fam.clone(), b_fam.clone());
    let outcome = classify_summand(&summand, n_limit, WindowMode::PositiveOnly, policy)?;
    let verdict = match outcome.verdict.verdict {
        Verdict::Diverges => ZeroOneVerdict::Zero,
        Verdict::Converges => ZeroOneVerdict::One,
        Verdict::Inconclusive => ZeroOneVerdict::Inconclusive,
    };
    Ok((verdict, outcome.verdict))
}

/// Kakutani dichotomy report for a family of per-index Hellinger values
/// `H_n` over `n >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KakutaniReport {
    /// Verdict on the primary series `sum (H_n^{-2} - 1)`.
    pub verdict: DivergenceVerdict,
    /// Cross-check verdict on `-sum log H_n`.
    pub log_check: DivergenceVerdict,
    pub agree: bool,
}

/// Kakutani criterion: the product measures are orthogonal exactly when
/// `sum (H_n^{-2} - 1)` diverges. The `-sum log H_n` classifier is run as
/// a cross-check; a disagreement is reported, never reconciled.
pub fn kakutani_orthogonality(
    h_family: &FamilyExpr,
    n_limit: u32,
    policy: &ClassifyPolicy,
) -> Result<KakutaniReport, GaussianError> {
    for n in 1..=(n_limit as i64) {
        let h = h_family.eval(n)?;
        if !(h > 0.0 && h <= 1.0 + 1e-12) {
            return Err(GaussianError::InvalidHellingerValue { n, value: h });
        }
    }
    use FamilyExpr as F;
    let primary = F::sub(
        F::pow(h_family.clone(), crate::seqlang::Rational::from_integer(-2)),
        F::num(1.0),
    );
    let log_form = F::mul(
        F::num(-1.0),
        F::log1p(F::sub(h_family.clone(), F::num(1.0))),
    );
    let verdict = classify_summand(&primary, n_limit, WindowMode::PositiveOnly, policy)?.verdict;
    let log_check = classify_summand(&log_form, n_limit, WindowMode::PositiveOnly, policy)?.verdict;
    let agree = verdict.verdict == log_check.verdict;
    Ok(KakutaniReport {
        verdict,
        log_check,
        agree,
    })
}
