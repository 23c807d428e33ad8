//! Approximation criteria and the top-level irreducibility verdict.
//!
//! For m = 2 the decision works through four Delta-functional traces on
//! specific vector families derived from the measure parameters, ratio
//! tests on `Sigma^{12} = sum b_1/b_2` and `Sigma^{21}`, generator Gram
//! matrices with a structured `D(lambda)` closed form and a dense LU
//! oracle, and a projection-growth check for pairs of vectors whose norms
//! and all grid combinations diverge. The case classification follows the
//! two decision tables (which pair of row operators can be approximated)
//! and the A/B split on `Sigma_1(s)` vs `Sigma_2(C_1, C_2)`.

mod moments;

use crate::identities::{self, IdentityError};
use crate::ortho::{
    canonical_battery_m1, canonical_battery_m2, OrthoError, OrthogonalityReport,
    OrthogonalityVerdict,
};
use crate::seqlang::{DomainError, FamilyExpr};
use crate::series::{
    classify_ratio_trace, classify_series, classify_summand, ClassifyPolicy, DivergenceVerdict,
    Grids, MeasureFamilySpec, PartialSumTrace, SeriesError, SeriesKind, Verdict, WindowMode,
};
use moments::Poly;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IrredError {
    #[error("operation requires m = {required}, spec has m = {m}")]
    UnsupportedM { required: usize, m: usize },
    #[error("generator Gram matrix singular or factorization undefined: {what}")]
    SingularGram { what: String },
    #[error("projection-growth prerequisite not established: {what}")]
    PrerequisiteNotMet { what: String },
    #[error("unsupported term shape: {what}")]
    UnsupportedTermShape { what: String },
    #[error("window of size {len} outside 1..=64")]
    WindowSize { len: usize },
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Eval(#[from] DomainError),
}

/// The named vector families over the window `k = -N..N`:
/// `f1_k = b1/sqrt(b1^2 + 2 b1 b2)`, `g1_k = b2/sqrt(b1^2 + 2 b1 b2)`,
/// `f2_k = b2/sqrt(b2^2 + 2 b1 b2)`, `g2_k = b1/sqrt(b2^2 + 2 b1 b2)`,
/// `f_k = a1 (1/(2b1) + 1/(2b2))^{-1/2}`, `g_k` likewise with `a2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVectors {
    pub half_width: u32,
    pub f1: Vec<f64>,
    pub g1: Vec<f64>,
    pub f2: Vec<f64>,
    pub g2: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl CriterionVectors {
    pub fn materialize(spec: &MeasureFamilySpec, half_width: u32) -> Result<Self, IrredError> {
        require_m2(spec)?;
        let mut out = CriterionVectors {
            half_width,
            f1: Vec::new(),
            g1: Vec::new(),
            f2: Vec::new(),
            g2: Vec::new(),
            f: Vec::new(),
            g: Vec::new(),
        };
        let w = half_width as i64;
        for k in -w..=w {
            let b = spec.b_at(k)?;
            let a = spec.a_at(k)?;
            let (c1, c2) = components(b[0], b[1], a[0], a[1]);
            out.f1.push(c1.0);
            out.g1.push(c1.1);
            out.f2.push(c1.2);
            out.g2.push(c1.3);
            out.f.push(c2.0);
            out.g.push(c2.1);
        }
        Ok(out)
    }
}

#[allow(clippy::type_complexity)]
fn components(b1: f64, b2: f64, a1: f64, a2: f64) -> ((f64, f64, f64, f64), (f64, f64)) {
    // ratio forms stay finite when one precision overflows f64
    let q = b2 / b1;
    let f1 = (1.0 + 2.0 * q).powf(-0.5);
    let g1 = (q / (2.0 + 1.0 / q)).sqrt();
    let f2 = (1.0 + 2.0 / q).powf(-0.5);
    let g2 = ((1.0 / q) / (q + 2.0)).sqrt();
    let w = (0.5 / b1 + 0.5 / b2).powf(-0.5);
    ((f1, g1, f2, g2), (a1 * w, a2 * w))
}

/// Which Delta trace to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriterionWhich {
    /// `Sigma_{1,m}(x,x) = Delta(f1, g1)`.
    XX1,
    /// `Sigma_{2,m}(x,x) = Delta(f2, g2)`.
    XX2,
    /// `Sigma_{1,m}(D) = Delta(f, g)`.
    D1,
    /// `Sigma_{2,m}(D) = Delta(g, f)`.
    D2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaTrace {
    pub checkpoints: Vec<u32>,
    pub values: Vec<f64>,
    pub verdict: DivergenceVerdict,
}

/// Running sums sufficient to evaluate `Delta` at growing windows.
#[derive(Debug, Clone, Copy, Default)]
struct GramAccumulator {
    ff: f64,
    gg: f64,
    fg: f64,
}

impl GramAccumulator {
    fn push(&mut self, f: f64, g: f64) {
        self.ff += f * f;
        self.gg += g * g;
        self.fg += f * g;
    }

    fn delta(&self) -> f64 {
        let gram_fg = self.ff * self.gg - self.fg * self.fg;
        (self.ff + gram_fg) / (self.gg + 1.0)
    }
}

/// Delta-functional trace at dyadic windows, with a growth verdict
/// (`Diverges` means the trace tends to infinity).
pub fn criterion_delta(
    spec: &MeasureFamilySpec,
    which: CriterionWhich,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<DeltaTrace, IrredError> {
    require_m2(spec)?;
    let n = n.min(spec.n_max());
    let checkpoints = dyadic(n);
    let mut acc = GramAccumulator::default();
    let mut values = Vec::with_capacity(checkpoints.len());
    let push_index = |k: i64, acc: &mut GramAccumulator| -> Result<(), IrredError> {
        let b = spec.b_at(k)?;
        let a = spec.a_at(k)?;
        let ((f1, g1, f2, g2), (f, g)) = components(b[0], b[1], a[0], a[1]);
        let (x, y) = match which {
            CriterionWhich::XX1 => (f1, g1),
            CriterionWhich::XX2 => (f2, g2),
            CriterionWhich::D1 => (f, g),
            CriterionWhich::D2 => (g, f),
        };
        acc.push(x, y);
        Ok(())
    };
    push_index(0, &mut acc)?;
    let mut next = 0usize;
    for k in 1..=(n as i64) {
        push_index(k, &mut acc)?;
        push_index(-k, &mut acc)?;
        while next < checkpoints.len() && checkpoints[next] as i64 == k {
            values.push(acc.delta());
            next += 1;
        }
    }
    let verdict = classify_ratio_trace(&checkpoints, &values, policy);
    Ok(DeltaTrace {
        checkpoints,
        values,
        verdict,
    })
}

/// Ratio test target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RatioWhich {
    /// `Sigma^{12} = sum b_1/b_2`.
    B12,
    /// `Sigma^{21} = sum b_2/b_1`.
    B21,
}

pub fn ratio_test(
    spec: &MeasureFamilySpec,
    which: RatioWhich,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<DivergenceVerdict, IrredError> {
    require_m2(spec)?;
    let kind = match which {
        RatioWhich::B12 => SeriesKind::RatioB12,
        RatioWhich::B21 => SeriesKind::RatioB21,
    };
    Ok(classify_series(spec, &kind, n, policy)?.verdict)
}

/// Which generator-word family the Gram matrix is built from:
/// the two lowering-operator families or the two coordinate-pair
/// families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GramFamily {
    D1,
    D2,
    XX1,
    XX2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramReport {
    /// The structured Gram matrix (dominant-term entries).
    pub matrix: Vec<Vec<f64>>,
    /// Quadratic form through the `D(lambda)` closed form.
    pub closed_form_quadform: f64,
    /// Quadratic form through a dense LU solve of the same matrix.
    pub oracle_quadform: f64,
}

/// Build the structured generator Gram matrix over the index window and
/// evaluate `(A^{-1} b, b)` along both routes.
///
/// For `D1` the entries are `diag: 1/(2 b_1k) + 1/(2 b_2k) + a_2k^2`,
/// `off: a_2k a_2r`, with `lambda_k = (1/(2b_1k) + 1/(2b_2k))/a_2k^2`,
/// `mu_k = a_1k/a_2k`; `D2` swaps the roles of the rows. For `XX1`:
/// `diag: (b_1k + b_2k)^2`, `off: b_2k b_2r`,
/// `lambda_k = (1 + b_1k/b_2k)^2 - 1`, `mu_k = b_1k/b_2k`; `XX2` swaps.
pub fn generator_gram(
    spec: &MeasureFamilySpec,
    family: GramFamily,
    window: &[i64],
) -> Result<GramReport, IrredError> {
    require_m2(spec)?;
    let w = window.len();
    if w == 0 || w > 64 {
        return Err(IrredError::WindowSize { len: w });
    }
    let mut diag_scale = Vec::with_capacity(w);
    let mut lambda = Vec::with_capacity(w);
    let mut mu = Vec::with_capacity(w);
    let mut rhs = Vec::with_capacity(w);
    for &k in window {
        let b = spec.b_at(k)?;
        let a = spec.a_at(k)?;
        let half_inv = 0.5 / b[0] + 0.5 / b[1];
        let (scale, lam, m, r) = match family {
            GramFamily::D1 => {
                if a[1] == 0.0 {
                    return Err(IrredError::SingularGram {
                        what: format!("a_2({k}) = 0 leaves lambda undefined"),
                    });
                }
                (a[1], half_inv / (a[1] * a[1]), a[0] / a[1], a[0])
            }
            GramFamily::D2 => {
                if a[0] == 0.0 {
                    return Err(IrredError::SingularGram {
                        what: format!("a_1({k}) = 0 leaves lambda undefined"),
                    });
                }
                (a[0], half_inv / (a[0] * a[0]), a[1] / a[0], a[1])
            }
            GramFamily::XX1 => {
                let ratio = b[0] / b[1];
                (b[1], (1.0 + ratio).powi(2) - 1.0, ratio, b[0])
            }
            GramFamily::XX2 => {
                let ratio = b[1] / b[0];
                (b[0], (1.0 + ratio).powi(2) - 1.0, ratio, b[1])
            }
        };
        diag_scale.push(scale);
        lambda.push(lam);
        mu.push(m);
        rhs.push(r);
    }
    let closed = identities::d_lambda(&lambda, &mu)
        .map_err(|e| IrredError::SingularGram {
            what: e.to_string(),
        })?
        .quadform;

    // dense route: A = diag * D(lambda) * diag
    let a_mat = nalgebra::DMatrix::from_fn(w, w, |i, j| {
        let d = if i == j { 1.0 + lambda[i] } else { 1.0 };
        diag_scale[i] * d * diag_scale[j]
    });
    let b_vec = nalgebra::DVector::from_vec(rhs.clone());
    let lu = a_mat.clone().lu();
    let x = lu.solve(&b_vec).ok_or_else(|| IrredError::SingularGram {
        what: "dense LU solve failed".into(),
    })?;
    let oracle = x.dot(&b_vec);

    let matrix = (0..w)
        .map(|i| (0..w).map(|j| a_mat[(i, j)]).collect())
        .collect();
    Ok(GramReport {
        matrix,
        closed_form_quadform: closed,
        oracle_quadform: oracle,
    })
}

/// One coordinate factor of a generator word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoordFactor {
    /// Row (1-based).
    pub row: usize,
    /// Index along the row.
    pub index: i64,
    /// Centered factor `x - a` instead of the raw coordinate.
    pub centered: bool,
}

/// A product of coordinate factors and lowering operators applied to 1.
/// `d_ops` compose left-to-right: `[(1,n), (2,n)]` is `D_{1n} D_{2n} 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct TermSpec {
    pub coords: Vec<CoordFactor>,
    pub d_ops: Vec<(usize, i64)>,
}

fn term_poly(term: &TermSpec, spec: &MeasureFamilySpec) -> Result<Poly, IrredError> {
    if term.coords.len() > 2 || term.d_ops.len() > 2 {
        return Err(IrredError::UnsupportedTermShape {
            what: format!(
                "at most 2 coordinate factors and 2 D-factors (got {} and {})",
                term.coords.len(),
                term.d_ops.len()
            ),
        });
    }
    let check_row = |row: usize| -> Result<(), IrredError> {
        if row == 0 || row > spec.m() {
            return Err(IrredError::UnsupportedTermShape {
                what: format!("row {row} outside 1..={}", spec.m()),
            });
        }
        Ok(())
    };
    let mut poly = Poly::constant(1.0);
    for (row, idx) in term.d_ops.iter().rev() {
        check_row(*row)?;
        let b = spec
            .b_row(*row)
            .eval(*idx)
            .map_err(crate::series::SeriesError::from)?;
        poly = poly.apply_d((*row, *idx), b);
    }
    for cf in &term.coords {
        check_row(cf.row)?;
        if cf.centered {
            poly = poly.mul_var((cf.row, cf.index));
        } else {
            let a = spec
                .a_row(cf.row)
                .eval(cf.index)
                .map_err(crate::series::SeriesError::from)?;
            poly = poly.mul_coord((cf.row, cf.index), a);
        }
    }
    Ok(poly)
}

/// Exact L^2(mu) inner product of two generator words.
pub fn moment_inner_product(
    left: &TermSpec,
    right: &TermSpec,
    spec: &MeasureFamilySpec,
) -> Result<f64, IrredError> {
    let l = term_poly(left, spec)?;
    let r = term_poly(right, spec)?;
    l.mul(&r).expectation(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionGrowthReport {
    pub checkpoints: Vec<u32>,
    /// `Gamma(f_(n), g_(n)) / Gamma(g_(n))` at each checkpoint.
    pub ratio_over_g: Vec<f64>,
    /// `Gamma(f_(n), g_(n)) / Gamma(f_(n))` at each checkpoint.
    pub ratio_over_f: Vec<f64>,
    /// Fraction of strictly increasing steps of `ratio_over_g`.
    pub monotone_fraction: f64,
    /// Final `ratio_over_g` over its first value.
    pub growth_factor: f64,
    pub exceeds_10x: bool,
}

/// Projection-growth check for vectors `f(k), g(k)` over `k >= 1`.
///
/// Prerequisite (checked first): `||f||^2`, `||g||^2` and every grid
/// combination `||C_1 f + C_2 g||^2` classify as divergent. Then both
/// Gram ratios are evaluated at dyadic windows.
pub fn projection_growth_check(
    f: &FamilyExpr,
    g: &FamilyExpr,
    n_max: u32,
    grids: &Grids,
    policy: &ClassifyPolicy,
) -> Result<ProjectionGrowthReport, IrredError> {
    use FamilyExpr as F;
    for (c1, c2) in &grids.c {
        let combo = F::sq(F::add(
            F::mul(F::num(*c1), f.clone()),
            F::mul(F::num(*c2), g.clone()),
        ));
        let v = classify_summand(&combo, n_max, WindowMode::PositiveOnly, policy)?.verdict;
        if !v.is_diverges() {
            return Err(IrredError::PrerequisiteNotMet {
                what: format!("||{c1} f + {c2} g||^2 is not divergent ({:?})", v.verdict),
            });
        }
    }
    let checkpoints = dyadic(n_max);
    let mut acc = GramAccumulator::default();
    let mut ratio_over_g = Vec::new();
    let mut ratio_over_f = Vec::new();
    let mut next = 0usize;
    for k in 1..=(n_max as i64) {
        let fv = f.eval(k).map_err(crate::series::SeriesError::from)?;
        let gv = g.eval(k).map_err(crate::series::SeriesError::from)?;
        acc.push(fv, gv);
        while next < checkpoints.len() && checkpoints[next] as i64 == k {
            let gram_fg = acc.ff * acc.gg - acc.fg * acc.fg;
            ratio_over_g.push(gram_fg / acc.gg);
            ratio_over_f.push(gram_fg / acc.ff);
            next += 1;
        }
    }
    let increases = ratio_over_g.windows(2).filter(|w| w[1] > w[0]).count();
    let monotone_fraction = if ratio_over_g.len() > 1 {
        increases as f64 / (ratio_over_g.len() - 1) as f64
    } else {
        1.0
    };
    let growth_factor = ratio_over_g.last().unwrap() / ratio_over_g.first().unwrap().max(1e-300);
    Ok(ProjectionGrowthReport {
        checkpoints,
        monotone_fraction,
        growth_factor,
        exceeds_10x: growth_factor > 10.0,
        ratio_over_g,
        ratio_over_f,
    })
}

// ---- case classification -------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableICase {
    One,
    Two,
    ThreeA,
    ThreeB,
    ThreeC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableIICase {
    One,
    Two,
    ThreeA,
    ThreeB,
    ThreeC,
    Four,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SplitCase {
    A,
    B,
    NotApplicable,
}

/// Which pair of per-row operators the criteria approximate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ApproximablePair {
    X1X2,
    X1D2,
    D1X2,
    D1D2,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseTag {
    pub table_i: Option<TableICase>,
    pub table_ii: Option<TableIICase>,
    pub split: SplitCase,
    pub approximable: ApproximablePair,
    /// Additional operators approximable beyond the reported pair.
    pub extra_approximable: Vec<String>,
    /// Set when the computed verdicts land in a combination the theory
    /// excludes (never silently reconciled).
    pub contradiction: Option<String>,
}

fn require_m2(spec: &MeasureFamilySpec) -> Result<(), IrredError> {
    if spec.m() != 2 {
        return Err(IrredError::UnsupportedM {
            required: 2,
            m: spec.m(),
        });
    }
    Ok(())
}

fn dyadic(n: u32) -> Vec<u32> {
    let mut cps = Vec::new();
    let mut k = 16u32;
    while k <= n {
        cps.push(k);
        k = k.saturating_mul(2);
    }
    if cps.last().copied() != Some(n) {
        cps.push(n);
    }
    cps
}

/// `||g^1||^2` summand `b_2^2/(b_1^2 + 2 b_1 b_2)` (and the mirrored
/// `||g^2||^2` form).
fn norm_g_summand(spec: &MeasureFamilySpec, first: bool) -> FamilyExpr {
    use FamilyExpr as F;
    let b1 = spec.b_row(1).clone();
    let b2 = spec.b_row(2).clone();
    let (num, da, db) = if first {
        (b2.clone(), b1.clone(), b2)
    } else {
        (b1.clone(), b2, b1)
    };
    F::div(
        F::sq(num),
        F::add(F::sq(da.clone()), F::mul(F::num(2.0), F::mul(da, db))),
    )
}

fn table_i(
    spec: &MeasureFamilySpec,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<(Option<TableICase>, [DivergenceVerdict; 2]), IrredError> {
    let s12 = classify_series(spec, &SeriesKind::RatioB12, n, policy)?.verdict;
    let s21 = classify_series(spec, &SeriesKind::RatioB21, n, policy)?.verdict;
    let case = match (s12.verdict, s21.verdict) {
        (Verdict::Converges, _) => Some(TableICase::One),
        (_, Verdict::Converges) => Some(TableICase::Two),
        (Verdict::Diverges, Verdict::Diverges) => {
            let g1 = classify_summand(&norm_g_summand(spec, true), n, WindowMode::TwoSided, policy)?
                .verdict;
            let g2 =
                classify_summand(&norm_g_summand(spec, false), n, WindowMode::TwoSided, policy)?
                    .verdict;
            match (g1.verdict, g2.verdict) {
                (Verdict::Converges, _) => Some(TableICase::ThreeA),
                (_, Verdict::Converges) => Some(TableICase::ThreeB),
                (Verdict::Diverges, Verdict::Diverges) => Some(TableICase::ThreeC),
                _ => None,
            }
        }
        _ => None,
    };
    Ok((case, [s12, s21]))
}

fn table_ii(
    spec: &MeasureFamilySpec,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<Option<TableIICase>, IrredError> {
    let nf = classify_series(spec, &SeriesKind::NormF, n, policy)?.verdict;
    let ng = classify_series(spec, &SeriesKind::NormG, n, policy)?.verdict;
    let case = match (nf.verdict, ng.verdict) {
        (Verdict::Diverges, Verdict::Converges) => Some(TableIICase::One),
        (Verdict::Converges, Verdict::Diverges) => Some(TableIICase::Two),
        (Verdict::Converges, Verdict::Converges) => Some(TableIICase::Four),
        (Verdict::Diverges, Verdict::Diverges) => {
            // both diverge: compare growth of the partial sums
            match (nf.tail_exponent, ng.tail_exponent) {
                (Some(pf), Some(pg)) if nf.method == crate::series::Method::Symbolic
                    && ng.method == crate::series::Method::Symbolic =>
                {
                    if pf > pg + 1e-9 {
                        Some(TableIICase::ThreeA)
                    } else if pg > pf + 1e-9 {
                        Some(TableIICase::ThreeB)
                    } else {
                        Some(TableIICase::ThreeC)
                    }
                }
                _ => norm_ratio_case(spec, n, policy)?,
            }
        }
        _ => None,
    };
    Ok(case)
}

/// Numeric fallback for the `||f_m||^2 / ||g_m||^2` trace.
fn norm_ratio_case(
    spec: &MeasureFamilySpec,
    n: u32,
    policy: &ClassifyPolicy,
) -> Result<Option<TableIICase>, IrredError> {
    use crate::seqlang::DomainError;
    let f_kind = SeriesKind::NormF.summand(spec)?;
    let g_kind = SeriesKind::NormG.summand(spec)?;
    let exhausted = |e: &SeriesError| {
        matches!(
            e,
            SeriesError::Eval(
                DomainError::NotANumber { .. } | DomainError::DivisionByZero { .. }
            )
        )
    };
    let tf = match PartialSumTrace::compute(&f_kind, n, WindowMode::TwoSided) {
        Ok(t) => t,
        Err(e) if exhausted(&e) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let tg = match PartialSumTrace::compute(&g_kind, n, WindowMode::TwoSided) {
        Ok(t) => t,
        Err(e) if exhausted(&e) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let ratio: Vec<f64> = tf
        .sums
        .iter()
        .zip(&tg.sums)
        .map(|(a, b)| a / b)
        .collect();
    let inverse: Vec<f64> = ratio.iter().map(|r| 1.0 / r).collect();
    let up = classify_ratio_trace(&tf.checkpoints, &ratio, policy);
    if up.is_diverges() {
        return Ok(Some(TableIICase::ThreeA));
    }
    let down = classify_ratio_trace(&tf.checkpoints, &inverse, policy);
    if down.is_diverges() {
        return Ok(Some(TableIICase::ThreeB));
    }
    if up.is_converges() && down.is_converges() {
        return Ok(Some(TableIICase::ThreeC));
    }
    Ok(None)
}

/// `Sigma_1(s)` divergent on the whole s-grid?
fn split_case(
    spec: &MeasureFamilySpec,
    n: u32,
    grids: &Grids,
    policy: &ClassifyPolicy,
    battery_orthogonal: bool,
) -> Result<(SplitCase, Option<String>), IrredError> {
    if !battery_orthogonal {
        return Ok((SplitCase::NotApplicable, None));
    }
    let mut sigma1_all_div = true;
    let mut sigma1_some_conv = false;
    let mut inconclusive = false;
    for &s in &grids.s {
        let v = classify_series(spec, &SeriesKind::Sigma1 { s }, n, policy)?.verdict;
        match v.verdict {
            Verdict::Diverges => {}
            Verdict::Converges => {
                sigma1_all_div = false;
                sigma1_some_conv = true;
            }
            Verdict::Inconclusive => {
                sigma1_all_div = false;
                inconclusive = true;
            }
        }
    }
    if sigma1_all_div {
        return Ok((SplitCase::A, None));
    }
    if sigma1_some_conv {
        let mut sigma2_all_div = true;
        for &(c1, c2) in &grids.c {
            let v = classify_series(spec, &SeriesKind::Sigma2C { c1, c2 }, n, policy)?.verdict;
            if !v.is_diverges() {
                sigma2_all_div = false;
                break;
            }
        }
        if sigma2_all_div {
            return Ok((SplitCase::B, None));
        }
        return Ok((
            SplitCase::NotApplicable,
            Some(
                "battery orthogonal yet Sigma_1 and Sigma_2 both admit convergent grid points"
                    .into(),
            ),
        ));
    }
    let _ = inconclusive;
    Ok((SplitCase::NotApplicable, None))
}

/// Case classification: decision tables I/II, the A/B split, and the
/// approximable operator pair.
pub fn classify_case(
    spec: &MeasureFamilySpec,
    n: u32,
    grids: &Grids,
    policy: &ClassifyPolicy,
) -> Result<CaseTag, IrredError> {
    require_m2(spec)?;
    let battery = canonical_battery_m2(spec, n, grids, policy)?;
    classify_case_with_battery(spec, n, grids, policy, &battery)
}

pub(crate) fn classify_case_with_battery(
    spec: &MeasureFamilySpec,
    n: u32,
    grids: &Grids,
    policy: &ClassifyPolicy,
    battery: &OrthogonalityReport,
) -> Result<CaseTag, IrredError> {
    let n = n.min(spec.n_max());
    let (ti, _ratios) = table_i(spec, n, policy)?;
    let tii = table_ii(spec, n, policy)?;
    let (split, mut contradiction) =
        split_case(spec, n, grids, policy, battery.all_orthogonal)?;

    let mut extra = Vec::new();
    let approximable = if !battery.all_orthogonal {
        ApproximablePair::Undetermined
    } else {
        match ti {
            None => ApproximablePair::Undetermined,
            Some(TableICase::One) => {
                extra.push("x2".to_string());
                ApproximablePair::D1D2
            }
            Some(TableICase::Two) => {
                extra.push("x1".to_string());
                ApproximablePair::D1D2
            }
            Some(_) => match split {
                SplitCase::A => ApproximablePair::X1X2,
                SplitCase::B => match tii {
                    Some(TableIICase::One) | Some(TableIICase::ThreeA) => {
                        extra.push("x1".to_string());
                        ApproximablePair::D1X2
                    }
                    Some(TableIICase::Two) | Some(TableIICase::ThreeB) => {
                        extra.push("x2".to_string());
                        ApproximablePair::X1D2
                    }
                    Some(TableIICase::ThreeC) => ApproximablePair::D1D2,
                    Some(TableIICase::Four) => {
                        contradiction = Some(
                            "split B with both ||f||^2 and ||g||^2 finite cannot be realized"
                                .into(),
                        );
                        ApproximablePair::Undetermined
                    }
                    None => ApproximablePair::Undetermined,
                },
                SplitCase::NotApplicable => ApproximablePair::Undetermined,
            },
        }
    };
    Ok(CaseTag {
        table_i: ti,
        table_ii: tii,
        split,
        approximable,
        extra_approximable: extra,
        contradiction,
    })
}

// ---- top-level verdict ----------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IrredVerdict {
    Irreducible,
    NotIrreducible,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrreducibilityReport {
    pub orthogonality: OrthogonalityReport,
    pub case: Option<CaseTag>,
    pub verdict: IrredVerdict,
}

/// Irreducibility verdict for m in {1, 2}: irreducible exactly when the
/// canonical battery is all-orthogonal with no inconclusive contributor.
pub fn irreducibility_verdict(
    spec: &MeasureFamilySpec,
    n: u32,
    grids: &Grids,
    policy: &ClassifyPolicy,
) -> Result<IrreducibilityReport, IrredError> {
    match spec.m() {
        1 => {
            let battery = canonical_battery_m1(spec, n, policy)?;
            let verdict = verdict_from_battery(&battery);
            Ok(IrreducibilityReport {
                orthogonality: battery,
                case: None,
                verdict,
            })
        }
        2 => {
            let battery = canonical_battery_m2(spec, n, grids, policy)?;
            let verdict = verdict_from_battery(&battery);
            let case = classify_case_with_battery(spec, n, grids, policy, &battery)?;
            Ok(IrreducibilityReport {
                orthogonality: battery,
                case: Some(case),
                verdict,
            })
        }
        m => Err(IrredError::UnsupportedM { required: 2, m }),
    }
}

fn verdict_from_battery(battery: &OrthogonalityReport) -> IrredVerdict {
    match battery.overall {
        OrthogonalityVerdict::Orthogonal => IrredVerdict::Irreducible,
        OrthogonalityVerdict::Equivalent => IrredVerdict::NotIrreducible,
        OrthogonalityVerdict::Inconclusive => IrredVerdict::Inconclusive,
    }
}
