//! Exact small-matrix identity engine.
//!
//! Minors, the minor-expansion of `det(I + X^T X)`, the weighted variant
//! `F_lambda`, Gram matrices and determinants, the Lagrange identity for
//! two vectors, the distance-to-line formula, the structured matrix
//! `D(lambda) = diag(lambda) + ones` with closed-form determinant and
//! quadratic form, and the `Delta` functional built from Gram
//! determinants. Everything is plain `f64`; identity checks elsewhere
//! compare against independent dense routes with relative tolerances.

mod matrix;

pub use matrix::{SquareMatrix, MAX_DIM};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentityError {
    #[error("matrix dimension {dim} outside supported range 1..=8")]
    MatrixTooLarge { dim: usize },
    #[error("ragged matrix: {rows} rows but a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("minor index out of range or not strictly increasing")]
    IndexOutOfRange,
    #[error("vectors have mismatched lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("distance to the line spanned by the zero vector is undefined")]
    ZeroBaseVector,
    #[error("lambda entries must be strictly positive")]
    NonPositiveLambda,
    #[error("expansion form undefined for a zero lambda entry")]
    ZeroLambda,
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("non-finite entry")]
    NotFinite,
}

/// Row/column selection for a minor, 1-based as in the classical
/// notation `M^{i1..ir}_{j1..jr}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorIndex {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorIndex {
    /// Build a minor index from strictly increasing 1-based row and
    /// column sets of equal, nonzero size.
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self, IdentityError> {
        if rows.is_empty() || rows.len() != cols.len() {
            return Err(IdentityError::IndexOutOfRange);
        }
        for set in [&rows, &cols] {
            if set[0] == 0 || !set.windows(2).all(|w| w[0] < w[1]) {
                return Err(IdentityError::IndexOutOfRange);
            }
        }
        Ok(MinorIndex { rows, cols })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

/// Determinant of the submatrix of `x` selected by `idx`.
pub fn minor(x: &SquareMatrix, idx: &MinorIndex) -> Result<f64, IdentityError> {
    let m = x.dim();
    if idx.rows.last().copied().unwrap_or(0) > m || idx.cols.last().copied().unwrap_or(0) > m {
        return Err(IdentityError::IndexOutOfRange);
    }
    Ok(minor_unchecked(x, &idx.rows, &idx.cols))
}

fn minor_unchecked(x: &SquareMatrix, rows: &[usize], cols: &[usize]) -> f64 {
    let r = rows.len();
    let sub = SquareMatrix::from_fn(r, |i, j| x.get(rows[i] - 1, cols[j] - 1))
        .expect("submatrix within dimension cap");
    sub.det()
}

/// All r-element subsets of {1..m} in colexicographic order.
fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(m: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..=m {
            cur.push(v);
            rec(m, r, v + 1, cur, out);
            cur.pop();
        }
    }
    rec(m, r, 1, &mut cur, &mut out);
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

/// `det(I + X^T X)` by full minor enumeration:
/// `1 + sum over equal-size row/column subsets of squared minors`.
pub fn det_i_plus_xtx(x: &SquareMatrix) -> f64 {
    let m = x.dim();
    let mut total = 1.0;
    for r in 1..=m {
        let row_sets = subsets(m, r);
        let col_sets = row_sets.clone();
        for rows in &row_sets {
            for cols in &col_sets {
                let v = minor_unchecked(x, rows, cols);
                total += v * v;
            }
        }
    }
    total
}

/// `det(diag(lambda) + X^T X)` evaluated directly.
pub fn f_lambda(x: &SquareMatrix, lambda: &[f64]) -> Result<f64, IdentityError> {
    let m = x.dim();
    if lambda.len() != m {
        return Err(IdentityError::DimensionMismatch {
            left: m,
            right: lambda.len(),
        });
    }
    let gram = x.transpose().mul(x)?;
    let mut a = gram;
    for k in 0..m {
        a.set(k, k, a.get(k, k) + lambda[k]);
    }
    Ok(a.det())
}

/// Weighted minor expansion of `det(diag(lambda) + X^T X)`:
/// `prod(lambda) * (1 + sum over column subsets S of
/// (prod_{k in S} lambda_k)^{-1} * sum over row subsets R of M_{R,S}^2)`.
///
/// Undefined when some `lambda_k = 0`; the direct form [`f_lambda`] still
/// applies there.
pub fn f_lambda_expansion(x: &SquareMatrix, lambda: &[f64]) -> Result<f64, IdentityError> {
    let m = x.dim();
    if lambda.len() != m {
        return Err(IdentityError::DimensionMismatch {
            left: m,
            right: lambda.len(),
        });
    }
    if lambda.contains(&0.0) {
        return Err(IdentityError::ZeroLambda);
    }
    let mut inner = 1.0;
    for r in 1..=m {
        let sets = subsets(m, r);
        for cols in &sets {
            let weight: f64 = cols.iter().map(|k| lambda[k - 1]).product();
            let mut gram_det = 0.0;
            for rows in &sets {
                let v = minor_unchecked(x, rows, cols);
                gram_det += v * v;
            }
            inner += gram_det / weight;
        }
    }
    Ok(lambda.iter().product::<f64>() * inner)
}

/// Gram determinant of the rows of `x` selected by the 1-based set
/// `rows`; by the Cauchy-Binet identity it equals the sum of squared
/// minors over all column subsets of the same size.
pub fn gram_of_rows(x: &SquareMatrix, rows: &[usize]) -> Result<f64, IdentityError> {
    let m = x.dim();
    if rows.is_empty()
        || rows.len() > m
        || !(1..=m).contains(&rows[0])
        || rows.last().copied().unwrap() > m
        || !rows.windows(2).all(|w| w[0] < w[1])
    {
        return Err(IdentityError::IndexOutOfRange);
    }
    let vecs: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| (0..m).map(|j| x.get(i - 1, j)).collect())
        .collect();
    Ok(gram(&vecs)?.1)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix and determinant of a list of equal-length vectors.
pub fn gram(vectors: &[Vec<f64>]) -> Result<(SquareMatrix, f64), IdentityError> {
    let v = vectors.len();
    if v == 0 || v > MAX_DIM {
        return Err(IdentityError::MatrixTooLarge { dim: v });
    }
    let d = vectors[0].len();
    for w in vectors {
        if w.len() != d {
            return Err(IdentityError::LengthMismatch {
                left: d,
                right: w.len(),
            });
        }
    }
    let g = SquareMatrix::from_fn(v, |i, j| dot(&vectors[i], &vectors[j]))?;
    let det = g.det();
    Ok((g, det))
}

/// Gram determinant of a single vector: `||f||^2`.
pub fn gram1(f: &[f64]) -> f64 {
    dot(f, f)
}

/// Gram determinant of two vectors: `||f||^2 ||g||^2 - (f,g)^2`.
pub fn gram2(f: &[f64], g: &[f64]) -> Result<f64, IdentityError> {
    if f.len() != g.len() {
        return Err(IdentityError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let fg = dot(f, g);
    Ok(dot(f, f) * dot(g, g) - fg * fg)
}

/// Lagrange identity route to the two-vector Gram determinant:
/// `sum_{k<n} (f_k g_n - f_n g_k)^2`.
pub fn lagrange_gram2(f: &[f64], g: &[f64]) -> Result<f64, IdentityError> {
    if f.len() != g.len() {
        return Err(IdentityError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    let mut total = 0.0;
    for k in 0..f.len() {
        for n in (k + 1)..f.len() {
            let m = f[k] * g[n] - f[n] * g[k];
            total += m * m;
        }
    }
    Ok(total)
}

/// Squared distance of `f2` from the line spanned by `f1`:
/// `Gamma(f1, f2) / Gamma(f1)`.
pub fn dist_to_line(f2: &[f64], f1: &[f64]) -> Result<f64, IdentityError> {
    let den = gram1(f1);
    if den == 0.0 {
        return Err(IdentityError::ZeroBaseVector);
    }
    Ok(gram2(f1, f2)? / den)
}

/// Closed forms for the structured matrix `D(lambda) = diag(lambda) + J`
/// (J the all-ones matrix):
/// `det D = prod(lambda) (1 + sum 1/lambda_k)` and
/// `(D^{-1} mu, mu) = (sum mu_k^2/lambda_k
///   + sum_{k<n} (mu_k - mu_n)^2/(lambda_k lambda_n)) / (1 + sum 1/lambda_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DLambda {
    pub det: f64,
    pub quadform: f64,
}

pub fn d_lambda(lambda: &[f64], mu: &[f64]) -> Result<DLambda, IdentityError> {
    if lambda.len() != mu.len() {
        return Err(IdentityError::LengthMismatch {
            left: lambda.len(),
            right: mu.len(),
        });
    }
    if lambda.iter().any(|l| *l <= 0.0) {
        return Err(IdentityError::NonPositiveLambda);
    }
    let inv_sum: f64 = lambda.iter().map(|l| 1.0 / l).sum();
    let det = lambda.iter().product::<f64>() * (1.0 + inv_sum);
    let mut num: f64 = lambda.iter().zip(mu).map(|(l, m)| m * m / l).sum();
    for k in 0..lambda.len() {
        for n in (k + 1)..lambda.len() {
            let d = mu[k] - mu[n];
            num += d * d / (lambda[k] * lambda[n]);
        }
    }
    Ok(DLambda {
        det,
        quadform: num / (1.0 + inv_sum),
    })
}

/// The approximation-criterion statistic
/// `Delta(f, g) = (Gamma(f) + Gamma(f, g)) / (Gamma(g) + 1)`.
pub fn delta_functional(f: &[f64], g: &[f64]) -> Result<f64, IdentityError> {
    Ok((gram1(f) + gram2(f, g)?) / (gram1(g) + 1.0))
}
