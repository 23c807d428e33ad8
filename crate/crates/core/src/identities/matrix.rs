//! Dense row-major square matrices for the identity engine.
//!
//! Dimensions are capped at 8: the criteria pipelines only need m <= 2 and
//! the minor enumeration of `det(I + X^T X)` walks all 2^m x 2^m subsets.

use super::IdentityError;
use serde::Serialize;

pub const MAX_DIM: usize = 8;

/// Dense real square matrix, row-major, dimension <= 8.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, IdentityError> {
        let dim = rows.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(IdentityError::MatrixTooLarge { dim });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(IdentityError::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(IdentityError::NotFinite);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, IdentityError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(IdentityError::MatrixTooLarge { dim });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(IdentityError::NotFinite);
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 }).expect("dim checked by caller")
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self, IdentityError> {
        let d = entries.len();
        Self::from_fn(d, |i, j| if i == j { entries[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i)).unwrap()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, IdentityError> {
        if self.dim != other.dim {
            return Err(IdentityError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        Self::from_fn(d, |i, j| (0..d).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, IdentityError> {
        if v.len() != self.dim {
            return Err(IdentityError::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|k| self.get(i, k) * v[k]).sum())
            .collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, IdentityError> {
        if self.dim != other.dim {
            return Err(IdentityError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Self::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..d {
            let mut pivot_row = col;
            let mut pivot_val = a[col * d + col].abs();
            for r in (col + 1)..d {
                let v = a[r * d + col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            if pivot_val == 0.0 {
                return 0.0;
            }
            if pivot_row != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot_row * d + j);
                }
                det = -det;
            }
            let p = a[col * d + col];
            det *= p;
            for r in (col + 1)..d {
                let factor = a[r * d + col] / p;
                for j in col..d {
                    a[r * d + j] -= factor * a[col * d + j];
                }
            }
        }
        det
    }

    /// Inverse via Gauss-Jordan with partial pivoting; the singularity
    /// threshold is relative to the matrix scale.
    pub fn inverse(&self) -> Result<Self, IdentityError> {
        let d = self.dim;
        let scale = self.max_abs().max(1.0);
        let mut a = self.data.clone();
        let mut inv = SquareMatrix::identity(d).data;
        for col in 0..d {
            let mut pivot_row = col;
            let mut pivot_val = a[col * d + col].abs();
            for r in (col + 1)..d {
                let v = a[r * d + col].abs();
                if v > pivot_val {
                    pivot_val = v;
                    pivot_row = r;
                }
            }
            if pivot_val <= 1e-12 * scale {
                return Err(IdentityError::SingularMatrix);
            }
            if pivot_row != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot_row * d + j);
                    inv.swap(col * d + j, pivot_row * d + j);
                }
            }
            let p = a[col * d + col];
            for j in 0..d {
                a[col * d + j] /= p;
                inv[col * d + j] /= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let factor = a[r * d + col];
                if factor != 0.0 {
                    for j in 0..d {
                        a[r * d + j] -= factor * a[col * d + j];
                        inv[r * d + j] -= factor * inv[col * d + j];
                    }
                }
            }
        }
        Ok(SquareMatrix { dim: d, data: inv })
    }

    /// Symmetry check up to a relative tolerance.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if (self.get(i, j) - self.get(j, i)).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Cholesky test for positive definiteness (the matrix must be
    /// symmetric; returns false when a pivot fails).
    pub fn is_positive_definite(&self) -> bool {
        let d = self.dim;
        let mut l = vec![0.0f64; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k];
                }
                if i == j {
                    if s <= 0.0 {
                        return false;
                    }
                    l[i * d + i] = s.sqrt();
                } else {
                    l[i * d + j] = s / l[j * d + j];
                }
            }
        }
        true
    }
}
