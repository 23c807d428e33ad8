//! Shared test oracles: Gauss-Hermite quadrature for Hellinger integrals
//! and density normalization, plus seeded random matrix helpers.
//!
//! The quadrature never uses the closed forms it is checking: integrands
//! are evaluated as pointwise products of the two density functions.

#![allow(dead_code)]

use koopman_core::identities::SquareMatrix;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gauss-Hermite nodes and weights (weight e^{-x^2}) via the symmetric
/// tridiagonal Jacobi matrix: nodes are its eigenvalues, weights are
/// sqrt(pi) times the squared first eigenvector components.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            (
                eig.eigenvalues[i],
                std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2),
            )
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Centered Gaussian density with full precision matrix:
/// `sqrt(det P / pi^m) exp(-(P x, x))`.
pub fn density_full(p: &SquareMatrix, x: &[f64]) -> f64 {
    let m = p.dim();
    let px = p.mul_vec(x).unwrap();
    let quad: f64 = px.iter().zip(x).map(|(u, v)| u * v).sum();
    (p.det() / std::f64::consts::PI.powi(m as i32)).sqrt() * (-quad).exp()
}

/// Tensor Gauss-Hermite quadrature over R^m (m <= 2, 64 nodes per axis)
/// adapted to a reference precision matrix: the grid is rotated to the
/// principal axes of `adapt` and scaled by its eigenvalues, so strongly
/// correlated integrands stay resolvable. The integrand itself is
/// evaluated at genuine points of R^m.
pub fn quad_adapted(
    adapt: &SquareMatrix,
    center: &[f64],
    integrand: impl Fn(&[f64]) -> f64,
) -> f64 {
    let m = adapt.dim();
    let dm = DMatrix::from_fn(m, m, |i, j| adapt.get(i, j));
    let eig = SymmetricEigen::new(dm);
    let scale: Vec<f64> = (0..m).map(|k| 1.0 / eig.eigenvalues[k].sqrt()).collect();
    let jacobian: f64 = scale.iter().product();
    let (nodes, weights) = gauss_hermite(64);
    let point = |y: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| {
                center[i]
                    + (0..m)
                        .map(|k| eig.eigenvectors[(i, k)] * scale[k] * y[k])
                        .sum::<f64>()
            })
            .collect()
    };
    match m {
        1 => {
            let mut total = 0.0;
            for (y, w) in nodes.iter().zip(&weights) {
                total += w * integrand(&point(&[*y])) * (y * y).exp();
            }
            total * jacobian
        }
        2 => {
            let mut total = 0.0;
            for (y1, w1) in nodes.iter().zip(&weights) {
                for (y2, w2) in nodes.iter().zip(&weights) {
                    let x = point(&[*y1, *y2]);
                    total += w1 * w2 * integrand(&x) * (y1 * y1 + y2 * y2).exp();
                }
            }
            total * jacobian
        }
        _ => panic!("tensor quadrature supports m <= 2"),
    }
}

/// Independent Hellinger integral of two centered Gaussians by tensor
/// quadrature of `sqrt(p_B p_C)`.
pub fn hellinger_quadrature(b: &SquareMatrix, c: &SquareMatrix) -> f64 {
    let m = b.dim();
    let mid = b.add(c).unwrap().scale(0.5);
    let center = vec![0.0; m];
    quad_adapted(&mid, &center, |x| {
        (density_full(b, x) * density_full(c, x)).sqrt()
    })
}

/// Random symmetric positive definite matrix with eigenvalues in a
/// moderate range.
pub fn random_spd(rng: &mut ChaCha8Rng, m: usize) -> SquareMatrix {
    let a = SquareMatrix::from_fn(m, |_, _| rng.random_range(-1.0..1.0)).unwrap();
    let mut g = a.transpose().mul(&a).unwrap();
    for k in 0..m {
        g.set(k, k, g.get(k, k) + 0.4);
    }
    g
}

/// Random invertible matrix (determinant bounded away from zero).
pub fn random_invertible(rng: &mut ChaCha8Rng, m: usize) -> SquareMatrix {
    loop {
        let t = SquareMatrix::from_fn(m, |_, _| rng.random_range(-2.0..2.0)).unwrap();
        if t.det().abs() > 0.05 {
            return t;
        }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
