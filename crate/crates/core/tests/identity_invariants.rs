//! Identity-engine invariants beyond the acceptance suite: the
//! principal-minor product inequality for positive definite matrices,
//! and scale robustness of the expansion identities.

mod common;

use common::{random_spd, rel_err, rng};
use koopman_core::identities::{det_i_plus_xtx, minor, MinorIndex, SquareMatrix};
use rand::Rng;

fn principal_minor(c: &SquareMatrix, set: &[usize]) -> f64 {
    if set.is_empty() {
        return 1.0;
    }
    let idx = MinorIndex::new(set.to_vec(), set.to_vec()).unwrap();
    minor(c, &idx).unwrap()
}

fn subsets(m: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << m))
        .map(|mask| (0..m).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect())
        .collect()
}

#[test]
fn principal_minor_products_dominate() {
    // for positive definite C and any index sets alpha, beta:
    // M(alpha) M(beta) >= M(alpha ∪ beta) M(alpha ∩ beta)
    let mut rng = rng(41);
    for _ in 0..200 {
        let m = rng.random_range(2..=5usize);
        let c = random_spd(&mut rng, m);
        for alpha in subsets(m) {
            for beta in subsets(m) {
                let inter: Vec<usize> = alpha
                    .iter()
                    .copied()
                    .filter(|v| beta.contains(v))
                    .collect();
                let mut union = alpha.clone();
                for v in &beta {
                    if !union.contains(v) {
                        union.push(*v);
                    }
                }
                union.sort_unstable();
                let lhs = principal_minor(&c, &alpha) * principal_minor(&c, &beta);
                let rhs = principal_minor(&c, &inter) * principal_minor(&c, &union);
                assert!(
                    lhs - rhs >= -1e-9 * lhs.abs().max(1.0),
                    "alpha {alpha:?}, beta {beta:?}: {lhs} < {rhs}"
                );
            }
        }
    }
}

#[test]
fn det_expansion_scale_robust() {
    // determinants spanning many orders of magnitude still agree with
    // the direct route under the relative tolerance
    let mut rng = rng(42);
    for scale in [1e-3, 1.0, 1e3] {
        for m in 2..=5usize {
            for _ in 0..50 {
                let x =
                    SquareMatrix::from_fn(m, |_, _| scale * rng.random_range(-2.0..2.0)).unwrap();
                let gram = x.transpose().mul(&x).unwrap();
                let mut a = gram;
                for k in 0..m {
                    a.set(k, k, a.get(k, k) + 1.0);
                }
                assert!(rel_err(det_i_plus_xtx(&x), a.det()) <= 1e-9);
            }
        }
    }
}
