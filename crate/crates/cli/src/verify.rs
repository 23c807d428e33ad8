//! Seeded random identity suites behind `identities-verify`.
//!
//! Each suite checks one exact identity against an independent dense
//! route on random instances: the minor expansion of `det(I + X^T X)`
//! against the direct determinant, the weighted `F_lambda` expansion, the
//! Gram-via-minors identity, the Lagrange identity, the structured
//! `D(lambda)` determinant and quadratic form against a dense inverse,
//! the Delta-functional correspondence, and positivity of the two-by-two
//! determinant of principal-minor products for positive definite
//! matrices.

use koopman_core::identities::{
    d_lambda, delta_functional, det_i_plus_xtx, f_lambda, f_lambda_expansion, gram, gram2,
    gram_of_rows, lagrange_gram2, minor, MinorIndex, SquareMatrix,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub max_rel_err: f64,
}

struct Suite {
    name: &'static str,
    instances: usize,
    failures: usize,
    max_rel_err: f64,
    tol: f64,
}

impl Suite {
    fn new(name: &'static str, tol: f64) -> Self {
        Suite {
            name,
            instances: 0,
            failures: 0,
            max_rel_err: 0.0,
            tol,
        }
    }

    fn check(&mut self, lhs: f64, rhs: f64) {
        self.instances += 1;
        let err = (lhs - rhs).abs() / rhs.abs().max(1.0);
        if err > self.max_rel_err {
            self.max_rel_err = err;
        }
        if err.is_nan() || err > self.tol {
            self.failures += 1;
        }
    }

    fn check_ge(&mut self, value: f64, floor: f64) {
        self.instances += 1;
        if value.is_nan() || value < floor {
            self.failures += 1;
            self.max_rel_err = self.max_rel_err.max((floor - value).abs());
        }
    }

    fn outcome(&self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name,
            instances: self.instances,
            failures: self.failures,
            max_rel_err: self.max_rel_err,
        }
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> SquareMatrix {
    SquareMatrix::from_fn(m, |_, _| rng.random_range(-2.0..2.0)).unwrap()
}

fn subsets_of(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let set: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect();
        out.push(set);
    }
    out
}

fn principal_minor(c: &SquareMatrix, set: &[usize]) -> f64 {
    if set.is_empty() {
        return 1.0;
    }
    let idx = MinorIndex::new(set.to_vec(), set.to_vec()).unwrap();
    minor(c, &idx).unwrap()
}

pub fn run_identity_suites(seed: u64) -> Vec<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut det_suite = Suite::new("det(I + X^T X) expansion", 1e-9);
    let mut flambda_suite = Suite::new("F_lambda expansion", 1e-9);
    let mut gram_suite = Suite::new("Gram via minors", 1e-9);
    let mut lagrange_suite = Suite::new("Lagrange identity", 1e-9);
    let mut dlambda_suite = Suite::new("D(lambda) closed forms", 1e-9);
    let mut delta_suite = Suite::new("Delta / D(lambda) match", 1e-9);
    let mut hf_suite = Suite::new("principal-minor positivity", 0.0);

    for m in 2..=5usize {
        for _ in 0..200 {
            let x = random_matrix(&mut rng, m);
            // direct determinant of I + X^T X
            let gram_mat = x.transpose().mul(&x).unwrap();
            let mut a = gram_mat.clone();
            for k in 0..m {
                a.set(k, k, a.get(k, k) + 1.0);
            }
            det_suite.check(det_i_plus_xtx(&x), a.det());

            let lambda: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..3.0)).collect();
            flambda_suite.check(
                f_lambda_expansion(&x, &lambda).unwrap(),
                f_lambda(&x, &lambda).unwrap(),
            );
        }
    }

    // Gram of row subsets vs sums of squared minors, 4x4
    for _ in 0..200 {
        let x = random_matrix(&mut rng, 4);
        for rows in subsets_of(4).into_iter().filter(|s| !s.is_empty()) {
            let r = rows.len();
            let mut total = 0.0;
            for cols in subsets_of(4).into_iter().filter(|s| s.len() == r) {
                let v = minor(&x, &MinorIndex::new(rows.clone(), cols).unwrap()).unwrap();
                total += v * v;
            }
            gram_suite.check(gram_of_rows(&x, &rows).unwrap(), total);
        }
    }

    for _ in 0..600 {
        let d = rng.random_range(2..=64usize);
        let f: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        lagrange_suite.check(lagrange_gram2(&f, &g).unwrap(), gram2(&f, &g).unwrap());
    }

    for _ in 0..600 {
        let m = rng.random_range(1..=6usize);
        let lambda: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..4.0)).collect();
        let mu: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let closed = d_lambda(&lambda, &mu).unwrap();
        // dense route
        let dm = SquareMatrix::from_fn(m, |i, j| {
            if i == j {
                1.0 + lambda[i]
            } else {
                1.0
            }
        })
        .unwrap();
        dlambda_suite.check(closed.det, dm.det());
        let inv = dm.inverse().unwrap();
        let y = inv.mul_vec(&mu).unwrap();
        let quad: f64 = y.iter().zip(&mu).map(|(a, b)| a * b).sum();
        dlambda_suite.check(closed.quadform, quad);

        // Delta(f, g) with f_k = mu_k/sqrt(lambda_k), g_k = 1/sqrt(lambda_k)
        let f: Vec<f64> = mu
            .iter()
            .zip(&lambda)
            .map(|(m, l)| m / l.sqrt())
            .collect();
        let g: Vec<f64> = lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
        delta_suite.check(delta_functional(&f, &g).unwrap(), closed.quadform);
    }

    for _ in 0..200 {
        let m = rng.random_range(2..=5usize);
        let a = random_matrix(&mut rng, m);
        let mut c = a.transpose().mul(&a).unwrap();
        for k in 0..m {
            c.set(k, k, c.get(k, k) + 0.3);
        }
        for alpha in subsets_of(m) {
            for beta in subsets_of(m) {
                let inter: Vec<usize> = alpha
                    .iter()
                    .copied()
                    .filter(|v| beta.contains(v))
                    .collect();
                let mut union: Vec<usize> = alpha.clone();
                for v in &beta {
                    if !union.contains(v) {
                        union.push(*v);
                    }
                }
                union.sort_unstable();
                let det2 = principal_minor(&c, &alpha) * principal_minor(&c, &beta)
                    - principal_minor(&c, &inter) * principal_minor(&c, &union);
                // positivity up to roundoff on the product scale
                let scale = principal_minor(&c, &alpha).abs() * principal_minor(&c, &beta).abs();
                hf_suite.check_ge(det2, -1e-9 * scale.max(1.0));
            }
        }
    }

    // a couple of composite gram sanity points
    {
        let (_, det) = gram(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        gram_suite.check(det, 0.0);
    }

    vec![
        det_suite.outcome(),
        flambda_suite.outcome(),
        gram_suite.outcome(),
        lagrange_suite.outcome(),
        dlambda_suite.outcome(),
        delta_suite.outcome(),
        hf_suite.outcome(),
    ]
}
