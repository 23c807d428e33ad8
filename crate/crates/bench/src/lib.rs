//! Shared fixtures for the criterion benchmarks in `benches/`.

use koopman_core::identities::SquareMatrix;
use koopman_core::MeasureFamilySpec;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn engineered_spec(n_max: u32) -> MeasureFamilySpec {
    MeasureFamilySpec::parse(
        2,
        n_max,
        &["1", "exp(abs(n))"],
        &["1", "(-1)^n"],
    )
    .unwrap()
}

pub fn power_law_spec(n_max: u32) -> MeasureFamilySpec {
    MeasureFamilySpec::parse(
        2,
        n_max,
        &["1 + 1/(1+abs(n))", "(1+abs(n))^(1/2)"],
        &["1", "(-1)^n/(1+abs(n))"],
    )
    .unwrap()
}

pub fn random_matrices(seed: u64, m: usize, count: usize) -> Vec<SquareMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            loop {
                let t = SquareMatrix::from_fn(m, |_, _| rng.random_range(-2.0..2.0)).unwrap();
                if t.det().abs() > 0.05 {
                    return t;
                }
            }
        })
        .collect()
}
