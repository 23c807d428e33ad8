//! Series-level invariants: monotone traces, order-consistent
//! classification, the a/(a+b) ~ a/b equivalence, and the decomposition
//! of the tau_- condition into its rotational and mean parts.

mod common;

use common::rng;
use koopman_core::series::{
    check_sigma1_sigma2_equivalence, classify_summand, partial_sums, ClassifyPolicy, Grids,
    MeasureFamilySpec, PartialSumTrace, SeriesKind, Verdict, WindowMode,
};
use koopman_core::FamilyExpr;
use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn policy() -> ClassifyPolicy {
    ClassifyPolicy::default()
}

/// Catalog of positive, symbolically classifiable families.
fn positive_catalog() -> Vec<FamilyExpr> {
    [
        "1",
        "2",
        "0.5",
        "1 + abs(n)",
        "(1+abs(n))^2",
        "(1+abs(n))^3",
        "(1+abs(n))^(1/2)",
        "1/(1+abs(n))",
        "1/(1+abs(n))^2",
        "exp(abs(n))",
        "exp(-abs(n))",
        "exp(2*abs(n))",
        "exp(-2*abs(n))",
        "(2+alt(n))",
        "(2+alt(n)) * (1+abs(n))",
    ]
    .iter()
    .map(|s| FamilyExpr::parse(s).unwrap())
    .collect()
}

fn random_positive(rng: &mut ChaCha8Rng) -> FamilyExpr {
    let cat = positive_catalog();
    let a = cat.choose(rng).unwrap().clone();
    if rng.random_bool(0.3) {
        let b = cat.choose(rng).unwrap().clone();
        FamilyExpr::mul(a, b)
    } else {
        a
    }
}

#[test]
fn traces_are_nondecreasing() {
    let mut rng = rng(21);
    for _ in 0..100 {
        let f = FamilyExpr::sq(random_positive(&mut rng));
        let trace = PartialSumTrace::compute(&f, 512, WindowMode::TwoSided).unwrap();
        assert!(trace.min_summand >= 0.0);
        for w in trace.sums.windows(2) {
            assert!(w[1] >= w[0], "trace decreased: {:?}", trace.sums);
        }
    }
}

#[test]
fn classification_is_order_consistent() {
    // if summand A >= summand B pointwise and B diverges, A diverges
    let mut rng = rng(22);
    let p = policy();
    let mut tested = 0;
    while tested < 60 {
        let b = random_positive(&mut rng);
        let vb = classify_summand(&b, 4096, WindowMode::TwoSided, &p).unwrap();
        if vb.verdict.verdict != Verdict::Diverges {
            continue;
        }
        let c = random_positive(&mut rng);
        let a = FamilyExpr::add(b.clone(), c);
        let va = classify_summand(&a, 4096, WindowMode::TwoSided, &p).unwrap();
        assert_eq!(
            va.verdict.verdict,
            Verdict::Diverges,
            "A = B + C with divergent B classified {:?} (B = {b})",
            va.verdict.verdict
        );
        tested += 1;
    }
}

#[test]
fn ratio_equivalence_a_over_a_plus_b() {
    // sum a/(a+b) and sum a/b get identical verdicts whenever both
    // classify symbolically
    let mut rng = rng(23);
    let mut agreeing = 0;
    let mut attempts = 0;
    while agreeing < 50 && attempts < 4000 {
        attempts += 1;
        let a = random_positive(&mut rng);
        let b = random_positive(&mut rng);
        let direct = FamilyExpr::div(a.clone(), b.clone());
        let damped = FamilyExpr::div(a.clone(), FamilyExpr::add(a.clone(), b.clone()));
        let v1 = koopman_core::series::classify_symbolic(&direct, WindowMode::TwoSided);
        let v2 = koopman_core::series::classify_symbolic(&damped, WindowMode::TwoSided);
        if let (Some(v1), Some(v2)) = (v1, v2) {
            assert_eq!(
                v1.verdict, v2.verdict,
                "a = {a}, b = {b}: {:?} vs {:?}",
                v1.verdict, v2.verdict
            );
            agreeing += 1;
        }
    }
    assert!(agreeing >= 50, "only {agreeing} symbolically classifiable pairs");
}

#[test]
fn tau_minus_condition_decomposes() {
    let p = policy();
    let grids = Grids::default();
    let specs = [
        MeasureFamilySpec::parse(2, 2048, &["1", "1"], &["0", "0"]).unwrap(),
        MeasureFamilySpec::parse(2, 2048, &["1", "exp(abs(n))"], &["1", "(-1)^n"]).unwrap(),
        MeasureFamilySpec::parse(2, 2048, &["1", "(1+abs(n))^2"], &["(-1)^n", "1"]).unwrap(),
        MeasureFamilySpec::parse(2, 2048, &["2", "1"], &["1/(1+abs(n))", "1"]).unwrap(),
    ];
    for spec in &specs {
        for &phi in &grids.phi {
            for &s in &grids.s {
                let combined = koopman_core::series::classify_series(
                    spec,
                    &SeriesKind::Sigma12Minus { phi, s },
                    2048,
                    &p,
                )
                .unwrap()
                .verdict;
                let sigma1 = koopman_core::series::classify_series(
                    spec,
                    &SeriesKind::Sigma1 { s },
                    2048,
                    &p,
                )
                .unwrap()
                .verdict;
                let sigma2 = koopman_core::series::classify_series(
                    spec,
                    &SeriesKind::Sigma2Minus { phi, s },
                    2048,
                    &p,
                )
                .unwrap()
                .verdict;
                if combined.verdict == Verdict::Inconclusive
                    || sigma1.verdict == Verdict::Inconclusive
                    || sigma2.verdict == Verdict::Inconclusive
                {
                    continue;
                }
                // sin^2(phi) Sigma_1 contributes only when sin(phi) != 0
                let sin2 = phi.sin().powi(2);
                let parts_diverge =
                    (sin2 > 1e-15 && sigma1.verdict == Verdict::Diverges)
                        || sigma2.verdict == Verdict::Diverges;
                assert_eq!(
                    combined.verdict == Verdict::Diverges,
                    parts_diverge,
                    "phi = {phi}, s = {s}: combined {:?}, sigma1 {:?}, sigma2 {:?}",
                    combined.verdict,
                    sigma1.verdict,
                    sigma2.verdict
                );
            }
        }
    }
}

#[test]
fn sigma_equivalence_sweep() {
    // power-law and exponential ratios, each s on the grid: the two
    // criteria always agree
    let p = policy();
    let grids = Grids::default();
    let ratios = [
        "1",
        "2",
        "16",
        "0.0625",
        "(1+abs(n))",
        "(1+abs(n))^2",
        "(1+abs(n))^(-1)",
        "(1+abs(n))^(-3)",
        "exp(abs(n))",
        "exp(-abs(n))",
        "exp(2*abs(n))",
    ];
    for ratio in ratios {
        let spec = MeasureFamilySpec::parse(2, 2048, &["1", ratio], &["0", "0"]).unwrap();
        for &s in &grids.s {
            let chk = check_sigma1_sigma2_equivalence(&spec, s, 2048, &p).unwrap();
            assert!(
                chk.agree,
                "b2/b1 = {ratio}, s = {s}: sigma1 {:?} vs sigma2 {:?}",
                chk.sigma1.verdict, chk.sigma2.verdict
            );
        }
    }
}

#[test]
fn zero_one_law_definite_on_symbolic_families() {
    // never Inconclusive on power-law / exponential family pairs
    let p = policy();
    let families = [
        "1",
        "3",
        "0.5",
        "1 + abs(n)",
        "(1+abs(n))^2",
        "(1+abs(n))^3",
        "(1+abs(n))^(1/2)",
        "1/(1+abs(n))",
        "1/(1+abs(n))^2",
        "exp(abs(n))",
        "exp(-abs(n))",
    ];
    for a in families {
        for b in families {
            let af = FamilyExpr::parse(a).unwrap();
            let bf = FamilyExpr::parse(b).unwrap();
            let (verdict, detail) =
                koopman_core::gaussian::zero_one_law(&af, &bf, 4096, &p).unwrap();
            assert_ne!(
                verdict,
                koopman_core::gaussian::ZeroOneVerdict::Inconclusive,
                "a = {a}, b = {b}: {detail:?}"
            );
        }
    }
}

#[test]
fn partial_sums_respect_window_cap() {
    let spec = MeasureFamilySpec::parse(2, 64, &["1", "1"], &["0", "0"]).unwrap();
    assert!(partial_sums(&spec, &SeriesKind::SL { k: 1, j: 2 }, 65).is_err());
    let trace = partial_sums(&spec, &SeriesKind::SL { k: 1, j: 2 }, 64).unwrap();
    assert_eq!(trace.checkpoints, vec![16, 32, 64]);
}
