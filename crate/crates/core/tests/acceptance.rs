//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (run with `--nocapture` to see them all).

mod common;

use common::{hellinger_quadrature, random_invertible, random_spd, rel_err, rng};
use koopman_core::gaussian::{hellinger_left_action, hellinger_pair};
use koopman_core::identities::{
    self, d_lambda, delta_functional, det_i_plus_xtx, f_lambda, f_lambda_expansion, gram2,
    lagrange_gram2, minor, MinorIndex, SquareMatrix,
};
use koopman_core::irred::{
    self, irreducibility_verdict, projection_growth_check, ApproximablePair, IrredVerdict,
    SplitCase, TableICase, TableIICase,
};
use koopman_core::ortho::{
    canonical_battery_m1, centered_exponent_via_minors, exponent_m2, OrthogonalityVerdict,
};
use koopman_core::series::{
    check_sigma1_sigma2_equivalence, classify_summand, classify_series, ClassifyPolicy, Grids,
    MeasureFamilySpec, Method, SeriesKind, Verdict, WindowMode,
};
use koopman_core::FamilyExpr;
use rand::prelude::IndexedRandom;
use rand::Rng;
use std::time::Instant;

fn policy() -> ClassifyPolicy {
    ClassifyPolicy::default()
}

fn spec2(b1: &str, b2: &str, a1: &str, a2: &str) -> MeasureFamilySpec {
    MeasureFamilySpec::parse(2, 4096, &[b1, b2], &[a1, a2]).unwrap()
}

#[test]
fn criterion_1_identity_suite() {
    let start = Instant::now();
    let mut rng = rng(101);
    let tol = 1e-9;

    // det(I + X^T X) minor expansion and F_lambda expansion, 500 per m
    for m in 2..=5usize {
        for _ in 0..500 {
            let x = SquareMatrix::from_fn(m, |_, _| rng.random_range(-2.0..2.0)).unwrap();
            let gram_mat = x.transpose().mul(&x).unwrap();
            let mut a = gram_mat.clone();
            for k in 0..m {
                a.set(k, k, a.get(k, k) + 1.0);
            }
            let direct = a.det();
            assert!(rel_err(det_i_plus_xtx(&x), direct) <= tol);

            let lambda: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..3.0)).collect();
            let expansion = f_lambda_expansion(&x, &lambda).unwrap();
            let direct = f_lambda(&x, &lambda).unwrap();
            assert!(rel_err(expansion, direct) <= tol);
        }
    }

    // Gram of every row subset = sum of squared minors over column subsets
    let mut gram_instances = 0;
    for _ in 0..40 {
        let x = SquareMatrix::from_fn(4, |_, _| rng.random_range(-2.0..2.0)).unwrap();
        for mask in 1u32..16 {
            let rows: Vec<usize> = (0..4).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect();
            let r = rows.len();
            let mut total = 0.0;
            for cmask in 1u32..16 {
                let cols: Vec<usize> =
                    (0..4).filter(|k| cmask >> k & 1 == 1).map(|k| k + 1).collect();
                if cols.len() != r {
                    continue;
                }
                let v = minor(&x, &MinorIndex::new(rows.clone(), cols).unwrap()).unwrap();
                total += v * v;
            }
            assert!(rel_err(identities::gram_of_rows(&x, &rows).unwrap(), total) <= tol);
            gram_instances += 1;
        }
    }
    assert!(gram_instances >= 500);

    // Lagrange identity, d <= 64
    for _ in 0..1000 {
        let d = rng.random_range(2..=64usize);
        let f: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(rel_err(lagrange_gram2(&f, &g).unwrap(), gram2(&f, &g).unwrap()) <= 1e-12);
    }

    // D(lambda) determinant and quadratic form vs dense LU, m <= 6
    for _ in 0..500 {
        let m = rng.random_range(1..=6usize);
        let lambda: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..4.0)).collect();
        let mu: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..2.0)).collect();
        let closed = d_lambda(&lambda, &mu).unwrap();
        let dense = nalgebra::DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                1.0 + lambda[i]
            } else {
                1.0
            }
        });
        assert!(rel_err(closed.det, dense.determinant()) <= tol);
        let lu = dense.lu();
        let rhs = nalgebra::DVector::from_vec(mu.clone());
        let x = lu.solve(&rhs).unwrap();
        assert!(rel_err(closed.quadform, x.dot(&rhs)) <= tol);

        // Delta correspondence: f_k = mu_k/sqrt(lambda_k), g_k = 1/sqrt(lambda_k)
        let f: Vec<f64> = mu.iter().zip(&lambda).map(|(m, l)| m / l.sqrt()).collect();
        let g: Vec<f64> = lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
        assert!(rel_err(delta_functional(&f, &g).unwrap(), closed.quadform) <= 1e-10);
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "identity suite took {elapsed:?}");
    println!("[PASS] criterion 1: identity suites at rel tol 1e-9 in {elapsed:.2?}");
}

#[test]
fn criterion_2_hellinger_cross_validation() {
    let mut rng = rng(102);
    // closed forms vs Gauss-Hermite quadrature, abs tol 1e-6
    for _ in 0..50 {
        for m in [1usize, 2] {
            let b = random_spd(&mut rng, m);
            let c = random_spd(&mut rng, m);
            let closed = hellinger_pair(&b, &c).unwrap();
            let quad = hellinger_quadrature(&b, &c);
            assert!((closed - quad).abs() <= 1e-6, "m={m}: {closed} vs {quad}");
        }
    }
    // left action = pair on the pushed precision, rel tol 1e-10
    for _ in 0..500 {
        let m = rng.random_range(1..=4usize);
        let bdiag: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..4.0)).collect();
        let t = random_invertible(&mut rng, m);
        let via_action = hellinger_left_action(&bdiag, &t).unwrap();
        let b = SquareMatrix::diagonal(&bdiag).unwrap();
        let pushed = t.transpose().mul(&b).unwrap().mul(&t).unwrap();
        let via_pair = hellinger_pair(&pushed, &b).unwrap();
        assert!(rel_err(via_action, via_pair) <= 1e-10);
    }
    println!("[PASS] criterion 2: Hellinger closed forms vs quadrature (1e-6) and route agreement (1e-10)");
}

#[test]
fn criterion_3_m2_exponent_agreement() {
    let mut rng = rng(103);
    let mut pos = 0;
    let mut neg = 0;
    while pos < 250 || neg < 250 {
        let t = random_invertible(&mut rng, 2);
        let det = t.det();
        if det > 0.0 && pos >= 250 {
            continue;
        }
        if det < 0.0 && neg >= 250 {
            continue;
        }
        let b1 = rng.random_range(0.1..5.0);
        let b2 = rng.random_range(0.1..5.0);
        let spec = MeasureFamilySpec::new(
            2,
            16,
            vec![FamilyExpr::num(b1), FamilyExpr::num(b2)],
            vec![FamilyExpr::num(0.0), FamilyExpr::num(0.0)],
        )
        .unwrap();
        let closed = exponent_m2(&spec, &t, 0).unwrap();
        let minors = centered_exponent_via_minors(&spec, &t, 0).unwrap();
        assert!(
            rel_err(closed, minors) <= 1e-10,
            "det {det}: closed {closed} vs minors {minors}"
        );
        if det > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    println!("[PASS] criterion 3: exponent closed form = minor expansion on 500 instances (both det signs)");
}

#[test]
fn criterion_4_verdict_reproduction() {
    let grids = Grids::default();
    let p = policy();

    let assert_all_symbolic = |report: &koopman_core::ortho::OrthogonalityReport| {
        for cond in &report.conditions {
            assert_ne!(
                cond.verdict,
                OrthogonalityVerdict::Inconclusive,
                "inconclusive condition {}",
                cond.name
            );
            for (label, v) in &cond.series {
                assert_eq!(
                    v.method,
                    Method::Symbolic,
                    "numeric classification leaked into {} at {label}",
                    cond.name
                );
                assert_ne!(v.verdict, Verdict::Inconclusive);
            }
        }
    };

    // (a) m=2, b = 1, a = 0 -> NotIrreducible
    let start = Instant::now();
    let spec_a = spec2("1", "1", "0", "0");
    let ra = irreducibility_verdict(&spec_a, 4096, &grids, &p).unwrap();
    assert_eq!(ra.verdict, IrredVerdict::NotIrreducible);
    assert_all_symbolic(&ra.orthogonality);
    assert!(start.elapsed().as_secs_f64() < 5.0);

    // (b) m=1, b = 1, a = 1 -> battery Orthogonal
    let start = Instant::now();
    let spec_b = MeasureFamilySpec::parse(1, 4096, &["1"], &["1"]).unwrap();
    let rb = canonical_battery_m1(&spec_b, 4096, &p).unwrap();
    assert_eq!(rb.overall, OrthogonalityVerdict::Orthogonal);
    assert_all_symbolic(&rb);
    assert!(start.elapsed().as_secs_f64() < 5.0);

    // (c) b1 = 1, b2 = exp|n|, a1 = 1, a2 = (-1)^n -> Irreducible, table I case 1
    let start = Instant::now();
    let spec_c = spec2("1", "exp(abs(n))", "1", "(-1)^n");
    let rc = irreducibility_verdict(&spec_c, 4096, &grids, &p).unwrap();
    assert_eq!(rc.verdict, IrredVerdict::Irreducible);
    assert_all_symbolic(&rc.orthogonality);
    let case = rc.case.unwrap();
    assert_eq!(case.table_i, Some(TableICase::One));
    assert_eq!(case.approximable, ApproximablePair::D1D2);
    assert!(start.elapsed().as_secs_f64() < 5.0);

    // (d) same with a2 = 1: condition (c) fails at t = 2 -> NotIrreducible
    let start = Instant::now();
    let spec_d = spec2("1", "exp(abs(n))", "1", "1");
    let rd = irreducibility_verdict(&spec_d, 4096, &grids, &p).unwrap();
    assert_eq!(rd.verdict, IrredVerdict::NotIrreducible);
    assert_all_symbolic(&rd.orthogonality);
    let cond_c = &rd.orthogonality.conditions[2];
    assert_eq!(cond_c.name, "S^{L,-}_12(t)");
    assert_eq!(cond_c.verdict, OrthogonalityVerdict::Equivalent);
    assert_eq!(cond_c.witness.as_deref(), Some("t=2"));
    assert!(start.elapsed().as_secs_f64() < 5.0);

    println!("[PASS] criterion 4: engineered-family verdicts reproduced symbolically (< 5 s each)");
}

#[test]
fn criterion_5_equivalence_suite() {
    let p = policy();
    // 30 symbolic families spanning power-law and exponential ratios
    let ratios = [
        "2", "0.5", "16", "0.0625", "1",
        "(1+abs(n))", "(1+abs(n))^2", "(1+abs(n))^3", "(1+abs(n))^4",
        "(1+abs(n))^(1/2)", "(1+abs(n))^(-1)", "(1+abs(n))^(-2)",
        "(1+abs(n))^(-3)", "(1+abs(n))^(-1/2)",
        "exp(abs(n))", "exp(-abs(n))", "exp(2*abs(n))", "exp(-2*abs(n))",
        "2*(1+abs(n))", "0.5/(1+abs(n))", "3*exp(abs(n))",
        "(1+abs(n)) * exp(abs(n))", "4", "0.25", "(1+abs(n))^6",
        "(1+abs(n))^(-6)", "exp(abs(n)/2)", "exp(-abs(n)/2)",
        "8*(1+abs(n))^2", "exp(3*abs(n))",
    ];
    assert_eq!(ratios.len(), 30);
    let s_values = [0.5, 1.0, 2.0];
    for (i, ratio) in ratios.iter().enumerate() {
        let spec = spec2("1", ratio, "0", "0");
        let s = s_values[i % s_values.len()];
        let chk = check_sigma1_sigma2_equivalence(&spec, s, 4096, &p).unwrap();
        assert!(
            chk.agree,
            "ratio {ratio}, s = {s}: {:?} vs {:?}",
            chk.sigma1.verdict, chk.sigma2.verdict
        );
        assert_ne!(chk.sigma1.verdict, Verdict::Inconclusive);
    }

    // divergent-Sigma_1 families: f^1 - C g^1 and f^2 - C g^2 norms blow up
    let grids = Grids::default();
    let park_ratios = [
        "(1+abs(n))", "(1+abs(n))^2", "(1+abs(n))^3", "(1+abs(n))^(1/2)",
        "(1+abs(n))^(-1)", "(1+abs(n))^(-2)", "(1+abs(n))^(-3)",
        "exp(abs(n))", "exp(-abs(n))", "exp(2*abs(n))",
    ];
    assert_eq!(park_ratios.len(), 10);
    for ratio in park_ratios {
        let spec = spec2("1", ratio, "0", "0");
        for &s in &grids.s {
            let v = classify_series(&spec, &SeriesKind::Sigma1 { s }, 4096, &p)
                .unwrap()
                .verdict;
            assert_eq!(v.verdict, Verdict::Diverges, "Sigma_1({s}) for {ratio}");
            assert_eq!(v.method, Method::Symbolic);
        }
        let b1 = spec.b_row(1).clone();
        let b2 = spec.b_row(2).clone();
        use FamilyExpr as F;
        let denom1 = F::add(F::sq(b1.clone()), F::mul(F::num(2.0), F::mul(b1.clone(), b2.clone())));
        let denom2 = F::add(F::sq(b2.clone()), F::mul(F::num(2.0), F::mul(b1.clone(), b2.clone())));
        for &c in &grids.s {
            // ||f^1 - C g^1||^2 summand: (b1 - C b2)^2 / (b1^2 + 2 b1 b2)
            let s1 = F::div(
                F::sq(F::sub(b1.clone(), F::mul(F::num(c), b2.clone()))),
                denom1.clone(),
            );
            let v1 = classify_summand(&s1, 4096, WindowMode::TwoSided, &p).unwrap();
            assert_eq!(
                v1.verdict.verdict,
                Verdict::Diverges,
                "||f1 - {c} g1||^2 for {ratio}"
            );
            let s2 = F::div(
                F::sq(F::sub(b2.clone(), F::mul(F::num(c), b1.clone()))),
                denom2.clone(),
            );
            let v2 = classify_summand(&s2, 4096, WindowMode::TwoSided, &p).unwrap();
            assert_eq!(
                v2.verdict.verdict,
                Verdict::Diverges,
                "||f2 - {c} g2||^2 for {ratio}"
            );
        }
    }

    // convergent-Sigma_1 families with divergent Sigma_2: all grid
    // combinations ||C1 f + C2 g||^2 diverge
    let the_last_cases: [(&str, &str, &str); 10] = [
        ("1", "1", "(-1)^n"),
        ("1", "(-1)^n", "1"),
        ("1", "1", "2 + (-1)^n"),
        ("1", "2 + (-1)^n", "(-1)^n"),
        ("1", "1", "3"),
        ("2", "1", "(-1)^n"),
        ("1 + 1/(1+abs(n))", "1", "(-1)^n"),
        ("1", "2", "(-1)^n"),
        ("0.5", "(-1)^n", "2"),
        ("1", "1 + (-1)^n/2", "1 - (-1)^n/2"),
    ];
    for (b, a1, a2) in the_last_cases {
        let spec = spec2(b, b, a1, a2);
        let sigma1 = classify_series(&spec, &SeriesKind::Sigma1 { s: 1.0 }, 4096, &p)
            .unwrap()
            .verdict;
        assert_eq!(sigma1.verdict, Verdict::Converges, "Sigma_1(1) for b = {b}");
        for &(c1, c2) in &grids.c {
            let v2 = classify_series(&spec, &SeriesKind::Sigma2C { c1, c2 }, 4096, &p)
                .unwrap()
                .verdict;
            assert_eq!(
                v2.verdict,
                Verdict::Diverges,
                "Sigma_2({c1},{c2}) for ({b},{a1},{a2})"
            );
            // the-last: the corresponding norm combination diverges too
            use FamilyExpr as F;
            let weight = F::add(
                F::recip(F::mul(F::num(2.0), spec.b_row(1).clone())),
                F::recip(F::mul(F::num(2.0), spec.b_row(2).clone())),
            );
            let combo = F::div(
                F::sq(F::add(
                    F::mul(F::num(c1), spec.a_row(1).clone()),
                    F::mul(F::num(c2), spec.a_row(2).clone()),
                )),
                weight,
            );
            let vn = classify_summand(&combo, 4096, WindowMode::TwoSided, &p).unwrap();
            assert_eq!(
                vn.verdict.verdict,
                Verdict::Diverges,
                "||{c1} f + {c2} g||^2 for ({b},{a1},{a2})"
            );
        }
    }

    println!("[PASS] criterion 5: sigma-criteria equivalence on 30 families; divergence/convergence side conditions on 10 + 10");
}

#[test]
fn criterion_6_projection_growth() {
    let grids = Grids::default();
    let p = policy();
    let pairs = [
        ("1", "(-1)^n"),
        ("(-1)^n", "1"),
        ("1", "1 + (-1)^n/2"),
        ("2 + (-1)^n", "(-1)^n"),
        ("1", "2*(-1)^n"),
    ];
    for (f_text, g_text) in pairs {
        let f = FamilyExpr::parse(f_text).unwrap();
        let g = FamilyExpr::parse(g_text).unwrap();
        let report = projection_growth_check(&f, &g, 4096, &grids, &p).unwrap();
        assert_eq!(report.checkpoints.first(), Some(&16));
        assert_eq!(report.checkpoints.last(), Some(&4096));
        assert!(
            report.exceeds_10x,
            "({f_text}, {g_text}): growth factor {}",
            report.growth_factor
        );
    }
    println!("[PASS] criterion 6: Gram ratio at n = 4096 exceeds 10x its value at n = 16 on 5 families");
}

#[test]
fn criterion_7_commutant_lab_numbers() {
    use koopman_core::commlab::*;
    let start = Instant::now();

    let coset = s3_coset_example().unwrap();
    assert!(coset.involutions_ok && coset.braid_ok);
    assert!(coset.invariant_vector_ok);
    assert_eq!(coset.commutant_dim, 2);
    assert_eq!(coset.permutation_centralizer_size, 1);

    for (table, order) in [
        (cyclic_group_table(2), 2usize),
        (cyclic_group_table(4), 4),
        (s3_group_table(), 6),
    ] {
        let r = dixmier_check(&table).unwrap();
        assert_eq!(r.right_commutant_dim, order);
        assert_eq!(r.left_span_dim, order);
        assert!(r.left_inside_commutant && r.dims_match);
    }

    for (m, n, expect) in [(2usize, 2usize, 2usize), (2, 3, 5), (3, 2, 2)] {
        let r = schur_weyl_check(m, n).unwrap();
        assert_eq!(r.perm_span_dim, expect, "perm span for ({m},{n})");
        assert_eq!(r.gl_commutant_dim, expect, "GL commutant for ({m},{n})");
        assert!(r.mutual_commutants_ok);
        assert!(r.span_stable);
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "commutant lab took {elapsed:?}");
    println!("[PASS] criterion 7: commutant laboratory exact numbers in {elapsed:.2?}");
}

#[test]
fn criterion_8_unrealizability_guard() {
    let grids = Grids::default();
    let p = policy();
    let mut rng = rng(108);
    let b_catalog = [
        "1", "2", "0.5", "1 + abs(n)", "(1+abs(n))^2", "1/(1+abs(n))",
        "exp(abs(n))", "exp(-abs(n))", "2 + (-1)^n",
    ];
    let a_catalog = [
        "0", "1", "2", "(-1)^n", "2 + (-1)^n", "1/(1+abs(n))",
        "(-1)^n/(1+abs(n))^2", "exp(-abs(n))", "3",
    ];
    for round in 0..200 {
        let b1 = *b_catalog.choose(&mut rng).unwrap();
        let b2 = *b_catalog.choose(&mut rng).unwrap();
        let a1 = *a_catalog.choose(&mut rng).unwrap();
        let a2 = *a_catalog.choose(&mut rng).unwrap();
        let spec = MeasureFamilySpec::parse(2, 1024, &[b1, b2], &[a1, a2]).unwrap();
        let r = irreducibility_verdict(&spec, 1024, &grids, &p).unwrap();
        if let Some(case) = &r.case {
            let forbidden = r.orthogonality.all_orthogonal
                && case.split == SplitCase::B
                && case.table_ii == Some(TableIICase::Four);
            assert!(
                !forbidden,
                "round {round}: forbidden combination emitted for ({b1},{b2},{a1},{a2})"
            );
        }
    }
    println!("[PASS] criterion 8: no (split B, table II case 4) with an all-orthogonal battery in 200 random families");
}

// criterion 9 (byte-identical CLI reports) lives in the CLI crate's
// acceptance test, next to the binary it exercises

#[test]
fn table_i_case_catalog() {
    // side coverage for the remaining table-I branches reached by the
    // acceptance families
    let grids = Grids::default();
    let p = policy();
    // case 2: Sigma^{21} converges
    let spec = spec2("exp(abs(n))", "1", "(-1)^n", "1");
    let r = irreducibility_verdict(&spec, 4096, &grids, &p).unwrap();
    assert_eq!(r.case.as_ref().unwrap().table_i, Some(TableICase::Two));
    if r.verdict == IrredVerdict::Irreducible {
        assert_eq!(r.case.unwrap().approximable, ApproximablePair::D1D2);
    }

    // case 3c with split A: both ratios diverge, Sigma_1 divergent
    let spec = spec2("1", "(2 + (-1)^n)", "1", "1");
    let r = irreducibility_verdict(&spec, 4096, &grids, &p).unwrap();
    let case = r.case.unwrap();
    assert_eq!(case.table_i, Some(TableICase::ThreeC));
    if r.orthogonality.all_orthogonal {
        assert_eq!(case.split, SplitCase::A);
        assert_eq!(case.approximable, ApproximablePair::X1X2);
    }
}

#[test]
fn irred_invariant_park_and_last_traces() {
    // delta traces behave per the divergence side conditions: with both
    // ratio series and Sigma_1 divergent (table I case 3, split A) the
    // x-approximation criteria grow
    let p = policy();
    let spec = spec2("1", "(1+abs(n))^(1/2)", "0", "0");
    let d1 = irred::criterion_delta(&spec, irred::CriterionWhich::XX1, 4096, &p).unwrap();
    let d2 = irred::criterion_delta(&spec, irred::CriterionWhich::XX2, 4096, &p).unwrap();
    assert_eq!(d1.verdict.verdict, Verdict::Diverges);
    assert_eq!(d2.verdict.verdict, Verdict::Diverges);
}
