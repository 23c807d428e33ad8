//! The canonical battery and the general orthogonality test decide the
//! same question through different formulas: the battery classifies the
//! named criterion series, while `orthogonal_general` combines the
//! Hellinger-exponent route with the mean-shift series. On every grid
//! element of the GL(2) perp set their definite verdicts must coincide.

mod common;

use koopman_core::ortho::{
    canonical_battery_m2, orthogonal_general, OrthogonalityVerdict, TestElement,
};
use koopman_core::series::{
    classify_series, ClassifyPolicy, Grids, MeasureFamilySpec, SeriesKind, Verdict,
};

fn policy() -> ClassifyPolicy {
    ClassifyPolicy::default()
}

fn specs() -> Vec<MeasureFamilySpec> {
    [
        ("1", "1", "0", "0"),
        ("1", "1", "1", "(-1)^n"),
        ("1", "exp(abs(n))", "1", "(-1)^n"),
        ("1", "exp(abs(n))", "1", "1"),
        ("1", "(1+abs(n))^2", "(-1)^n", "1"),
        ("2", "0.5", "1/(1+abs(n))", "2"),
        ("1", "(2 + (-1)^n)", "1", "0"),
    ]
    .iter()
    .map(|(b1, b2, a1, a2)| MeasureFamilySpec::parse(2, 2048, &[b1, b2], &[a1, a2]).unwrap())
    .collect()
}

fn verdict_of_series(spec: &MeasureFamilySpec, kind: &SeriesKind) -> Verdict {
    classify_series(spec, kind, 2048, &policy()).unwrap().verdict.verdict
}

fn general_verdict(spec: &MeasureFamilySpec, elem: &TestElement) -> OrthogonalityVerdict {
    orthogonal_general(spec, &elem.matrix, 2048, &policy())
        .unwrap()
        .verdict
}

fn agree(series: Verdict, general: OrthogonalityVerdict, context: &str) {
    match (series, general) {
        (Verdict::Diverges, OrthogonalityVerdict::Orthogonal)
        | (Verdict::Converges, OrthogonalityVerdict::Equivalent) => {}
        (Verdict::Inconclusive, _) | (_, OrthogonalityVerdict::Inconclusive) => {}
        other => panic!("{context}: {other:?}"),
    }
}

#[test]
fn shear_conditions_match_general_route() {
    let grids = Grids::default();
    for spec in specs() {
        for &t in grids.t.iter().filter(|t| **t != 0.0) {
            // exp(t E_12): the series S^L_12 decides every t != 0
            let series = verdict_of_series(&spec, &SeriesKind::SL { k: 1, j: 2 });
            let general = general_verdict(&spec, &TestElement::e12(t));
            agree(series, general, &format!("E12(t={t})"));

            let series = verdict_of_series(&spec, &SeriesKind::SL { k: 2, j: 1 });
            let general = general_verdict(&spec, &TestElement::e21(t));
            agree(series, general, &format!("E21(t={t})"));
        }
    }
}

#[test]
fn reflected_shear_conditions_match_general_route() {
    let grids = Grids::default();
    for spec in specs() {
        for &t in &grids.t {
            let series = verdict_of_series(&spec, &SeriesKind::SLminus { k: 1, j: 2, t });
            let general = general_verdict(&spec, &TestElement::e12_p1(t));
            agree(series, general, &format!("E12P1(t={t})"));

            let series = verdict_of_series(&spec, &SeriesKind::SLminus { k: 2, j: 1, t });
            let general = general_verdict(&spec, &TestElement::e21_p2(t));
            agree(series, general, &format!("E21P2(t={t})"));
        }
    }
}

#[test]
fn tau_minus_condition_matches_general_route() {
    let grids = Grids::default();
    for spec in specs() {
        for &phi in &grids.phi {
            for &s in &grids.s {
                let series =
                    verdict_of_series(&spec, &SeriesKind::Sigma12Minus { phi, s });
                let general = general_verdict(&spec, &TestElement::tau_minus(phi, s));
                agree(series, general, &format!("tau_-(phi={phi:.4}, s={s})"));
            }
        }
    }
}

#[test]
fn battery_failure_witnesses_are_equivalent_translates() {
    // whenever the battery reports a failing parameter, the translate at
    // that parameter must itself test Equivalent
    let grids = Grids::default();
    let p = policy();
    for spec in specs() {
        let battery = canonical_battery_m2(&spec, 2048, &grids, &p).unwrap();
        for cond in &battery.conditions {
            let Some(witness) = &cond.witness else {
                continue;
            };
            let elem = match (cond.name.as_str(), witness.as_str()) {
                (_, "all t") => continue,
                (name, w) if name.starts_with("S^{L,-}_12") => {
                    TestElement::e12_p1(w.trim_start_matches("t=").parse().unwrap())
                }
                (name, w) if name.starts_with("S^{L,-}_21") => {
                    TestElement::e21_p2(w.trim_start_matches("t=").parse().unwrap())
                }
                (name, w) if name.starts_with("Sigma") => {
                    let parts: Vec<f64> = w
                        .split(',')
                        .map(|kv| kv.split('=').nth(1).unwrap().parse().unwrap())
                        .collect();
                    TestElement::tau_minus(parts[0], parts[1])
                }
                _ => continue,
            };
            // identity-like parameters are not translates at all
            if elem.matrix.det().abs() > 1e-9
                && !matrix_is_identity(&elem.matrix)
            {
                let general = general_verdict(&spec, &elem);
                assert_ne!(
                    general,
                    OrthogonalityVerdict::Orthogonal,
                    "{}: witness {witness} tested orthogonal",
                    cond.name
                );
            }
        }
    }
}

fn matrix_is_identity(m: &koopman_core::SquareMatrix) -> bool {
    (0..m.dim()).all(|i| {
        (0..m.dim()).all(|j| {
            let expect = if i == j { 1.0 } else { 0.0 };
            (m.get(i, j) - expect).abs() <= 1e-12
        })
    })
}
