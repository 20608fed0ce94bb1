//! Joint-probability oracles against each other and against the dependence
//! factors they are supposed to respect.

use std::f64::consts::E;

use negdep_qmc::discrepancy::{BoxDifference, TestSet};
use negdep_qmc::negdep::{
    check_coordinate_condition, delta_factor, dependence_report, gamma_for_boxdiff,
    independent_oracle, joint_probs, lhs1d_interval_prob, lhs1d_two_interval_prob, lhs_oracle,
    Direction, Evaluation, IntervalEvent, ReportMethod,
};
use negdep_qmc::samplers::SampleSpec;
use proptest::prelude::*;

/// Exact `P(X_1..X_ν ∈ [a,b))` for a 1-d LHS by enumerating which cells the
/// first ν points occupy: ordered ν-subsets of cells, each point uniform in
/// its cell.
fn enumerate_interval(n: usize, a: f64, b: f64, nu: usize) -> f64 {
    let overlap = |cell: usize| {
        let lo = cell as f64 / n as f64;
        let hi = (cell + 1) as f64 / n as f64;
        ((b.min(hi) - a.max(lo)).max(0.0)) * n as f64
    };
    fn walk(used: &mut Vec<bool>, left: usize, weights: &[f64]) -> (f64, f64) {
        if left == 0 {
            return (1.0, 1.0);
        }
        let (mut sum, mut count) = (0.0, 0.0);
        for c in 0..weights.len() {
            if !used[c] {
                used[c] = true;
                let (s, k) = walk(used, left - 1, weights);
                sum += weights[c] * s;
                count += k;
                used[c] = false;
            }
        }
        (sum, count)
    }
    let weights: Vec<f64> = (0..n).map(overlap).collect();
    let (sum, count) = walk(&mut vec![false; n], nu, &weights);
    sum / count
}

fn interval() -> impl Strategy<Value = (usize, f64, f64)> {
    (1usize..=7, 0.0f64..1.0, 0.0f64..1.0, 0u8..3).prop_map(|(n, x, y, mode)| {
        let (mut a, mut b) = (x.min(y), x.max(y));
        match mode {
            0 => {
                a = (a * n as f64).floor() / n as f64;
                b = (b * n as f64).floor() / n as f64;
            }
            1 => a = 0.0,
            _ => {}
        }
        (n, a, b)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn closed_form_matches_cell_enumeration((n, a, b) in interval()) {
        let ev = IntervalEvent::new(n, a, b).unwrap();
        for nu in 0..=n {
            let closed = lhs1d_interval_prob(&ev, nu).unwrap();
            let brute = enumerate_interval(n, a, b, nu);
            prop_assert!((closed - brute).abs() <= 1e-12, "nu={} {} vs {}", nu, closed, brute);
        }
    }

    #[test]
    fn joint_enumeration_matches_one_dimensional_forms((n, a, b) in interval()) {
        let n = n.min(5);
        let ev = IntervalEvent::new(n, a, b).unwrap();
        prop_assume!(b > a);
        let region = BoxDifference::new(vec![a], vec![b]).unwrap();
        let probs = joint_probs(&SampleSpec::lhs(n, 1, 0), &region, 1e6).unwrap();
        for k in 0..=n {
            let inner = lhs1d_interval_prob(&ev, k).unwrap();
            let outer = lhs1d_two_interval_prob(&ev, Direction::Outer, k, 0).unwrap();
            prop_assert!((probs.inside[k] - inner).abs() <= 1e-12);
            prop_assert!((probs.outside[k] - outer).abs() <= 1e-12);
        }
    }

    #[test]
    fn interval_probability_is_below_independent((n, a, b) in (1usize..=12, 0.0f64..1.0, 0.0f64..1.0)
        .prop_map(|(n, x, y)| (n, x.min(y), x.max(y)))) {
        let ev = IntervalEvent::new(n, a, b).unwrap();
        for nu in 0..=n {
            let p = lhs1d_interval_prob(&ev, nu).unwrap();
            prop_assert!(p <= ev.length().powi(nu as i32) * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn coordinate_condition_holds_with_delta_branch((n, a, b) in (1usize..=10, 0.0f64..1.0, 0.0f64..1.0, 0u8..3)
        .prop_map(|(n, x, y, mode)| {
            let (a, b) = (x.min(y), x.max(y));
            match mode {
                0 => (n, (a * n as f64).floor() / n as f64, (b * n as f64).floor() / n as f64),
                1 => (n, 0.0, b),
                _ => (n, a, b),
            }
        })) {
        let ev = IntervalEvent::new(n, a, b).unwrap();
        let delta = delta_factor(a, b, n);
        let verdict = check_coordinate_condition(lhs_oracle(ev), &ev, delta).unwrap();
        prop_assert!(verdict.holds, "ratio {} delta {} at {:?}", verdict.max_ratio, delta, verdict.argmax);
    }

    #[test]
    fn small_lhs_respects_product_of_deltas(n in 1usize..=4, a0 in 0usize..4, a1 in 0usize..4, w0 in 1usize..4, w1 in 1usize..4) {
        let corners = [0.0, 0.15, 0.5, 0.85, 1.0];
        let a = vec![corners[a0], corners[a1]];
        let b = vec![corners[(a0 + w0).min(4)], corners[(a1 + w1).min(4)]];
        let region = BoxDifference::new(a, b).unwrap();
        let vol = region.volume();
        prop_assume!(vol > 0.0 && vol < 1.0);
        let report = dependence_report(&SampleSpec::lhs(n, 2, 0), std::slice::from_ref(&region), Evaluation::Exact).unwrap();
        prop_assert!(report.holds);
        prop_assert_eq!(report.gamma_theorem, gamma_for_boxdiff(&region, n, 2).unwrap());
    }
}

#[test]
fn delta_factor_examples() {
    assert_eq!(delta_factor(0.3, 0.7, 10), 1.0);
    assert_eq!(delta_factor(0.0, 0.37, 10), 1.0);
    assert_eq!(delta_factor(0.25, 0.7, 10), E);
}

#[test]
fn gamma_examples() {
    let r = BoxDifference::new(vec![0.3, 0.3], vec![0.6, 0.6]).unwrap();
    assert_eq!(gamma_for_boxdiff(&r, 7, 2).unwrap(), E * E);
    assert_eq!(gamma_for_boxdiff(&r, 7, 0).unwrap(), 1.0);
    assert_eq!(gamma_for_boxdiff(&r, 7, 1).unwrap(), E);
    let anchored = BoxDifference::anchored(vec![0.5, 0.5]).unwrap();
    assert_eq!(gamma_for_boxdiff(&anchored, 4, 2).unwrap(), 1.0);
}

#[test]
fn two_interval_example() {
    // Hand enumeration: X₁ must sit in [0.75,1) (prob 1/2 · 1/2) and X₂ in
    // the other half-cell, hitting [0,0.25) with probability 1/2.
    let ev = IntervalEvent::new(2, 0.25, 0.75).unwrap();
    let p = lhs1d_two_interval_prob(&ev, Direction::Outer, 2, 1).unwrap();
    assert!((p - 0.125).abs() < 1e-15);
    assert!(p <= E * 0.25 * 0.5);
}

#[test]
fn independent_oracle_has_unit_ratio() {
    let ev = IntervalEvent::new(5, 0.13, 0.71).unwrap();
    let v = check_coordinate_condition(independent_oracle(ev), &ev, 1.0).unwrap();
    assert!((v.max_ratio - 1.0).abs() < 1e-12);
    assert!(v.holds);
}

#[test]
fn off_grid_interval_within_e() {
    let ev = IntervalEvent::new(6, 0.37, 0.81).unwrap();
    let v = check_coordinate_condition(lhs_oracle(ev), &ev, E).unwrap();
    assert!(v.holds);
    assert!(
        v.max_ratio > 1.0,
        "off-grid endpoints should exceed the independent ratio"
    );
}

fn optimality_ratio(n: usize, eps_b: f64) -> f64 {
    let ev = IntervalEvent::from_grid(n, n - 1, 0.0, n - 1, eps_b).unwrap();
    let p = lhs1d_two_interval_prob(&ev, Direction::Inner, n, 1).unwrap();
    let (l1, l2) = Direction::Inner.lengths(&ev);
    p / (l1 * l2.powi(n as i32 - 1))
}

#[test]
fn optimality_family() {
    let r = optimality_ratio(50, 0.01);
    // (50 / 49.01)^49
    assert!((r - 2.6642795379278734).abs() < 1e-12);
    let mut last = 0.0;
    for n in (5..=150).step_by(5) {
        let r = optimality_ratio(n, 0.001);
        assert!(r > last && r < E);
        last = r;
    }
    assert!(E - last < 0.02);
}

#[test]
fn monte_carlo_is_closed_form_with_unit_gamma() {
    let family = vec![
        BoxDifference::new(vec![0.15, 0.0], vec![0.85, 0.5]).unwrap(),
        BoxDifference::anchored(vec![0.5, 0.85]).unwrap(),
    ];
    let report = dependence_report(
        &SampleSpec::monte_carlo(6, 2, 0),
        &family,
        Evaluation::Exact,
    )
    .unwrap();
    assert_eq!(report.method, ReportMethod::ClosedForm);
    assert!((report.gamma_hat - 1.0).abs() < 1e-12);
}

#[test]
fn anchored_boxes_have_unit_gamma() {
    let family: Vec<_> = (1..=3)
        .map(|k| BoxDifference::anchored(vec![k as f64 / 4.0]).unwrap())
        .collect();
    let report = dependence_report(&SampleSpec::lhs(4, 1, 0), &family, Evaluation::Exact).unwrap();
    assert!(report.holds);
    assert!(report.gamma_hat <= 1.0 + 1e-12);
}

#[test]
fn monte_carlo_estimates_within_four_standard_errors() {
    let family = vec![
        BoxDifference::new(vec![0.15, 0.15], vec![0.85, 0.85]).unwrap(),
        BoxDifference::new(vec![0.5, 0.0], vec![1.0, 0.85]).unwrap(),
    ];
    let spec = SampleSpec::lhs(3, 2, 11);
    let exact = dependence_report(&spec, &family, Evaluation::Exact).unwrap();
    let trials = 20_000;
    let mc = dependence_report(&spec, &family, Evaluation::MonteCarlo { trials }).unwrap();
    for (e, m) in exact.regions.iter().zip(&mc.regions) {
        for (er, mr) in e.rows.iter().zip(&m.rows) {
            for (p, est, base) in [
                (er.p_inside, mr.p_inside, e.volume),
                (er.p_outside, mr.p_outside, 1.0 - e.volume),
            ] {
                let se = (p * (1.0 - p) / trials as f64).sqrt();
                let den = base.powi(er.k as i32);
                assert!(
                    (est / den - p / den).abs() <= 4.0 * se / den + 1e-12,
                    "k={} exact {p} estimate {est}",
                    er.k
                );
            }
        }
    }
}
