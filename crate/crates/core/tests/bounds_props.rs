//! Algebraic properties of the tail bounds and the discrepancy-bound
//! calculator.

use negdep_qmc::bounds::{
    bernstein_tail, bound_at_confidence, chaining_depth, derive_constants, hoeffding_tail,
    inverse_discrepancy_bound, min_coefficient, success_probability, BoundConstants, TailQuery,
};
use proptest::prelude::*;

#[test]
fn minimal_coefficient_has_positive_exponent() {
    for k in [BoundConstants::published(), BoundConstants::full()] {
        for rho in [0.0, 1.0, 2.0] {
            let c = min_coefficient(rho, &k).unwrap();
            for d in 1..=100 {
                assert_eq!(success_probability(c - 1e-6, d, rho, &k).unwrap(), 0.0);
                assert!(success_probability(c + 1e-6, d, rho, &k).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn confidence_level_round_trip() {
    // coeff_exp · coeff_conf² = 1 when nothing is rounded, so the level
    // reached with probability q maps back to success probability q.
    let k = BoundConstants::full();
    assert!((k.coeff_exp * k.coeff_conf * k.coeff_conf - 1.0).abs() < 1e-14);
    for q in [0.5, 0.9, 0.99] {
        for (n, d, rho) in [(64, 1, 0.0), (128, 3, 1.0), (1000, 10, 0.5)] {
            let level = bound_at_confidence(n, d, rho, q, &k).unwrap();
            let c = level / (d as f64 / n as f64).sqrt();
            let p = success_probability(c, d, rho, &k).unwrap();
            assert!((p - q).abs() < 1e-9, "q={q} n={n} d={d}: {p}");
        }
    }
}

#[test]
fn bernstein_wins_for_small_variance() {
    let q = TailQuery::new(100, 1.0, 5.0).with_sigma2(0.01);
    assert!(bernstein_tail(&q) < hoeffding_tail(&q));
    let q = TailQuery::new(100, 1.0, 5.0).with_sigma2(0.25);
    assert!(bernstein_tail(&q) > hoeffding_tail(&q));
}

#[test]
fn hoeffding_example() {
    let q = TailQuery::new(100, 1.0, 10.0);
    assert!((hoeffding_tail(&q) - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    assert!((hoeffding_tail(&q) - 0.27067).abs() < 1e-5);
}

#[test]
fn constants_chain_identities() {
    let k = derive_constants(13, 0.0887).unwrap();
    assert!((k.c1 * k.c1 - 4.0 * k.tau_mu * (1.0 + 1.0 / (3.0 * k.c_mu))).abs() < 1e-14);
    assert!((k.coeff_exp * k.amplification * k.amplification - 2.0).abs() < 1e-14);
    assert!((k.coeff_off - (k.mu as f64 - k.sigma_const)).abs() < 1e-14);
    assert!(derive_constants(1, 0.0887).is_err());
    assert!(derive_constants(13, 0.0).is_err());
}

#[test]
fn inverse_bound_scales_with_dimension() {
    let k = BoundConstants::published();
    let base = inverse_discrepancy_bound(0.05, 1, 0.0, &k).unwrap();
    let ten = inverse_discrepancy_bound(0.05, 10, 0.0, &k).unwrap();
    assert!(ten >= 10 * base - 10 && ten <= 10 * base);
    assert!(inverse_discrepancy_bound(0.05, 10, 1.0, &k).unwrap() > ten);
}

proptest! {
    #[test]
    fn tails_decrease_in_t_and_grow_with_gamma(
        n in 1usize..500, t in 0.1f64..50.0, dt in 0.01f64..10.0, gamma in 1.0f64..20.0, sigma2 in 0.0f64..0.25,
    ) {
        let q = TailQuery::new(n, gamma, t).with_sigma2(sigma2);
        let further = TailQuery::new(n, gamma, t + dt).with_sigma2(sigma2);
        let stronger = TailQuery::new(n, gamma * 2.0, t).with_sigma2(sigma2);
        prop_assert!(hoeffding_tail(&further) <= hoeffding_tail(&q));
        prop_assert!(bernstein_tail(&further) <= bernstein_tail(&q));
        prop_assert!((hoeffding_tail(&stronger) - 2.0 * hoeffding_tail(&q)).abs() <= 1e-12 * hoeffding_tail(&stronger));
        prop_assert!(bernstein_tail(&q) > 0.0);
    }

    #[test]
    fn success_probability_is_monotone(c in 2.0f64..6.0, dc in 0.0f64..1.0, d in 1usize..50, rho in 0.0f64..3.0) {
        let k = BoundConstants::published();
        let p = success_probability(c, d, rho, &k).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(success_probability(c + dc, d, rho, &k).unwrap() >= p);
        prop_assert!(success_probability(c, d, rho + 0.5, &k).unwrap() <= p);
    }

    #[test]
    fn confidence_level_grows_with_q(n in 1usize..10_000, d in 1usize..20, q in 0.01f64..0.98, rho in 0.0f64..2.0) {
        let k = BoundConstants::published();
        let a = bound_at_confidence(n, d, rho, q, &k).unwrap();
        let b = bound_at_confidence(n, d, rho, q + 0.01, &k).unwrap();
        prop_assert!(b > a);
        prop_assert!(bound_at_confidence(4 * n, d, rho, q, &k).unwrap() < a);
    }

    #[test]
    fn inverse_bound_decreases_in_eps(eps in 0.01f64..0.5, d in 1usize..20) {
        let k = BoundConstants::published();
        let a = inverse_discrepancy_bound(eps, d, 0.0, &k).unwrap();
        let b = inverse_discrepancy_bound(eps * 1.5, d, 0.0, &k).unwrap();
        prop_assert!(b <= a);
        // The guarantee is positive at that sample size.
        let c = eps / (d as f64 / a as f64).sqrt();
        prop_assert!(c >= min_coefficient(0.0, &k).unwrap() - 1e-12);
    }

    #[test]
    fn chaining_depth_is_at_least_mu(n in 1usize..1_000_000, d in 1usize..50, rho in 0.0f64..2.0) {
        let k = BoundConstants::published();
        let depth = chaining_depth(n, d, rho, &k).unwrap();
        prop_assert!(depth >= k.mu);
        prop_assert!(chaining_depth(n * 4, d, rho, &k).unwrap() >= depth);
    }
}
