#[path = "support/networks.rs"]
mod networks;

use ebsl::engine::{
    analytic_loop_solution, naive_sl_referral, solve_referral, solve_referral_observed,
    theta_bound, EngineConfig, GOLDEN_RATIO,
};
use ebsl::{AlgebraParams, Evidence, GFunction, Opinion, OpinionMatrix};
use rand::Rng;

fn params() -> AlgebraParams {
    AlgebraParams::default()
}

#[test]
fn every_iterate_respects_the_column_evidence_bound() {
    let mut rng = networks::rng(7);
    for _ in 0..5 {
        let a = networks::random_network(&mut rng, 20, 0.2, 1e6);
        let bounds = networks::column_evidence_bounds(&a);
        for g in [GFunction::Belief, GFunction::SqrtBelief] {
            let mut violation = None;
            let (_, report) =
                solve_referral_observed(&a, &EngineConfig::new(params(), g), |k, x| {
                    if violation.is_none() {
                        violation = networks::bound_violation(x, &bounds, 1e-6).map(|at| (k, at));
                    }
                })
                .unwrap();
            assert!(report.converged);
            assert_eq!(violation, None);
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let a = networks::random_network(&mut networks::rng(11), 40, 0.3, 1e5);
    let cfg = EngineConfig::new(params(), GFunction::SqrtBelief);
    let (r1, rep1) = solve_referral(&a, &cfg).unwrap();
    let (r2, rep2) = solve_referral(&a, &cfg).unwrap();
    assert_eq!(rep1, rep2);
    for (x, y) in r1.entries().iter().zip(r2.entries()) {
        assert_eq!(
            x.components().map(f64::to_bits),
            y.components().map(f64::to_bits)
        );
    }
}

#[test]
fn residuals_stay_finite_on_large_networks() {
    let a = networks::random_network(&mut networks::rng(3), 200, 0.1, 1e6);
    let cfg = EngineConfig::new(params(), GFunction::Belief).with_max_iterations(60);
    let (r, report) = solve_referral(&a, &cfg).unwrap();
    assert!(report.residual_history.iter().all(|v| v.is_finite()));
    assert!(r
        .entries()
        .iter()
        .all(|x| x.components().iter().all(|v| v.is_finite())));
}

#[test]
fn loops_match_the_closed_form() {
    let mut rng = networks::rng(5);
    for _ in 0..20 {
        let mut ev =
            || Evidence::new(rng.random_range(0.0..1e4), rng.random_range(0.0..1e4)).unwrap();
        let (e12, e23, e32) = (ev(), ev(), ev());
        let mut a = OpinionMatrix::uncertain(3);
        a.set(0, 1, Opinion::from_evidence(e12, params()));
        a.set(1, 2, Opinion::from_evidence(e23, params()));
        a.set(2, 1, Opinion::from_evidence(e32, params()));
        let theta = theta_bound(&a, params()) * 1.25;
        let cfg = EngineConfig::new(
            params(),
            GFunction::evidence_over_theta(theta, params()).unwrap(),
        );
        let (r, report) = solve_referral(&a, &cfg).unwrap();
        assert!(report.converged);
        let expected =
            analytic_loop_solution(&a.get(0, 1), &a.get(1, 2), &a.get(2, 1), theta, params())
                .unwrap();
        let d = r.get(0, 1).distance(&expected);
        assert!(
            d < 1e-9,
            "{d:e} for {e12:?}, {e23:?}, {e32:?}, theta {theta}"
        );
    }
}

#[test]
fn theta_bound_is_golden_ratio_times_largest_positive_evidence() {
    let a = networks::random_network(&mut networks::rng(9), 15, 0.3, 1e3);
    let p_max = a
        .entries()
        .iter()
        .map(|x| x.positive_evidence(params()))
        .fold(0.0, f64::max);
    assert!((theta_bound(&a, params()) - GOLDEN_RATIO * p_max).abs() < 1e-9 * p_max);
}

#[test]
fn multiplicative_discounting_keeps_recounting_a_dogmatic_loop() {
    let a = networks::near_dogmatic_loop();
    let (_, naive) = naive_sl_referral(&a, &EngineConfig::default()).unwrap();
    let (_, ebsl) = solve_referral(&a, &EngineConfig::default()).unwrap();
    assert!(!naive.converged);
    assert!(ebsl.converged);
    assert!(naive.final_residual().unwrap() >= 10.0 * ebsl.final_residual().unwrap());
}
