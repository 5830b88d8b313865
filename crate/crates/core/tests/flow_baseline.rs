#[path = "support/networks.rs"]
mod networks;

use ebsl::flow::{solve_flow, solve_flow_from, FlowConfig, RatingMatrix};
use rand::Rng;

#[test]
fn three_node_cycle_matches_independent_iteration() {
    let mut a = RatingMatrix::zeros(3);
    a.set(0, 1, 0.8).unwrap();
    a.set(1, 2, 0.6).unwrap();
    a.set(2, 0, 0.4).unwrap();
    let sol = solve_flow(&a, &FlowConfig::new(0.5, vec![1.0 / 3.0; 3])).unwrap();
    assert!(sol.converged);
    // dense substitution iterated to a 1e-15 change
    let expected = [0.23565428467004526, 0.2852135498372719, 0.27427507728364486];
    for (got, want) in sol.reputation.iter().zip(expected) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
}

fn random_ratings(rng: &mut impl Rng, n: usize) -> RatingMatrix {
    let mut a = RatingMatrix::zeros(n);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            a.set(i, j, rng.random_range(0.0..=1.0)).unwrap();
        }
    }
    a
}

#[test]
fn fixed_point_does_not_depend_on_the_iteration_seed() {
    let mut rng = networks::rng(21);
    for _ in 0..10 {
        let n = 12;
        let a = random_ratings(&mut rng, n);
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let cfg = FlowConfig::new(0.7, s);
        let seed: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..=1.0)).collect();
        let x = solve_flow(&a, &cfg).unwrap();
        let y = solve_flow_from(&a, &cfg, &seed).unwrap();
        assert!(x.converged && y.converged);
        for (u, v) in x.reputation.iter().zip(&y.reputation) {
            assert!((u - v).abs() <= 10.0 * cfg.tolerance);
        }
    }
}

#[test]
fn random_instances_converge_within_500_iterations() {
    let mut rng = networks::rng(22);
    for n in [2, 10, 50, 200] {
        let a = random_ratings(&mut rng, n);
        let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let alpha = rng.random_range(0.0..=1.0);
        let sol = solve_flow(&a, &FlowConfig::new(alpha, s)).unwrap();
        assert!(
            sol.converged && sol.iterations <= 500,
            "n = {n}: {}",
            sol.iterations
        );
        assert!(sol.reputation.iter().all(|r| (0.0..=1.0).contains(r)));
    }
}
