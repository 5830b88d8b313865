#![allow(dead_code)]

//! Seeded generators of direct referral matrices.

use ebsl::{AlgebraParams, Evidence, Opinion, OpinionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each off-diagonal edge is present with probability `density` and carries
/// evidence drawn uniformly from `[0, max_evidence]²`.
pub fn random_network(
    rng: &mut impl Rng,
    n: usize,
    density: f64,
    max_evidence: f64,
) -> OpinionMatrix {
    let params = AlgebraParams::default();
    OpinionMatrix::from_fn(n, |i, j| {
        if i == j || !rng.random_bool(density) {
            return Opinion::UNCERTAIN;
        }
        let p = rng.random_range(0.0..=max_evidence);
        let q = rng.random_range(0.0..=max_evidence);
        Opinion::from_evidence(Evidence::new(p, q).unwrap(), params)
    })
}

/// Node 0 trusts node 1 a little; nodes 1 and 2 trust each other almost
/// dogmatically. Multiplicative discounting keeps re-counting the loop.
pub fn near_dogmatic_loop() -> OpinionMatrix {
    let params = AlgebraParams::default();
    let ev = |p: f64| Opinion::from_evidence(Evidence::new(p, 0.0).unwrap(), params);
    let mut a = OpinionMatrix::uncertain(3);
    a.set(0, 1, ev(10.0));
    a.set(1, 2, ev(1e9));
    a.set(2, 1, ev(1e9));
    a
}

/// Column sums of direct evidence: no iterate may hold more evidence about
/// node `j` than all direct evidence about `j` combined.
pub fn column_evidence_bounds(a: &OpinionMatrix) -> Vec<Evidence> {
    let params = AlgebraParams::default();
    let n = a.size();
    (0..n)
        .map(|j| (0..n).map(|m| a.get(m, j).evidence(params)).sum())
        .collect()
}

/// First entry of `x` that exceeds the column bound by more than `slack`.
pub fn bound_violation(
    x: &OpinionMatrix,
    bounds: &[Evidence],
    slack: f64,
) -> Option<(usize, usize)> {
    let params = AlgebraParams::default();
    x.iter().find_map(|(i, j, o)| {
        let ev = o.evidence(params);
        let over = ev.p() > bounds[j].p() + slack || ev.n() > bounds[j].n() + slack;
        over.then_some((i, j))
    })
}
