//! Matrix-level trust propagation.
//!
//! The final referral trust matrix `R` is the off-diagonal part of the fixed
//! point of
//!
//! ```text
//! f(X) = A ⊕ (offdiag(X) ⊠ A),    (X ⊠ A)_ij = ⊕_k X_ik ⊠ A_kj
//! ```
//!
//! found by repeated substitution starting from `X0 = A`. Iteration stops when
//! the summed entrywise distance between successive off-diagonal iterates is
//! zero, or stays below the configured tolerance for two sweeps in a row. A
//! single small step is not enough: on a two-node loop the entries change on
//! alternate sweeps, and the smaller half can dip below the tolerance long
//! before the other has settled.
//!
//! All `⊕`-folds run over `k` in ascending order, so results are
//! bit-identical between runs and independent of how rows are scheduled.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::OpinionMatrix;
use crate::opinion::{AlgebraParams, GFunction, Opinion};

/// `(1 + √5) / 2`
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_895;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineConfig {
    pub params: AlgebraParams,
    pub g: GFunction,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl EngineConfig {
    pub fn new(params: AlgebraParams, g: GFunction) -> Self {
        Self {
            params,
            g,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if let GFunction::EvidenceOverTheta { c, .. } = self.g {
            if c != self.params.c() {
                return Err(Error::ConstantMismatch {
                    g_c: c,
                    engine_c: self.params.c(),
                });
            }
        }
        Ok(())
    }
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self::new(AlgebraParams::default(), GFunction::Belief)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    /// Summed distance between successive iterates, one value per iteration.
    pub residual_history: Vec<f64>,
}

impl ConvergenceReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// Direct functional trust of each node in one proposition. Absent nodes hold
/// full uncertainty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FunctionalTrustInput {
    opinions: BTreeMap<usize, Opinion>,
}

impl FunctionalTrustInput {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, node: usize, x: Opinion) -> &mut Self {
        self.opinions.insert(node, x);
        self
    }

    pub fn get(&self, node: usize) -> Opinion {
        self.opinions
            .get(&node)
            .copied()
            .unwrap_or(Opinion::UNCERTAIN)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Opinion)> + '_ {
        self.opinions.iter().map(|(&k, &v)| (k, v))
    }

    pub fn max_node(&self) -> Option<usize> {
        self.opinions.keys().next_back().copied()
    }
}

impl FromIterator<(usize, Opinion)> for FunctionalTrustInput {
    fn from_iter<I: IntoIterator<Item = (usize, Opinion)>>(iter: I) -> Self {
        Self {
            opinions: iter.into_iter().collect(),
        }
    }
}

/// How an opinion is transported along an edge.
#[derive(Debug, Clone, Copy)]
enum Transfer<'a> {
    /// Multiplicative `⊗`, for the naive baseline.
    Legacy,
    /// Evidence scaling `⊠` with the given weight.
    Scaled(&'a GFunction),
}

impl Transfer<'_> {
    fn apply(&self, x: &Opinion, y: &Opinion) -> Result<Opinion> {
        match self {
            Transfer::Legacy => Ok(x.discount_legacy(y)),
            Transfer::Scaled(g) => x.discount(y, g),
        }
    }
}

/// `X` with its diagonal replaced by full uncertainty.
pub fn offdiag(x: &OpinionMatrix) -> OpinionMatrix {
    x.offdiag()
}

/// `(X ⊠ A)_ij = ⊕_k X_ik ⊠ A_kj`, folded over ascending `k`.
pub fn matrix_discount_product(
    x: &OpinionMatrix,
    a: &OpinionMatrix,
    g: &GFunction,
) -> Result<OpinionMatrix> {
    product(x, a, Transfer::Scaled(g))
}

fn product(x: &OpinionMatrix, a: &OpinionMatrix, rule: Transfer<'_>) -> Result<OpinionMatrix> {
    x.check_same_size(a)?;
    let n = x.size();
    let row = |i: usize| product_row(x, a, rule, i);

    #[cfg(feature = "parallel")]
    let rows: Vec<Result<Vec<Opinion>>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<Vec<Opinion>>> = (0..n).map(row).collect();

    let mut entries = Vec::with_capacity(n * n);
    for r in rows {
        entries.extend(r?);
    }
    OpinionMatrix::from_entries(n, entries)
}

fn product_row(
    x: &OpinionMatrix,
    a: &OpinionMatrix,
    rule: Transfer<'_>,
    i: usize,
) -> Result<Vec<Opinion>> {
    let n = x.size();
    let xi = x.row(i);
    let mut out = vec![Opinion::UNCERTAIN; n];
    match rule {
        Transfer::Scaled(g) => {
            // x ⊠ y == g(x)·y, so weights are evaluated once per (i, k).
            let weights = xi
                .iter()
                .enumerate()
                .map(|(k, xik)| {
                    g.evaluate(xik).map_err(|e| match e {
                        Error::ThetaViolation { evidence, theta } => Error::ThetaViolationAt {
                            row: i,
                            col: k,
                            evidence,
                            theta,
                        },
                        other => other,
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            for (k, &w) in weights.iter().enumerate() {
                // zero weight yields U, the exact identity of ⊕
                if w == 0.0 {
                    continue;
                }
                for (slot, akj) in out.iter_mut().zip(a.row(k)) {
                    *slot = slot.consensus(&akj.scale_unchecked(w));
                }
            }
        }
        Transfer::Legacy => {
            for (k, xik) in xi.iter().enumerate() {
                // U ⊗ y == U
                if xik.is_uncertain() {
                    continue;
                }
                for (slot, akj) in out.iter_mut().zip(a.row(k)) {
                    *slot = slot.consensus(&xik.discount_legacy(akj));
                }
            }
        }
    }
    Ok(out)
}

/// One application of `f(X) = A ⊕ (offdiag(X) ⊠ A)`.
pub fn step(x: &OpinionMatrix, a: &OpinionMatrix, cfg: &EngineConfig) -> Result<OpinionMatrix> {
    cfg.validate()?;
    a.consensus(&product(&x.offdiag(), a, Transfer::Scaled(&cfg.g))?)
}

/// Largest positive evidence in `A` times the golden ratio: the smallest
/// threshold for which the evidence-proportional discount cannot amplify
/// evidence on a two-node loop.
pub fn theta_bound(a: &OpinionMatrix, params: AlgebraParams) -> f64 {
    let p_max = a
        .entries()
        .iter()
        .map(|x| x.positive_evidence(params))
        .fold(0.0, f64::max);
    p_max * GOLDEN_RATIO
}

/// Solves for the final referral trust matrix `R`.
///
/// Non-convergence is reported through the returned [`ConvergenceReport`];
/// the last iterate is still returned.
pub fn solve_referral(
    a: &OpinionMatrix,
    cfg: &EngineConfig,
) -> Result<(OpinionMatrix, ConvergenceReport)> {
    solve_referral_observed(a, cfg, |_, _| {})
}

/// [`solve_referral`] with a callback that sees every iterate `X^k`
/// (before the diagonal is cleared), starting with `X^0 = A`.
pub fn solve_referral_observed(
    a: &OpinionMatrix,
    cfg: &EngineConfig,
    observer: impl FnMut(usize, &OpinionMatrix),
) -> Result<(OpinionMatrix, ConvergenceReport)> {
    cfg.validate()?;
    if let Some(theta) = cfg.g.theta() {
        let bound = theta_bound(a, cfg.params);
        if theta < bound {
            return Err(Error::ThetaBelowBound { theta, bound });
        }
    }
    iterate(a, cfg, Transfer::Scaled(&cfg.g), observer)
}

fn iterate(
    a: &OpinionMatrix,
    cfg: &EngineConfig,
    rule: Transfer<'_>,
    mut observer: impl FnMut(usize, &OpinionMatrix),
) -> Result<(OpinionMatrix, ConvergenceReport)> {
    a.check_direct_referral()?;
    observer(0, a);
    let mut r = a.offdiag();
    let mut report = ConvergenceReport {
        converged: false,
        iterations: 0,
        residual_history: Vec::new(),
    };
    for k in 1..=cfg.max_iterations {
        let x = a.consensus(&product(&r, a, rule)?)?;
        observer(k, &x);
        let next = x.offdiag();
        let residual = next.total_distance(&r)?;
        r = next;
        report.iterations = k;
        report.residual_history.push(residual);
        let previous_small = report
            .residual_history
            .iter()
            .rev()
            .nth(1)
            .is_some_and(|&prev| prev < cfg.tolerance);
        if residual == 0.0 || (residual < cfg.tolerance && previous_small) {
            report.converged = true;
            break;
        }
        if !residual.is_finite() {
            break;
        }
    }
    Ok((r, report))
}

/// `F_iP = T_iP ⊕ ⊕_{j≠i} R_ij ⊠ T_jP`, folded over ascending `j`.
pub fn functional_trust(
    r: &OpinionMatrix,
    t: &FunctionalTrustInput,
    i: usize,
    cfg: &EngineConfig,
) -> Result<Opinion> {
    cfg.validate()?;
    aggregate(r, t, i, Transfer::Scaled(&cfg.g))
}

/// [`functional_trust`] for every node.
pub fn functional_trust_all(
    r: &OpinionMatrix,
    t: &FunctionalTrustInput,
    cfg: &EngineConfig,
) -> Result<BTreeMap<usize, Opinion>> {
    (0..r.size())
        .map(|i| Ok((i, functional_trust(r, t, i, cfg)?)))
        .collect()
}

fn aggregate(
    r: &OpinionMatrix,
    t: &FunctionalTrustInput,
    i: usize,
    rule: Transfer<'_>,
) -> Result<Opinion> {
    let n = r.size();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    if let Some(max) = t.max_node().filter(|&m| m >= n) {
        return Err(Error::IndexOutOfRange { index: max, n });
    }
    r.check_direct_referral()?;
    let mut acc = t.get(i);
    for (j, tj) in t.iter().filter(|&(j, _)| j != i) {
        acc = acc.consensus(&rule.apply(&r.get(i, j), &tj)?);
    }
    Ok(acc)
}

/// The naive baseline: the same fixed-point scheme with multiplicative
/// discounting `⊗`, followed by aggregation of functional trust for every
/// node. Double-counts evidence and need not converge on networks with loops.
pub fn naive_sl_solve(
    a: &OpinionMatrix,
    t: &FunctionalTrustInput,
    cfg: &EngineConfig,
) -> Result<(BTreeMap<usize, Opinion>, ConvergenceReport)> {
    let (r, report) = naive_sl_referral(a, cfg)?;
    let f = (0..r.size())
        .map(|i| Ok((i, aggregate(&r, t, i, Transfer::Legacy)?)))
        .collect::<Result<_>>()?;
    Ok((f, report))
}

/// Referral trust matrix of the naive baseline.
pub fn naive_sl_referral(
    a: &OpinionMatrix,
    cfg: &EngineConfig,
) -> Result<(OpinionMatrix, ConvergenceReport)> {
    cfg.validate()?;
    iterate(a, cfg, Transfer::Legacy, |_, _| {})
}

/// Closed-form `R_12` of the three-node loop `1 → 2 ⇄ 3` under the
/// evidence-proportional discount:
///
/// ```text
/// p(R12) = p(A12) / (1 − p(A23) p(A32) / θ²)
/// n(R12) = n(A12) + p(A12) p(A23) n(A32) / (θ² − p(A23) p(A32))
/// ```
pub fn analytic_loop_solution(
    a12: &Opinion,
    a23: &Opinion,
    a32: &Opinion,
    theta: f64,
    params: AlgebraParams,
) -> Result<Opinion> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidTheta(theta));
    }
    let e12 = a12.evidence(params);
    let p23 = a23.positive_evidence(params);
    let e32 = a32.evidence(params);
    let theta_sq = theta * theta;
    let product = p23 * e32.p();
    let denom = theta_sq - product;
    if denom <= 0.0 {
        return Err(Error::LoopExplodes { product, theta_sq });
    }
    let p = e12.p() * theta_sq / denom;
    let n = e12.n() + e12.p() * p23 * e32.n() / denom;
    Opinion::from_pn(p, n, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> AlgebraParams {
        AlgebraParams::default()
    }

    fn ev(p: f64, n: f64) -> Opinion {
        Opinion::from_pn(p, n, params()).unwrap()
    }

    fn odot_cfg(theta: f64) -> EngineConfig {
        EngineConfig::new(
            params(),
            GFunction::evidence_over_theta(theta, params()).unwrap(),
        )
    }

    fn loop_matrix(a12: Opinion, a23: Opinion, a32: Opinion) -> OpinionMatrix {
        let mut a = OpinionMatrix::uncertain(3);
        a.set(0, 1, a12);
        a.set(1, 2, a23);
        a.set(2, 1, a32);
        a
    }

    #[test]
    fn product_of_uncertain_matrix_is_uncertain() {
        let mut a = OpinionMatrix::uncertain(3);
        a.set(0, 1, ev(3.0, 1.0));
        a.set(1, 2, ev(5.0, 0.0));
        let out =
            matrix_discount_product(&OpinionMatrix::uncertain(3), &a, &GFunction::Belief).unwrap();
        assert_eq!(out, OpinionMatrix::uncertain(3));
    }

    #[test]
    fn product_with_single_term() {
        let (x, y) = (ev(4.0, 1.0), ev(2.0, 7.0));
        let mut xm = OpinionMatrix::uncertain(2);
        xm.set(0, 1, x);
        let mut am = OpinionMatrix::uncertain(2);
        am.set(1, 0, y);
        let out = matrix_discount_product(&xm, &am, &GFunction::Belief).unwrap();
        assert_eq!(out.get(0, 0), x.discount(&y, &GFunction::Belief).unwrap());
        for (i, j) in [(0, 1), (1, 0), (1, 1)] {
            assert_eq!(out.get(i, j), Opinion::UNCERTAIN);
        }
    }

    #[test]
    fn product_reports_theta_violation_coordinates() {
        let mut x = OpinionMatrix::uncertain(3);
        x.set(2, 1, ev(50.0, 0.0));
        let a = OpinionMatrix::uncertain(3);
        let g = GFunction::evidence_over_theta(10.0, params()).unwrap();
        match matrix_discount_product(&x, &a, &g) {
            Err(Error::ThetaViolationAt { row: 2, col: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_from_uncertain_gives_a() {
        let a = loop_matrix(ev(3.0, 1.0), ev(2.0, 2.0), ev(9.0, 0.0));
        let x = step(&OpinionMatrix::uncertain(3), &a, &EngineConfig::default()).unwrap();
        assert_eq!(x, a);
    }

    #[test]
    fn step_on_chain_unrolls_one_hop_then_stops() {
        let mut a = OpinionMatrix::uncertain(3);
        let (a01, a12) = (ev(8.0, 1.0), ev(3.0, 4.0));
        a.set(0, 1, a01);
        a.set(1, 2, a12);
        let cfg = EngineConfig::default();
        let x1 = step(&a, &a, &cfg).unwrap();
        assert_eq!(x1.get(0, 2), a01.discount(&a12, &cfg.g).unwrap());
        let x2 = step(&x1, &a, &cfg).unwrap();
        assert_eq!(x2, x1);
    }

    #[test]
    fn solve_on_uncertain_matrix() {
        let a = OpinionMatrix::uncertain(4);
        let (r, report) = solve_referral(&a, &EngineConfig::default()).unwrap();
        assert_eq!(r, a);
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        assert_eq!(report.residual_history, vec![0.0]);
    }

    #[test]
    fn solve_rejects_non_uncertain_diagonal() {
        let mut a = OpinionMatrix::uncertain(2);
        a.set(1, 1, ev(1.0, 0.0));
        assert!(matches!(
            solve_referral(&a, &EngineConfig::default()),
            Err(Error::NonUncertainDiagonal(1))
        ));
    }

    #[test]
    fn loop_with_odot_matches_closed_form() {
        let a = loop_matrix(ev(10.0, 0.0), ev(10.0, 0.0), ev(10.0, 0.0));
        let (r, report) = solve_referral(&a, &odot_cfg(1000.0)).unwrap();
        assert!(report.converged);
        let p = r.get(0, 1).positive_evidence(params());
        assert!((p - 10.0 / (1.0 - 1e-4)).abs() < 1e-9, "p = {p}");
        let exact =
            analytic_loop_solution(&a.get(0, 1), &a.get(1, 2), &a.get(2, 1), 1000.0, params())
                .unwrap();
        assert!(r.get(0, 1).distance(&exact) < 1e-9);
    }

    #[test]
    fn analytic_loop_examples() {
        let p = params();
        let a12 = ev(7.0, 3.0);
        assert!(
            analytic_loop_solution(&a12, &ev(0.0, 4.0), &ev(9.0, 9.0), 100.0, p)
                .unwrap()
                .distance(&a12)
                < 1e-12
        );

        let r = analytic_loop_solution(&ev(10.0, 0.0), &ev(10.0, 0.0), &ev(10.0, 0.0), 1000.0, p)
            .unwrap()
            .evidence(p);
        assert!((r.p() - 10.001_000_100_010_001).abs() < 1e-9 && r.n() == 0.0);

        let r = analytic_loop_solution(&ev(10.0, 5.0), &ev(10.0, 0.0), &ev(0.0, 7.0), 1000.0, p)
            .unwrap()
            .evidence(p);
        assert!((r.p() - 10.0).abs() < 1e-9, "p = {}", r.p());
        assert!((r.n() - 5.0007).abs() < 1e-9, "n = {}", r.n());

        assert!(matches!(
            analytic_loop_solution(&ev(1.0, 0.0), &ev(40.0, 0.0), &ev(30.0, 0.0), 30.0, p),
            Err(Error::LoopExplodes { .. })
        ));
    }

    #[test]
    fn theta_bound_examples() {
        assert_eq!(theta_bound(&OpinionMatrix::uncertain(3), params()), 0.0);
        let mut a = OpinionMatrix::uncertain(3);
        a.set(0, 1, ev(500.0, 0.0));
        a.set(1, 2, ev(10.0, 5.0));
        let bound = theta_bound(&a, params());
        assert!((bound - 809.017).abs() < 1e-3);
        assert!(1000.0 >= bound);
    }

    #[test]
    fn engine_refuses_theta_below_bound() {
        let a = loop_matrix(ev(500.0, 0.0), ev(10.0, 0.0), ev(10.0, 0.0));
        assert!(matches!(
            solve_referral(&a, &odot_cfg(700.0)),
            Err(Error::ThetaBelowBound { .. })
        ));
    }

    #[test]
    fn zero_weight_first_edge_leaves_direct_opinion() {
        // g(A12) = 0 means nothing flows back through the loop.
        let a12 = ev(0.0, 3.0);
        let a = loop_matrix(a12, ev(20.0, 1.0), ev(30.0, 0.0));
        let (r, _) = solve_referral(&a, &EngineConfig::default()).unwrap();
        assert_eq!(r.get(0, 1), a12);
    }

    #[test]
    fn near_certain_return_edge_overwhelms_direct_opinion() {
        let a = loop_matrix(ev(0.5, 5.0), ev(50.0, 0.0), ev(1e9, 0.0));
        let (r, report) = solve_referral(&a, &EngineConfig::default()).unwrap();
        assert!(report.converged);
        let r12 = r.get(0, 1);
        assert!(r12.belief() > 0.999 && r12.uncertainty() < 1e-3, "{r12:.6}");
    }

    #[test]
    fn functional_trust_with_only_own_opinion() {
        let mut t = FunctionalTrustInput::new();
        let own = ev(4.0, 2.0);
        t.insert(1, own);
        let r = loop_matrix(ev(3.0, 1.0), ev(2.0, 2.0), ev(9.0, 0.0));
        let f = functional_trust(&r, &t, 1, &EngineConfig::default());
        // node 1 trusts nobody else with an opinion about P
        assert_eq!(f.unwrap(), own);
        assert!(functional_trust(&r, &t, 5, &EngineConfig::default()).is_err());
    }

    #[test]
    fn naive_baseline_on_uncertain_matrix() {
        let mut t = FunctionalTrustInput::new();
        t.insert(0, ev(1.0, 2.0));
        t.insert(2, ev(5.0, 0.0));
        let (f, report) =
            naive_sl_solve(&OpinionMatrix::uncertain(3), &t, &EngineConfig::default()).unwrap();
        assert!(report.converged);
        for i in 0..3 {
            assert_eq!(f[&i], t.get(i));
        }
    }

    #[test]
    fn config_validation() {
        let cfg = EngineConfig::default().with_tolerance(0.0);
        assert!(cfg.validate().is_err());
        let cfg = EngineConfig::default().with_max_iterations(0);
        assert!(cfg.validate().is_err());
        let g = GFunction::evidence_over_theta(10.0, AlgebraParams::new(3.0).unwrap()).unwrap();
        let cfg = EngineConfig::new(params(), g);
        assert!(matches!(
            cfg.validate(),
            Err(Error::ConstantMismatch { .. })
        ));
    }
}
