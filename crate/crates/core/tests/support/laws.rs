#![allow(dead_code)]

//! Algebraic laws of the opinion algebra as randomized checks.
//!
//! Shared by the core integration tests and the acceptance harness; each law
//! runs on a deterministic RNG so failures reproduce.

use ebsl::{AlgebraParams, Evidence, GFunction, Opinion};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

/// Tolerance for laws that hold exactly in real arithmetic.
pub const EXACT: f64 = 1e-12;
/// Relative tolerance of the evidence roundtrip.
pub const ROUNDTRIP: f64 = 1e-9;
/// θ used by the `⊙` laws; above any positive evidence generated here.
pub const THETA: f64 = 2e4;

pub type Law = (&'static str, fn(u32) -> Result<(), String>);

pub const LAWS: &[Law] = &[
    ("evidence roundtrip", evidence_roundtrip),
    (
        "consensus is evidence addition",
        consensus_is_evidence_addition,
    ),
    ("consensus commutes", consensus_commutes),
    ("consensus associates", consensus_associates),
    ("scalar multiplication basics", scalar_basics),
    ("n-fold consensus is n times x", n_fold_sum),
    (
        "scalar multiplication scales evidence",
        scalar_scales_evidence,
    ),
    ("scalar distributes over consensus", scalar_distributes),
    ("scalars add", scalars_add),
    ("scalars compose", scalars_compose),
    ("discount properties", discount_properties),
    ("discount right-distributes", discount_right_distributes),
    ("discounts permute", discounts_permute),
    ("discount chain is one scaling", discount_chain),
    ("odot left-distributes", odot_left_distributes),
    ("odot associates", odot_associates),
    ("odot weight is linear", odot_weight_linear),
];

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    TestRunner::new_with_rng(config, rng)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn close(x: &Opinion, y: &Opinion, tol: f64) -> Result<(), TestCaseError> {
    let d = x.distance(y);
    prop_assert!(d <= tol, "{x:?} vs {y:?}: distance {d:e}");
    Ok(())
}

fn rel_close(a: f64, b: f64, tol: f64) -> Result<(), TestCaseError> {
    let scale = a.abs().max(b.abs()).max(1.0);
    prop_assert!((a - b).abs() <= tol * scale, "{a} vs {b}");
    Ok(())
}

pub fn params() -> impl Strategy<Value = AlgebraParams> {
    prop_oneof![Just(1.0), Just(2.0), Just(10.0)].prop_map(|c| AlgebraParams::new(c).unwrap())
}

/// Evidence amounts spread over several orders of magnitude.
pub fn evidence(max: f64) -> impl Strategy<Value = Evidence> {
    let amount = prop_oneof![Just(0.0), 0.0..1.0, 0.0..100.0, 0.0..max,];
    (amount.clone(), amount).prop_map(|(p, n)| Evidence::new(p, n).unwrap())
}

/// Opinions with at most `max` units of evidence at `c = 2`.
pub fn opinion(max: f64) -> impl Strategy<Value = Opinion> {
    evidence(max).prop_map(|ev| Opinion::from_evidence(ev, AlgebraParams::default()))
}

pub fn weight_fn() -> impl Strategy<Value = GFunction> {
    prop_oneof![
        Just(GFunction::Belief),
        Just(GFunction::SqrtBelief),
        Just(GFunction::evidence_over_theta(THETA, AlgebraParams::default()).unwrap()),
    ]
}

fn alpha() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0..1.0, 0.0..10.0]
}

pub fn evidence_roundtrip(cases: u32) -> Result<(), String> {
    run(cases, (evidence(1e6), params()), |(ev, params)| {
        let back = Opinion::from_evidence(ev, params).evidence(params);
        rel_close(back.p(), ev.p(), ROUNDTRIP)?;
        rel_close(back.n(), ev.n(), ROUNDTRIP)
    })
}

pub fn consensus_is_evidence_addition(cases: u32) -> Result<(), String> {
    run(
        cases,
        (evidence(1e4), evidence(1e4), params()),
        |(ex, ey, params)| {
            let x = Opinion::from_evidence(ex, params);
            let y = Opinion::from_evidence(ey, params);
            close(
                &x.consensus(&y),
                &Opinion::from_evidence(ex + ey, params),
                EXACT,
            )
        },
    )
}

pub fn consensus_commutes(cases: u32) -> Result<(), String> {
    run(cases, (opinion(1e4), opinion(1e4)), |(x, y)| {
        close(&x.consensus(&y), &y.consensus(&x), EXACT)
    })
}

pub fn consensus_associates(cases: u32) -> Result<(), String> {
    run(
        cases,
        (opinion(1e4), opinion(1e4), opinion(1e4)),
        |(x, y, z)| {
            close(
                &x.consensus(&y).consensus(&z),
                &x.consensus(&y.consensus(&z)),
                EXACT,
            )
        },
    )
}

pub fn scalar_basics(cases: u32) -> Result<(), String> {
    run(cases, (opinion(1e4), alpha()), |(x, a)| {
        let ax = x.scale(a).unwrap();
        let [b, d, u] = ax.components();
        prop_assert!(b >= 0.0 && d >= 0.0 && u > 0.0);
        prop_assert!((b + d + u - 1.0).abs() <= EXACT);
        prop_assert_eq!(x.scale(0.0).unwrap(), Opinion::UNCERTAIN);
        close(&x.scale(1.0).unwrap(), &x, EXACT)?;
        if a != 0.0 && x.disbelief() > 0.0 && ax.disbelief() > 0.0 {
            rel_close(
                ax.belief() / ax.disbelief(),
                x.belief() / x.disbelief(),
                EXACT,
            )?;
        }
        Ok(())
    })
}

pub fn n_fold_sum(cases: u32) -> Result<(), String> {
    run(cases, (opinion(1e4), 2usize..=10), |(x, n)| {
        let folded: Opinion = std::iter::repeat_n(x, n).sum();
        close(&x.scale(n as f64).unwrap(), &folded, EXACT)
    })
}

pub fn scalar_scales_evidence(cases: u32) -> Result<(), String> {
    run(
        cases,
        (evidence(1e4), alpha(), params()),
        |(ev, a, params)| {
            let ax = Opinion::from_evidence(ev, params).scale(a).unwrap();
            rel_close(ax.positive_evidence(params), a * ev.p(), EXACT)?;
            rel_close(ax.negative_evidence(params), a * ev.n(), EXACT)
        },
    )
}

pub fn scalar_distributes(cases: u32) -> Result<(), String> {
    run(cases, (opinion(1e4), opinion(1e4), alpha()), |(x, y, a)| {
        let lhs = x.consensus(&y).scale(a).unwrap();
        let rhs = x.scale(a).unwrap().consensus(&y.scale(a).unwrap());
        close(&lhs, &rhs, EXACT)
    })
}

pub fn scalars_add(cases: u32) -> Result<(), String> {
    run(cases, (opinion(1e4), alpha(), alpha()), |(x, a, b)| {
        let lhs = x.scale(a + b).unwrap();
        let rhs = x.scale(a).unwrap().consensus(&x.scale(b).unwrap());
        close(&lhs, &rhs, EXACT)
    })
}

pub fn scalars_compose(cases: u32) -> Result<(), String> {
    run(cases, (opinion(1e4), alpha(), alpha()), |(x, a, b)| {
        close(
            &x.scale(b).unwrap().scale(a).unwrap(),
            &x.scale(a * b).unwrap(),
            EXACT,
        )
    })
}

pub fn discount_properties(cases: u32) -> Result<(), String> {
    let params = AlgebraParams::default();
    run(
        cases,
        (opinion(1e4), evidence(1e4), weight_fn()),
        |(x, ey, g)| {
            let y = Opinion::from_evidence(ey, params);
            let w = g.evaluate(&x).unwrap();
            let z = x.discount(&y, &g).unwrap();
            let [b, d, u] = z.components();
            prop_assert!(b >= 0.0 && d >= 0.0 && u > 0.0);
            prop_assert!((b + d + u - 1.0).abs() <= EXACT);
            rel_close(z.positive_evidence(params), w * ey.p(), EXACT)?;
            rel_close(z.negative_evidence(params), w * ey.n(), EXACT)?;
            if w > 0.0 && y.disbelief() > 0.0 && z.disbelief() > 0.0 {
                rel_close(
                    z.belief() / z.disbelief(),
                    y.belief() / y.disbelief(),
                    EXACT,
                )?;
            }
            prop_assert_eq!(
                x.discount(&Opinion::UNCERTAIN, &g).unwrap(),
                Opinion::UNCERTAIN
            );
            prop_assert!(z.uncertainty() >= y.uncertainty() - EXACT);
            Ok(())
        },
    )
}

pub fn discount_right_distributes(cases: u32) -> Result<(), String> {
    run(
        cases,
        (opinion(1e4), opinion(1e4), opinion(1e4), weight_fn()),
        |(x, y, z, g)| {
            let lhs = x.discount(&y.consensus(&z), &g).unwrap();
            let rhs = x
                .discount(&y, &g)
                .unwrap()
                .consensus(&x.discount(&z, &g).unwrap());
            close(&lhs, &rhs, EXACT)
        },
    )
}

pub fn discounts_permute(cases: u32) -> Result<(), String> {
    run(
        cases,
        (opinion(1e4), opinion(1e4), opinion(1e4), weight_fn()),
        |(x1, x2, y, g)| {
            let lhs = x1.discount(&x2.discount(&y, &g).unwrap(), &g).unwrap();
            let rhs = x2.discount(&x1.discount(&y, &g).unwrap(), &g).unwrap();
            close(&lhs, &rhs, EXACT)
        },
    )
}

pub fn discount_chain(cases: u32) -> Result<(), String> {
    run(
        cases,
        (
            prop::collection::vec(opinion(1e4), 1..6),
            opinion(1e4),
            weight_fn(),
        ),
        |(xs, y, g)| {
            let mut chained = y;
            let mut weight = 1.0;
            for x in xs.iter().rev() {
                chained = x.discount(&chained, &g).unwrap();
                weight *= g.evaluate(x).unwrap();
            }
            close(&chained, &y.scale(weight).unwrap(), EXACT)
        },
    )
}

/// Opinions whose positive evidence keeps every intermediate `⊙` weight
/// at most 1 for [`THETA`].
fn odot_operand() -> impl Strategy<Value = Opinion> {
    opinion(THETA / 4.0)
}

pub fn odot_left_distributes(cases: u32) -> Result<(), String> {
    let params = AlgebraParams::default();
    run(
        cases,
        (odot_operand(), odot_operand(), opinion(1e4)),
        |(x, y, z)| {
            let lhs = x.consensus(&y).discount_odot(&z, THETA, params).unwrap();
            let rhs = x
                .discount_odot(&z, THETA, params)
                .unwrap()
                .consensus(&y.discount_odot(&z, THETA, params).unwrap());
            close(&lhs, &rhs, EXACT)
        },
    )
}

pub fn odot_associates(cases: u32) -> Result<(), String> {
    let params = AlgebraParams::default();
    run(
        cases,
        (odot_operand(), odot_operand(), opinion(1e4)),
        |(x, y, z)| {
            let lhs = x
                .discount_odot(&y.discount_odot(&z, THETA, params).unwrap(), THETA, params)
                .unwrap();
            let rhs = x
                .discount_odot(&y, THETA, params)
                .unwrap()
                .discount_odot(&z, THETA, params)
                .unwrap();
            close(&lhs, &rhs, EXACT)
        },
    )
}

pub fn odot_weight_linear(cases: u32) -> Result<(), String> {
    let g = GFunction::evidence_over_theta(THETA, AlgebraParams::default()).unwrap();
    run(cases, (odot_operand(), odot_operand()), |(x, y)| {
        let lhs = g.evaluate(&x.consensus(&y)).unwrap();
        let rhs = g.evaluate(&x).unwrap() + g.evaluate(&y).unwrap();
        prop_assert!((lhs - rhs).abs() <= EXACT, "{lhs} vs {rhs}");
        Ok(())
    })
}
