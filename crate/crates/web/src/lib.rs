//! Browser demo. Each exported function takes plain numbers and returns
//! JSON (or raw pixels) for the page in `www/`.

use ebsl::compare::{compare, CompareInput, CompareOptions, ThetaChoice};
use ebsl::engine::solve_referral;
use ebsl::render::{grayscale, RenderSpec};
use ebsl::scenario::{Case, WITNESS};
use ebsl::{
    AlgebraParams, EngineConfig, Evidence, EvidenceMatrix, GFunction, Opinion, OpinionMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Shown {
    opinion: Opinion,
    evidence: Evidence,
}

impl Shown {
    fn new(x: Opinion, params: AlgebraParams) -> Self {
        Shown {
            opinion: x,
            evidence: x.evidence(params),
        }
    }
}

#[derive(Serialize)]
struct Operations {
    x: Shown,
    y: Shown,
    consensus: Shown,
    legacy_discount: Shown,
    discount_xb: Shown,
    discount_sqrt_xb: Shown,
    discount_odot: Option<Shown>,
    theta_bound: f64,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

fn error_json(e: impl std::fmt::Display) -> String {
    to_json(&serde_json::json!({ "error": e.to_string() }))
}

/// Consensus and the discount operators applied to two opinions given by
/// evidence. `⊙` is skipped when θ is not above the admissible bound.
pub fn operations(
    xp: f64,
    xn: f64,
    yp: f64,
    yn: f64,
    c: f64,
    theta: f64,
) -> Result<String, ebsl::Error> {
    let params = AlgebraParams::new(c)?;
    let x = Opinion::from_pn(xp, xn, params)?;
    let y = Opinion::from_pn(yp, yn, params)?;
    let bound = ebsl::engine::GOLDEN_RATIO * xp.max(yp);
    let odot = if theta > bound {
        Some(Shown::new(x.discount_odot(&y, theta, params)?, params))
    } else {
        None
    };
    let ops = Operations {
        x: Shown::new(x, params),
        y: Shown::new(y, params),
        consensus: Shown::new(x.consensus(&y), params),
        legacy_discount: Shown::new(x.discount_legacy(&y), params),
        discount_xb: Shown::new(x.discount(&y, &GFunction::Belief)?, params),
        discount_sqrt_xb: Shown::new(x.discount(&y, &GFunction::SqrtBelief)?, params),
        discount_odot: odot,
        theta_bound: bound,
    };
    Ok(to_json(&ops))
}

/// Every method on a built-in seven-node case, with the witness's direct
/// evidence about the proposition replaced by `(witness_p, witness_n)`.
pub fn compare_case(
    case: &str,
    witness_p: f64,
    witness_n: f64,
    theta: f64,
) -> Result<String, ebsl::Error> {
    let case = Case::from_name(case)
        .ok_or_else(|| ebsl::Error::InvalidConfig(format!("unknown case `{case}`")))?;
    let mut input = CompareInput::from_case(case);
    input
        .functional
        .insert(WITNESS, Evidence::new(witness_p, witness_n)?);
    let report = compare(&input, &CompareOptions::new(ThetaChoice::Fixed(theta)))?;
    Ok(to_json(&report))
}

/// Largest network the page may request.
pub const MAX_NODES: usize = 200;

#[derive(Serialize)]
struct NetworkImages {
    n: usize,
    iterations: usize,
    converged: bool,
    direct: Vec<u8>,
    referral: Vec<u8>,
}

/// Random direct evidence on `n` nodes, the referral matrix it leads to,
/// and both rendered as grayscale pixels on a shared scale.
pub fn network_images(
    n: usize,
    density: f64,
    max_evidence: f64,
    seed: u64,
    sqrt_belief: bool,
) -> Result<String, ebsl::Error> {
    if n > MAX_NODES
        || !(0.0..=1.0).contains(&density)
        || !(max_evidence.is_finite() && max_evidence >= 0.0)
    {
        return Err(ebsl::Error::InvalidConfig(format!(
            "need n ≤ {MAX_NODES}, density in [0, 1] and finite non-negative evidence"
        )));
    }
    let params = AlgebraParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut direct = EvidenceMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(density) {
                let ev = Evidence::new(
                    rng.random_range(0.0..=max_evidence),
                    rng.random_range(0.0..=max_evidence),
                )?;
                direct.add(i, j, ev)?;
            }
        }
    }
    let a = OpinionMatrix::from_fn(n, |i, j| Opinion::from_evidence(direct.get(i, j), params));
    let g = if sqrt_belief {
        GFunction::SqrtBelief
    } else {
        GFunction::Belief
    };
    let (r, report) = solve_referral(&a, &EngineConfig::new(params, g))?;
    let referral = EvidenceMatrix::from_opinions(&r, params);
    let e_max = referral
        .entries()
        .iter()
        .chain(direct.entries())
        .map(Evidence::p)
        .fold(0.0, f64::max);
    let spec = RenderSpec {
        max_reference: (e_max > 0.0).then_some(e_max),
        ..RenderSpec::default()
    };
    Ok(to_json(&NetworkImages {
        n,
        iterations: report.iterations,
        converged: report.converged,
        direct: grayscale(&direct, &spec)?,
        referral: grayscale(&referral, &spec)?,
    }))
}

#[wasm_bindgen(js_name = operations)]
pub fn operations_js(xp: f64, xn: f64, yp: f64, yn: f64, c: f64, theta: f64) -> String {
    operations(xp, xn, yp, yn, c, theta).unwrap_or_else(error_json)
}

#[wasm_bindgen(js_name = compareCase)]
pub fn compare_case_js(case: &str, witness_p: f64, witness_n: f64, theta: f64) -> String {
    compare_case(case, witness_p, witness_n, theta).unwrap_or_else(error_json)
}

#[wasm_bindgen(js_name = networkImages)]
pub fn network_images_js(
    n: u32,
    density: f64,
    max_evidence: f64,
    seed: u32,
    sqrt_belief: bool,
) -> String {
    network_images(n as usize, density, max_evidence, seed.into(), sqrt_belief)
        .unwrap_or_else(error_json)
}
