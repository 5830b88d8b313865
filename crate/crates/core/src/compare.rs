//! Side-by-side evaluation of one node's trust in a proposition under the
//! available propagation methods.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use serde::Serialize;

use crate::engine::{
    functional_trust, naive_sl_solve, solve_referral, theta_bound, EngineConfig,
    FunctionalTrustInput, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::flow::{aggregate_rating, solve_flow, FlowConfig, RatingMatrix};
use crate::ingest::{evidence_to_opinion_matrix, EvidenceMatrix};
use crate::opinion::{AlgebraParams, Evidence, GFunction, Opinion};
use crate::scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Naive recursion with multiplicative discounting.
    FlowSl,
    /// The hand-written canonical expression of the seven-node network.
    SlCanonical,
    EbslBelief,
    EbslSqrtBelief,
    EbslOdot,
    /// Flow-based reputation without uncertainty.
    FlowBaseline,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::FlowSl,
        Method::SlCanonical,
        Method::EbslBelief,
        Method::EbslSqrtBelief,
        Method::EbslOdot,
        Method::FlowBaseline,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::FlowSl => "flow-sl",
            Method::SlCanonical => "sl-canonical",
            Method::EbslBelief => "ebsl-xb",
            Method::EbslSqrtBelief => "ebsl-sqrt-xb",
            Method::EbslOdot => "ebsl-odot",
            Method::FlowBaseline => "flow-baseline",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaChoice {
    Fixed(f64),
    /// The smallest threshold that guarantees convergence.
    Auto,
}

/// Referral evidence plus each node's direct evidence about the proposition.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareInput {
    pub referral: EvidenceMatrix,
    pub functional: BTreeMap<usize, Evidence>,
}

impl CompareInput {
    pub fn from_case(case: scenario::Case) -> Self {
        Self {
            referral: case.evidence_matrix(),
            functional: [(scenario::WITNESS, case.functional_evidence())].into(),
        }
    }

    pub fn functional_trust(&self, params: AlgebraParams) -> FunctionalTrustInput {
        self.functional
            .iter()
            .map(|(&i, &ev)| (i, Opinion::from_evidence(ev, params)))
            .collect()
    }

    /// Ratings over the network nodes plus the proposition as an extra last
    /// node. Pairs without evidence are neutral; the proposition rates no one.
    pub fn rating_matrix(&self) -> RatingMatrix {
        let n = self.referral.size();
        let mut a = RatingMatrix::zeros(n + 1);
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                a.set(i, j, aggregate_rating(self.referral.get(i, j)))
                    .expect("rating in range");
            }
            let ev = self.functional.get(&i).copied().unwrap_or(Evidence::ZERO);
            a.set(i, n, aggregate_rating(ev)).expect("rating in range");
        }
        a
    }
}

/// Reads direct evidence about the proposition as CSV with header `i,p,n`.
pub fn read_functional_evidence<R: Read>(reader: R) -> Result<BTreeMap<usize, Evidence>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != ["i", "p", "n"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `i,p,n`, found `{}`", header.join(",")),
        });
    }
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Parse { line, message };
        if rec.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", rec.len())));
        }
        let i: usize = rec[0]
            .parse()
            .map_err(|_| err(format!("bad index `{}`", &rec[0])))?;
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse()
                .map_err(|_| err(format!("bad number `{}`", &rec[k])))
        };
        let ev = Evidence::new(num(1)?, num(2)?).map_err(|e| err(e.to_string()))?;
        *out.entry(i).or_insert(Evidence::ZERO) += ev;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub params: AlgebraParams,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub theta: ThetaChoice,
    /// Node whose trust in the proposition is reported.
    pub source: usize,
    pub methods: Vec<Method>,
    /// Required by [`Method::FlowBaseline`]; the start vector covers the
    /// network nodes plus the proposition.
    pub flow: Option<FlowConfig>,
}

impl CompareOptions {
    /// Every trust-propagation method except the flow baseline, reporting
    /// on node 0.
    pub fn new(theta: ThetaChoice) -> Self {
        Self {
            params: AlgebraParams::default(),
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            theta,
            source: 0,
            methods: vec![
                Method::FlowSl,
                Method::SlCanonical,
                Method::EbslBelief,
                Method::EbslSqrtBelief,
                Method::EbslOdot,
            ],
            flow: None,
        }
    }

    fn engine(&self, g: GFunction) -> EngineConfig {
        EngineConfig::new(self.params, g)
            .with_tolerance(self.tolerance)
            .with_max_iterations(self.max_iterations)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodResult {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opinion: Option<Opinion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    /// Scalar reputation, for methods without uncertainty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trust_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl MethodResult {
    fn opinion(method: Method, x: Opinion, params: AlgebraParams) -> Self {
        Self {
            method,
            opinion: Some(x),
            evidence: Some(x.evidence(params)),
            trust_value: None,
            iterations: None,
            converged: None,
            theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub source: usize,
    pub c: f64,
    pub results: Vec<MethodResult>,
}

impl CompareReport {
    pub fn get(&self, method: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method)
    }

    /// Fixed-width table of opinions, evidence and iteration counts.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<14} {:>8} {:>8} {:>8} {:>12} {:>12} {:>6}\n",
            "method", "b", "d", "u", "p", "n", "iter"
        );
        for r in &self.results {
            let _ = write!(out, "{:<14}", r.method.name());
            match (r.opinion, r.evidence, r.trust_value) {
                (Some(x), Some(ev), _) => {
                    let _ = write!(
                        out,
                        " {:>8.4} {:>8.4} {:>8.4} {:>12.4} {:>12.4}",
                        x.belief(),
                        x.disbelief(),
                        x.uncertainty(),
                        ev.p(),
                        ev.n()
                    );
                }
                (_, _, Some(t)) => {
                    let _ = write!(
                        out,
                        " {:>8.4} {:>8} {:>8} {:>12} {:>12}",
                        t, "-", "-", "-", "-"
                    );
                }
                _ => {
                    let _ = write!(
                        out,
                        " {:>8} {:>8} {:>8} {:>12} {:>12}",
                        "-", "-", "-", "-", "-"
                    );
                }
            }
            let iter = match (r.iterations, r.converged) {
                (Some(k), Some(true)) => k.to_string(),
                (Some(k), _) => format!("{k}*"),
                _ => "-".into(),
            };
            let _ = writeln!(out, " {iter:>6}");
        }
        if self.results.iter().any(|r| r.converged == Some(false)) {
            out.push_str("* did not converge\n");
        }
        out
    }
}

/// Runs every requested method.
pub fn compare(input: &CompareInput, opts: &CompareOptions) -> Result<CompareReport> {
    let n = input.referral.size();
    if opts.source >= n {
        return Err(Error::IndexOutOfRange {
            index: opts.source,
            n,
        });
    }
    if let Some(&i) = input.functional.keys().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let params = opts.params;
    let a = evidence_to_opinion_matrix(&input.referral, params);
    let t = input.functional_trust(params);
    let mut results = Vec::with_capacity(opts.methods.len());
    for &method in &opts.methods {
        let result = match method {
            Method::FlowSl => {
                let (f, report) = naive_sl_solve(&a, &t, &opts.engine(GFunction::Belief))?;
                MethodResult {
                    iterations: Some(report.iterations),
                    converged: Some(report.converged),
                    ..MethodResult::opinion(method, f[&opts.source], params)
                }
            }
            Method::SlCanonical => {
                if n != scenario::NODES || opts.source != scenario::SOURCE {
                    return Err(Error::InvalidConfig(format!(
                        "the canonical expression is defined for node {} of the {}-node benchmark network only",
                        scenario::SOURCE,
                        scenario::NODES
                    )));
                }
                let bindings = scenario::bindings_from(&a, t.get(scenario::WITNESS));
                let x = scenario::canonical_expression().eval(&bindings, params)?;
                MethodResult::opinion(method, x, params)
            }
            Method::EbslBelief | Method::EbslSqrtBelief | Method::EbslOdot => {
                let (g, theta) = match method {
                    Method::EbslBelief => (GFunction::Belief, None),
                    Method::EbslSqrtBelief => (GFunction::SqrtBelief, None),
                    _ => {
                        let theta = match opts.theta {
                            ThetaChoice::Fixed(v) => v,
                            ThetaChoice::Auto => theta_bound(&a, params),
                        };
                        (GFunction::evidence_over_theta(theta, params)?, Some(theta))
                    }
                };
                let cfg = opts.engine(g);
                let (r, report) = solve_referral(&a, &cfg)?;
                let x = functional_trust(&r, &t, opts.source, &cfg)?;
                MethodResult {
                    iterations: Some(report.iterations),
                    converged: Some(report.converged),
                    theta,
                    ..MethodResult::opinion(method, x, params)
                }
            }
            Method::FlowBaseline => {
                let cfg = opts.flow.as_ref().ok_or_else(|| {
                    Error::InvalidFlowConfig(
                        "the flow baseline needs a damping factor alpha and a start vector; \
                         no reference values exist for them, so they must be given explicitly"
                            .into(),
                    )
                })?;
                let sol = solve_flow(&input.rating_matrix(), cfg)?;
                MethodResult {
                    method,
                    opinion: None,
                    evidence: None,
                    trust_value: Some(sol.reputation[n]),
                    iterations: Some(sol.iterations),
                    converged: Some(sol.converged),
                    theta: None,
                }
            }
        };
        results.push(result);
    }
    Ok(CompareReport {
        source: opts.source,
        c: params.c(),
        results,
    })
}

/// Flow-baseline reputation of the proposition for each damping factor,
/// starting every node (and the proposition) at 1.
pub fn alpha_sweep(input: &CompareInput, alphas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let a = input.rating_matrix();
    let n = a.size();
    alphas
        .iter()
        .map(|&alpha| {
            let sol = solve_flow(&a, &FlowConfig::new(alpha, vec![1.0; n]))?;
            Ok((alpha, sol.reputation[n - 1]))
        })
        .collect()
}
