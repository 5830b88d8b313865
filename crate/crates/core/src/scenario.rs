//! The seven-node benchmark network.
//!
//! ```text
//!               4 ──┐
//!             ↗ ↓    ↘
//!   1 → 2 → 3   ↓     6 → 7 ⇒ P
//!             ↘ ↓    ↗
//!               5 ──┘
//! ```
//!
//! Node `k` has index `k − 1`. Referral edges carry evidence; node 7 holds
//! the only functional trust in the proposition `P`. Three evidence cases
//! exercise mixed evidence, heavy negative functional evidence and saturated
//! positive evidence.

use crate::engine::FunctionalTrustInput;
use crate::expr::{boxtimes_chain, odot_chain, otimes_chain, var, Bindings, OpinionExpr};
use crate::ingest::EvidenceMatrix;
use crate::matrix::OpinionMatrix;
use crate::opinion::{AlgebraParams, Evidence, GFunction, Opinion};

pub const NODES: usize = 7;
/// Index of node 1, whose view of `P` is computed.
pub const SOURCE: usize = 0;
/// Index of node 7, the only node with functional trust in `P`.
pub const WITNESS: usize = 6;

/// Referral edges as 1-based `(from, to)` labels.
pub const EDGES: [(usize, usize); 8] = [
    (1, 2),
    (2, 3),
    (3, 4),
    (3, 5),
    (4, 5),
    (4, 6),
    (5, 6),
    (6, 7),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// Mixed evidence on every edge.
    Mixed,
    /// As `Mixed`, but with ten times the negative functional evidence.
    HeavyNegative,
    /// Every edge carries `(10000, 0)`.
    Saturated,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Mixed, Case::HeavyNegative, Case::Saturated];

    pub fn name(&self) -> &'static str {
        match self {
            Case::Mixed => "mixed",
            Case::HeavyNegative => "heavy-negative",
            Case::Saturated => "saturated",
        }
    }

    pub fn from_name(name: &str) -> Option<Case> {
        Case::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Evidence on a referral edge given by 1-based labels.
    pub fn edge_evidence(&self, from: usize, to: usize) -> Option<Evidence> {
        if !EDGES.contains(&(from, to)) {
            return None;
        }
        let (p, n) = match (self, from, to) {
            (Case::Saturated, _, _) => (10_000.0, 0.0),
            (_, 1, 2) => (400.0, 300.0),
            (_, 2, 3) => (10.0, 5.0),
            (_, 6, 7) => (5.0, 5.0),
            _ => (500.0, 0.0),
        };
        Some(Evidence::new(p, n).expect("valid constant"))
    }

    /// Node 7's evidence about `P`.
    pub fn functional_evidence(&self) -> Evidence {
        let (p, n) = match self {
            Case::Mixed => (10.0, 90.0),
            Case::HeavyNegative => (10.0, 900.0),
            Case::Saturated => (10_000.0, 0.0),
        };
        Evidence::new(p, n).expect("valid constant")
    }

    /// Threshold for evidence-proportional discounting in this case.
    pub fn theta(&self) -> f64 {
        match self {
            Case::Saturated => 20_000.0,
            _ => 1000.0,
        }
    }

    pub fn evidence_matrix(&self) -> EvidenceMatrix {
        let mut e = EvidenceMatrix::zeros(NODES);
        for (from, to) in EDGES {
            let ev = self.edge_evidence(from, to).expect("listed edge");
            e.add(from - 1, to - 1, ev).expect("in range");
        }
        e
    }

    pub fn referral_matrix(&self, params: AlgebraParams) -> OpinionMatrix {
        crate::ingest::evidence_to_opinion_matrix(&self.evidence_matrix(), params)
    }

    pub fn functional_trust(&self, params: AlgebraParams) -> FunctionalTrustInput {
        let mut t = FunctionalTrustInput::new();
        t.insert(
            WITNESS,
            Opinion::from_evidence(self.functional_evidence(), params),
        );
        t
    }

    /// Opinions named `A12`, `A23`, …, `A67` and `T7P`.
    pub fn bindings(&self, params: AlgebraParams) -> Bindings {
        bindings_from(
            &self.referral_matrix(params),
            self.functional_trust(params).get(WITNESS),
        )
    }
}

/// Named bindings for the benchmark expressions taken from any 7-node
/// referral matrix and node 7's functional trust.
pub fn bindings_from(referral: &OpinionMatrix, witness_trust: Opinion) -> Bindings {
    assert_eq!(
        referral.size(),
        NODES,
        "benchmark network has {NODES} nodes"
    );
    let mut b: Bindings = EDGES
        .iter()
        .map(|&(from, to)| (edge_name(from, to), referral.get(from - 1, to - 1)))
        .collect();
    b.insert("T7P".into(), witness_trust);
    b
}

pub fn edge_name(from: usize, to: usize) -> String {
    format!("A{from}{to}")
}

/// Node 1's opinion of `P` obtained by unrolling the naive recursion with
/// multiplicative discounting on the full network.
pub fn flow_sl_expression() -> OpinionExpr {
    let via4 = otimes_chain(&["A12", "A23", "A34", "A46"]);
    let into5 =
        otimes_chain(&["A12", "A23", "A34", "A45"]).plus(otimes_chain(&["A12", "A23", "A35"]));
    via4.plus(into5.otimes(var("A56")))
        .otimes(var("A67"))
        .otimes(var("T7P"))
}

/// The naive unrolled expression once the 4 → 5 edge is dropped. `A12` and
/// `A23` appear twice.
pub fn flow_sl_expression_without_shortcut() -> OpinionExpr {
    otimes_chain(&["A12", "A23", "A34", "A46"])
        .plus(otimes_chain(&["A12", "A23", "A35", "A56"]))
        .otimes(var("A67"))
        .otimes(var("T7P"))
}

/// The canonical expression (every edge once) for the network without the
/// 4 → 5 edge.
pub fn canonical_expression() -> OpinionExpr {
    let middle = otimes_chain(&["A34", "A46"]).plus(otimes_chain(&["A35", "A56"]));
    otimes_chain(&["A12", "A23"])
        .otimes(middle)
        .otimes(var("A67"))
        .otimes(var("T7P"))
}

/// Node 1's referral trust in node 6 from the recursion with `⊠`, each
/// chain associated in the order evidence travels.
pub fn relay_expression(g: GFunction) -> OpinionExpr {
    let r13 = boxtimes_chain(&["A12", "A23"], g);
    let r14 = r13.clone().boxtimes(var("A34"), g);
    let r15 = r14
        .clone()
        .boxtimes(var("A45"), g)
        .plus(r13.boxtimes(var("A35"), g));
    r14.boxtimes(var("A46"), g)
        .plus(r15.boxtimes(var("A56"), g))
}

/// Node 1's referral trust in node 6 under `⊙` as a sum over the three
/// paths.
pub fn relay_odot_paths(theta: f64) -> OpinionExpr {
    odot_chain(&["A12", "A23", "A34", "A46"], theta)
        .plus(odot_chain(&["A12", "A23", "A35", "A56"], theta))
        .plus(odot_chain(&["A12", "A23", "A34", "A45", "A56"], theta))
}

/// [`relay_odot_paths`] with the common prefix `A12 ⊙ A23` factored out.
pub fn relay_odot_factored(theta: f64) -> OpinionExpr {
    let inner = odot_chain(&["A34", "A46"], theta).plus(
        var("A35")
            .plus(odot_chain(&["A34", "A45"], theta))
            .odot(var("A56"), theta),
    );
    odot_chain(&["A12", "A23"], theta).odot(inner, theta)
}
