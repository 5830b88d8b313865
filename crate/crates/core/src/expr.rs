//! Expression trees over named opinions.
//!
//! Used to write trust-network formulas by hand and evaluate them exactly as
//! written; the evaluator never re-associates, since `⊠` is not associative.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::opinion::{AlgebraParams, GFunction, Opinion};

#[derive(Debug, Clone, PartialEq)]
pub enum OpinionExpr {
    Var(String),
    Consensus(Box<OpinionExpr>, Box<OpinionExpr>),
    LegacyDiscount(Box<OpinionExpr>, Box<OpinionExpr>),
    Discount(Box<OpinionExpr>, Box<OpinionExpr>, GFunction),
    OdotDiscount(Box<OpinionExpr>, Box<OpinionExpr>, f64),
    Scale(f64, Box<OpinionExpr>),
}

pub type Bindings = BTreeMap<String, Opinion>;

/// Leaf referring to a bound opinion.
pub fn var(name: impl Into<String>) -> OpinionExpr {
    OpinionExpr::Var(name.into())
}

impl OpinionExpr {
    /// `self ⊕ rhs`
    pub fn plus(self, rhs: OpinionExpr) -> OpinionExpr {
        OpinionExpr::Consensus(Box::new(self), Box::new(rhs))
    }

    /// `self ⊗ rhs`
    pub fn otimes(self, rhs: OpinionExpr) -> OpinionExpr {
        OpinionExpr::LegacyDiscount(Box::new(self), Box::new(rhs))
    }

    /// `self ⊠ rhs` with weight `g`
    pub fn boxtimes(self, rhs: OpinionExpr, g: GFunction) -> OpinionExpr {
        OpinionExpr::Discount(Box::new(self), Box::new(rhs), g)
    }

    /// `self ⊙ rhs` with threshold `theta`
    pub fn odot(self, rhs: OpinionExpr, theta: f64) -> OpinionExpr {
        OpinionExpr::OdotDiscount(Box::new(self), Box::new(rhs), theta)
    }

    /// `alpha · self`
    pub fn scaled(self, alpha: f64) -> OpinionExpr {
        OpinionExpr::Scale(alpha, Box::new(self))
    }

    pub fn eval(&self, bindings: &Bindings, params: AlgebraParams) -> Result<Opinion> {
        use OpinionExpr::*;
        match self {
            Var(name) => bindings
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnboundVariable(name.clone())),
            Consensus(l, r) => Ok(l
                .eval(bindings, params)?
                .consensus(&r.eval(bindings, params)?)),
            LegacyDiscount(l, r) => Ok(l
                .eval(bindings, params)?
                .discount_legacy(&r.eval(bindings, params)?)),
            Discount(l, r, g) => l
                .eval(bindings, params)?
                .discount(&r.eval(bindings, params)?, g),
            OdotDiscount(l, r, theta) => {
                l.eval(bindings, params)?
                    .discount_odot(&r.eval(bindings, params)?, *theta, params)
            }
            Scale(alpha, e) => e.eval(bindings, params)?.scale(*alpha),
        }
    }

    /// Number of occurrences of each variable.
    pub fn variable_occurrences(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        self.count_into(&mut counts);
        counts
    }

    fn count_into(&self, counts: &mut BTreeMap<String, usize>) {
        use OpinionExpr::*;
        match self {
            Var(name) => *counts.entry(name.clone()).or_default() += 1,
            Consensus(l, r) | LegacyDiscount(l, r) | Discount(l, r, _) | OdotDiscount(l, r, _) => {
                l.count_into(counts);
                r.count_into(counts);
            }
            Scale(_, e) => e.count_into(counts),
        }
    }

    /// Every variable occurs at most once.
    pub fn is_canonical(&self) -> bool {
        self.variable_occurrences().values().all(|&c| c <= 1)
    }
}

/// Left-associated chain `e1 ⊗ e2 ⊗ … ⊗ en` over the named variables.
pub fn otimes_chain(names: &[&str]) -> OpinionExpr {
    chain(names, |l, r| l.otimes(r))
}

/// Left-associated chain `((e1 ⊠ e2) ⊠ …) ⊠ en`.
pub fn boxtimes_chain(names: &[&str], g: GFunction) -> OpinionExpr {
    chain(names, |l, r| l.boxtimes(r, g))
}

/// Chain `e1 ⊙ e2 ⊙ … ⊙ en` (associative, built left to right).
pub fn odot_chain(names: &[&str], theta: f64) -> OpinionExpr {
    chain(names, |l, r| l.odot(r, theta))
}

fn chain(names: &[&str], join: impl Fn(OpinionExpr, OpinionExpr) -> OpinionExpr) -> OpinionExpr {
    let mut it = names.iter().map(|n| var(*n));
    let first = it.next().expect("chain needs at least one variable");
    it.fold(first, join)
}
