//! Opinions, evidence and the operators that combine them.
//!
//! An opinion `(b, d, u)` lives on the probability simplex with strictly
//! positive uncertainty. Every opinion corresponds one-to-one to an amount of
//! evidence `(p, n)` through `(b, d, u) = (p, n, c) / (p + n + c)`, and every
//! operator here is defined so that its effect on that evidence is simple:
//! consensus adds evidence, scalar multiplication scales it, and the
//! evidence-based discounting operators scale the discounted opinion's
//! evidence by a weight derived from the discounting opinion.
//!
//! The multiplicative discounting rule of classic subjective logic is kept as
//! [`Opinion::discount_legacy`] for comparison only.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::error::{Error, Result};

/// Default evidence-to-opinion constant.
pub const DEFAULT_C: f64 = 2.0;

/// Default floor used by [`Opinion::clamped`].
pub const DEFAULT_UNCERTAINTY_FLOOR: f64 = 1e-12;

/// Tolerance on `b + d + u = 1` accepted from callers of [`Opinion::new`].
const SUM_TOLERANCE: f64 = 1e-9;

/// Parameters of the evidence/opinion mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraParams {
    c: f64,
}

impl AlgebraParams {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 {
            Ok(Self { c })
        } else {
            Err(Error::InvalidConstant(c))
        }
    }

    /// The soft evidence threshold `c`.
    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for AlgebraParams {
    fn default() -> Self {
        Self { c: DEFAULT_C }
    }
}

/// Positive and negative evidence masses about a proposition.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Evidence {
    p: f64,
    n: f64,
}

impl Evidence {
    pub const ZERO: Evidence = Evidence { p: 0.0, n: 0.0 };

    pub fn new(p: f64, n: f64) -> Result<Self> {
        let valid = |v: f64| v.is_finite() && v >= 0.0;
        if valid(p) && valid(n) && (p + n).is_finite() {
            Ok(Self { p, n })
        } else {
            Err(Error::InvalidEvidence { p, n })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// Total evidence `e = p + n`.
    pub fn total(&self) -> f64 {
        self.p + self.n
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0.0 && self.n == 0.0
    }

    /// Evidence multiplied by a non-negative factor.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidScalar(alpha));
        }
        Self::new(alpha * self.p, alpha * self.n)
    }
}

impl Add for Evidence {
    type Output = Evidence;

    fn add(self, rhs: Evidence) -> Evidence {
        Evidence {
            p: self.p + rhs.p,
            n: self.n + rhs.n,
        }
    }
}

impl AddAssign for Evidence {
    fn add_assign(&mut self, rhs: Evidence) {
        self.p += rhs.p;
        self.n += rhs.n;
    }
}

impl Sum for Evidence {
    fn sum<I: Iterator<Item = Evidence>>(iter: I) -> Evidence {
        iter.fold(Evidence::ZERO, Add::add)
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(prec) => write!(f, "({:.*}, {:.*})", prec, self.p, prec, self.n),
            None => write!(f, "({}, {})", self.p, self.n),
        }
    }
}

/// A non-dogmatic opinion `(belief, disbelief, uncertainty)`.
///
/// Invariants: `b, d >= 0`, `u > 0` and `b + d + u = 1` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Opinion {
    b: f64,
    d: f64,
    u: f64,
}

impl Opinion {
    /// Full uncertainty, the identity of consensus.
    pub const UNCERTAIN: Opinion = Opinion {
        b: 0.0,
        d: 0.0,
        u: 1.0,
    };

    /// Builds an opinion from its components. Dogmatic opinions (`u = 0`)
    /// are rejected.
    pub fn new(b: f64, d: f64, u: f64) -> Result<Self> {
        let ok = b.is_finite()
            && d.is_finite()
            && u.is_finite()
            && b >= 0.0
            && d >= 0.0
            && u > 0.0
            && (b + d + u - 1.0).abs() <= SUM_TOLERANCE;
        if ok && (b + d + u - 1.0).abs() <= 4.0 * f64::EPSILON {
            // already on the simplex up to rounding; keep the exact values
            Ok(Opinion { b, d, u })
        } else if ok {
            Ok(Self::normalized(b, d, u))
        } else {
            Err(Error::InvalidOpinion { b, d, u })
        }
    }

    /// Like [`Opinion::new`], but lifts the uncertainty to at least `floor`
    /// before renormalizing. Meant for ingesting external data that may
    /// contain dogmatic opinions.
    pub fn clamped(b: f64, d: f64, u: f64, floor: f64) -> Result<Self> {
        let finite = b.is_finite() && d.is_finite() && u.is_finite();
        if !finite || b < 0.0 || d < 0.0 || u < 0.0 || !(floor > 0.0 && floor < 1.0) {
            return Err(Error::InvalidOpinion { b, d, u });
        }
        let sum = b + d + u;
        if sum <= 0.0 {
            return Err(Error::InvalidOpinion { b, d, u });
        }
        let (b, d, u) = (b / sum, d / sum, u / sum);
        if u >= floor {
            return Ok(Self::normalized(b, d, u));
        }
        // Keep the belief/disbelief ratio, give the missing mass to u.
        let rest = 1.0 - floor;
        let bd = b + d;
        Ok(Self::normalized(rest * b / bd, rest * d / bd, floor))
    }

    /// Maps evidence to an opinion: `(p, n, c) / (p + n + c)`.
    pub fn from_evidence(ev: Evidence, params: AlgebraParams) -> Self {
        let c = params.c();
        Self::normalized(ev.p, ev.n, c)
    }

    /// Convenience for `from_evidence(Evidence::new(p, n)?, params)`.
    pub fn from_pn(p: f64, n: f64, params: AlgebraParams) -> Result<Self> {
        Ok(Self::from_evidence(Evidence::new(p, n)?, params))
    }

    /// Rescales non-negative weights onto the simplex.
    fn normalized(b: f64, d: f64, u: f64) -> Self {
        let s = b + d + u;
        debug_assert!(s > 0.0 && u > 0.0, "degenerate opinion ({b}, {d}, {u})");
        Opinion {
            b: b / s,
            d: d / s,
            u: u / s,
        }
    }

    pub fn belief(&self) -> f64 {
        self.b
    }

    pub fn disbelief(&self) -> f64 {
        self.d
    }

    pub fn uncertainty(&self) -> f64 {
        self.u
    }

    pub fn components(&self) -> [f64; 3] {
        [self.b, self.d, self.u]
    }

    /// True for exactly `(0, 0, 1)`.
    pub fn is_uncertain(&self) -> bool {
        self.b == 0.0 && self.d == 0.0
    }

    /// Positive evidence `c b / u`.
    pub fn positive_evidence(&self, params: AlgebraParams) -> f64 {
        params.c() * self.b / self.u
    }

    /// Negative evidence `c d / u`.
    pub fn negative_evidence(&self, params: AlgebraParams) -> f64 {
        params.c() * self.d / self.u
    }

    /// The evidence underlying this opinion; inverse of [`Opinion::from_evidence`].
    pub fn evidence(&self, params: AlgebraParams) -> Evidence {
        Evidence {
            p: self.positive_evidence(params),
            n: self.negative_evidence(params),
        }
    }

    /// Consensus `x ⊕ y`: the opinion formed from the sum of both evidences.
    pub fn consensus(&self, other: &Opinion) -> Opinion {
        if self.is_uncertain() {
            return *other;
        }
        if other.is_uncertain() {
            return *self;
        }
        let (x, y) = (self, other);
        let k = x.u + y.u - x.u * y.u;
        Self::normalized(
            (x.u * y.b + y.u * x.b) / k,
            (x.u * y.d + y.u * x.d) / k,
            x.u * y.u / k,
        )
    }

    /// Scalar multiplication `α·x`: scales the underlying evidence by `α`.
    pub fn scale(&self, alpha: f64) -> Result<Opinion> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidScalar(alpha));
        }
        Ok(self.scale_unchecked(alpha))
    }

    pub(crate) fn scale_unchecked(&self, alpha: f64) -> Opinion {
        if alpha == 0.0 || self.is_uncertain() {
            return Opinion::UNCERTAIN;
        }
        Self::normalized(alpha * self.b, alpha * self.d, self.u)
    }

    /// Classic multiplicative discounting `x ⊗ y`.
    ///
    /// Does not correspond to any clean operation on evidence; provided as a
    /// baseline.
    pub fn discount_legacy(&self, other: &Opinion) -> Opinion {
        let (x, y) = (self, other);
        Self::normalized(x.b * y.b, x.b * y.d, x.d + x.u + x.b * y.u)
    }

    /// Evidence-based discounting `x ⊠ y = g(x)·y`.
    pub fn discount(&self, other: &Opinion, g: &GFunction) -> Result<Opinion> {
        Ok(other.scale_unchecked(g.evaluate(self)?))
    }

    /// Discounting with the evidence-proportional weight `p(x)/θ`.
    pub fn discount_odot(
        &self,
        other: &Opinion,
        theta: f64,
        params: AlgebraParams,
    ) -> Result<Opinion> {
        self.discount(other, &GFunction::evidence_over_theta(theta, params)?)
    }

    /// L1 distance between the component vectors.
    pub fn distance(&self, other: &Opinion) -> f64 {
        (self.b - other.b).abs() + (self.d - other.d).abs() + (self.u - other.u).abs()
    }
}

impl Default for Opinion {
    fn default() -> Self {
        Opinion::UNCERTAIN
    }
}

impl Add for Opinion {
    type Output = Opinion;

    fn add(self, rhs: Opinion) -> Opinion {
        self.consensus(&rhs)
    }
}

/// Left-to-right consensus fold; empty input gives full uncertainty.
impl Sum for Opinion {
    fn sum<I: Iterator<Item = Opinion>>(iter: I) -> Opinion {
        iter.fold(Opinion::UNCERTAIN, |acc, x| acc.consensus(&x))
    }
}

impl fmt::Display for Opinion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(3);
        write!(
            f,
            "({:.*}, {:.*}, {:.*})",
            prec, self.b, prec, self.d, prec, self.u
        )
    }
}

/// The weight function of evidence-based discounting.
///
/// A closed set: new weight functions are added as variants so that range
/// checks and linearity remain explicit. Every variant maps full uncertainty
/// to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GFunction {
    /// `g(x) = x_b`
    Belief,
    /// `g(x) = sqrt(x_b)`
    SqrtBelief,
    /// `g(x) = p(x) / θ`, defined only while `p(x) <= θ`. Linear in evidence.
    EvidenceOverTheta { theta: f64, c: f64 },
}

impl GFunction {
    pub fn evidence_over_theta(theta: f64, params: AlgebraParams) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(GFunction::EvidenceOverTheta {
            theta,
            c: params.c(),
        })
    }

    pub fn evaluate(&self, x: &Opinion) -> Result<f64> {
        match *self {
            GFunction::Belief => Ok(x.b),
            GFunction::SqrtBelief => Ok(x.b.sqrt()),
            GFunction::EvidenceOverTheta { theta, c } => {
                let p = c * x.b / x.u;
                if p > theta {
                    Err(Error::ThetaViolation { evidence: p, theta })
                } else {
                    Ok(p / theta)
                }
            }
        }
    }

    /// The threshold of the evidence-proportional weight, if any.
    pub fn theta(&self) -> Option<f64> {
        match *self {
            GFunction::EvidenceOverTheta { theta, .. } => Some(theta),
            _ => None,
        }
    }

    /// Short name used on the command line and in reports.
    pub fn name(&self) -> &'static str {
        match self {
            GFunction::Belief => "xb",
            GFunction::SqrtBelief => "sqrt-xb",
            GFunction::EvidenceOverTheta { .. } => "odot",
        }
    }
}
