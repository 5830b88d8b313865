//! Evidence-based subjective logic.
//!
//! Opinions `(b, d, u)` are kept in one-to-one correspondence with amounts of
//! positive and negative evidence. Trust propagates through a network by a
//! fixed-point iteration whose discounting operator scales evidence instead
//! of multiplying opinions, so evidence is never counted twice and the
//! iteration converges on networks with loops.
//!
//! ```
//! use ebsl::{AlgebraParams, Evidence, Opinion};
//!
//! let params = AlgebraParams::default();
//! let x = Opinion::from_evidence(Evidence::new(8.0, 2.0).unwrap(), params);
//! assert!((x.belief() - 8.0 / 12.0).abs() < 1e-15);
//! ```

pub mod compare;
pub mod engine;
pub mod error;
pub mod expr;
pub mod flow;
pub mod ingest;
pub mod matrix;
pub mod opinion;
pub mod render;
pub mod scenario;

pub use compare::{compare, CompareInput, CompareOptions, CompareReport, Method, ThetaChoice};
pub use engine::{
    functional_trust, naive_sl_solve, solve_referral, theta_bound, ConvergenceReport, EngineConfig,
    FunctionalTrustInput,
};
pub use error::{Error, Result};
pub use expr::{var, Bindings, OpinionExpr};
pub use ingest::{EvidenceMatrix, InteractionRecord};
pub use matrix::OpinionMatrix;
pub use opinion::{AlgebraParams, Evidence, GFunction, Opinion};
pub use render::{RenderMode, RenderSpec};
