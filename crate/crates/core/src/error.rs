use thiserror::Error;

/// Errors produced by the opinion algebra, the trust engine and the file
/// formats around them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid evidence ({p}, {n}): masses must be finite and non-negative")]
    InvalidEvidence { p: f64, n: f64 },

    #[error(
        "invalid opinion ({b}, {d}, {u}): components must be non-negative, sum to 1 and have u > 0"
    )]
    InvalidOpinion { b: f64, d: f64, u: f64 },

    #[error("invalid scalar {0}: must be finite and non-negative")]
    InvalidScalar(f64),

    #[error("invalid evidence constant c = {0}: must be finite and positive")]
    InvalidConstant(f64),

    #[error("invalid threshold theta = {0}: must be finite and positive")]
    InvalidTheta(f64),

    #[error("positive evidence {evidence} exceeds theta = {theta}")]
    ThetaViolation { evidence: f64, theta: f64 },

    #[error("positive evidence {evidence} of entry ({row}, {col}) exceeds theta = {theta}")]
    ThetaViolationAt {
        row: usize,
        col: usize,
        evidence: f64,
        theta: f64,
    },

    #[error("theta = {theta} is below the required bound {bound} (max positive evidence times the golden ratio)")]
    ThetaBelowBound { theta: f64, bound: f64 },

    #[error("loop weight {product} reaches theta^2 = {theta_sq}; the loop solution explodes")]
    LoopExplodes { product: f64, theta_sq: f64 },

    #[error("discount function uses c = {g_c} but the engine is configured with c = {engine_c}")]
    ConstantMismatch { g_c: f64, engine_c: f64 },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("diagonal entry {0} of a direct referral matrix must be full uncertainty")]
    NonUncertainDiagonal(usize),

    #[error(
        "invalid rating {value} at ({row}, {col}): ratings lie in [0, 1] with a zero diagonal"
    )]
    InvalidRating { row: usize, col: usize, value: f64 },

    #[error("invalid flow configuration: {0}")]
    InvalidFlowConfig(String),

    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot split {nodes} nodes into {k} clusters")]
    ClusterCount { k: usize, nodes: usize },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
