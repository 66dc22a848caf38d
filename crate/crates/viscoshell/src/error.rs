use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate chart at y = ({y1}, {y2}): tangent vectors are (nearly) parallel")]
    DegenerateChart { y1: f64, y2: f64 },

    #[error("epsilon {eps} too large: det(g1, g2, g3) = {det} <= 0 at x = {x:?}")]
    EpsilonTooLarge { eps: f64, det: f64, x: [f64; 3] },

    #[error("the elastic case theta_v = 0 is not supported by the limit model")]
    ElasticCaseUnsupported,

    #[error("invalid material parameter {name} = {value}")]
    InvalidMaterial { name: &'static str, value: f64 },

    #[error("step matrix is not positive definite; reduce the time step (dt = {dt})")]
    IndefiniteSystem { dt: f64 },

    #[error("sparse factorization failed: {0}")]
    SolverFailure(String),

    #[error("field is identically zero")]
    ZeroField,

    #[error("field does not vanish on the clamped boundary (max |v| = {0})")]
    BoundaryViolation(f64),

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
