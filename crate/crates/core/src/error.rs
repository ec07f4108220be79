use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("boundary weights are all zero")]
    AllZero,
    #[error("pure Dirichlet boundary (a0, b0, c0) = (1, 0, 0) is not a Brownian motion on the closed half-line")]
    PureDirichlet,
    #[error("boundary weight {name} = {value} must be finite and non-negative")]
    NegativeWeight { name: &'static str, value: f64 },
    #[error("parameter {name} = {value} is out of range")]
    BadParameter { name: &'static str, value: f64 },
    #[error("start point {0} must be non-negative")]
    NegativeStart(f64),
    #[error("start point {start} is outside the state space {space}")]
    StartOutOfRange { start: f64, space: &'static str },
    #[error("time grid needs t_max > 0 and n_steps >= 1 (got t_max = {t_max}, n_steps = {n_steps})")]
    BadGrid { t_max: f64, n_steps: usize },
    #[error("downcrossing width must be positive, got {0}")]
    BadEps(f64),
    #[error("functional decreases at index {index}: not an additive functional")]
    NotAdditiveFunctional { index: usize },
    #[error("array length {got} does not match grid length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("boundary system is singular (|det| = {det:e})")]
    SingularSystem { det: f64 },
    #[error("grid too short: truncation bound {bound:e} exceeds {limit:e}")]
    GridTooShort { bound: f64, limit: f64 },
    #[error("{path}: {cause}")]
    Io { path: String, cause: String },
    #[error("malformed data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
