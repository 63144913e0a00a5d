use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at column {}: {message}", .position + 1)]
    Syntax { position: usize, message: String },
    #[error("derivative index {index} at column {} is outside 1..={dim}", .position + 1)]
    IndexOutOfRange { position: usize, index: u64, dim: usize },
    #[error("exponent {exponent} at column {} is outside {min}..={max}", .position + 1)]
    ExponentOutOfRange { position: usize, exponent: u64, min: u32, max: u32 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator is identically zero after merging like terms")]
    EmptyOperator,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("operators do not share a positive homogeneity pattern")]
    NoCommonPattern,
    #[error("derivative set has mixed parity of degree; rank-one vectors are not real")]
    MixedParity,
    #[error("grid size {size} on axis {axis} is too small (need at least {needed})")]
    GridTooSmall { axis: usize, size: usize, needed: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("all denominators vanish after {attempts} randomized starts")]
    DegenerateStart { attempts: usize },
    #[error("laminate frequency too low: axis {axis} holds no full period inside the flat region")]
    LaminateTooCoarse { axis: usize },
    #[error("point lies on the singular axis x1 = x2 = x3 = 0")]
    SingularAxis,
    #[error("linear program is infeasible (max constraint violation {violation:e})")]
    LpInfeasible { violation: f64 },
    #[error("linear program is unbounded below")]
    LpUnbounded,
    #[error("simplex iteration limit {0} reached")]
    LpIterationLimit(usize),
}
