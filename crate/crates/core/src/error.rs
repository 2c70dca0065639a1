use thiserror::Error;

/// Errors raised by the symbolic and numerical layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("axis {axis} out of range for ambient dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("expression is not exactly divisible by the last coordinate")]
    NotDivisible,

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("polynomial is not even in the last variable")]
    OddParity,

    #[error("linear system is singular")]
    SingularSystem,

    #[error("inversion chain level {level} is degenerate (recursion constant vanishes)")]
    DegenerateLevel { level: usize },

    #[error("image is not a constant multiple of the expected power: {0}")]
    NonconstantRemainder(String),

    #[error("inadmissible base after inversion: {0}")]
    InadmissibleBase(String),

    #[error("poor asymptotic fit: remainder order {estimate:.3} below required {required:.3}")]
    PoorFit { estimate: f64, required: f64 },

    #[error("limit did not converge: {0}")]
    NonConvergentLimit(String),

    #[error("integrability test inconclusive: {0}")]
    Inconclusive(String),

    #[error("premise (-L)^{k} f >= 0 violated at radius {radius}")]
    PremiseViolated { k: usize, radius: f64 },

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
