use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("degree vector has length {got}, expected {expected}")]
    DegreeLength { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("generator {0} does not exist in the shifted Yangian")]
    NoSuchGenerator(String),

    #[error("series inverse requires constant term 1, found {0}")]
    SeriesConstantTerm(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("no generic specialization found after {0} draws")]
    GenericityExhausted(u32),

    #[error("interpolation nodes coincide (non-generic specialization)")]
    CoincidentNodes,

    #[error("generating series is not polynomial: {0}")]
    NotPolynomial(String),

    #[error("weight vectors live in different degrees {left:?} and {right:?}")]
    DegreeMismatch { left: Vec<u32>, right: Vec<u32> },

    #[error("Whittaker system at degree {degree:?} is {reason}")]
    WhittakerSystem { degree: Vec<u32>, reason: String },

    #[error("Shapovalov recursion has no admissible path to pattern {0}")]
    ShapovalovBlocked(String),

    #[error("degenerate Gram at level {0}")]
    DegenerateGram(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
