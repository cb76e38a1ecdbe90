use thiserror::Error;

/// Errors raised while building or solving a polynomial eigenproblem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("a matrix polynomial needs at least two coefficients (degree >= 1)")]
    DegreeTooSmall,

    #[error("coefficient {index} is {rows}x{cols}, expected {n}x{n}")]
    DimensionMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },

    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("leading coefficient A_d is the zero matrix")]
    ZeroLeadingCoefficient,

    #[error("coefficient {index} has a nonzero entry at ({row}, {col}) outside the {structure} pattern")]
    StructureViolation {
        index: usize,
        row: usize,
        col: usize,
        structure: &'static str,
    },

    #[error("scalar structure requires n = 1, got n = {0}")]
    ScalarDimension(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("numeric overflow while evaluating {0}")]
    NumericRange(&'static str),

    #[error("constant polynomial has no roots")]
    ConstantPolynomial,

    #[error("matrix polynomial is possibly non-regular: every quadratic form vanishes")]
    PossiblyNonRegular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
