use thiserror::Error;

/// Errors produced by the algebra kernel and the solvers built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected} degrees of freedom, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("basis mismatch: cannot combine {left} and {right} polynomials")]
    BasisMismatch { left: &'static str, right: &'static str },

    #[error("unknown variable index {index} for {n} degrees of freedom")]
    UnknownVariable { index: usize, n: usize },

    #[error("substitution image for variable {index} has a constant term")]
    ConstantImage { index: usize },

    #[error("expected a homogeneous polynomial of degree {expected}, found a term of degree {found}")]
    NotHomogeneous { expected: usize, found: usize },

    #[error("polynomial has a nonzero kernel component")]
    KernelComponent,

    #[error("truncation degree must be at least 3, got {0}")]
    DegreeTooLow(usize),

    #[error("quadratic part does not match the oscillator with the given frequencies: {0}")]
    QuadraticMismatch(String),

    #[error("not in normal form at degree {degree}: offending monomial {monomial}")]
    NotNormalForm { degree: usize, monomial: String },

    #[error("invalid choice at degree {degree}: {reason}")]
    InvalidChoice { degree: usize, reason: String },

    #[error("generating function kind mismatch: {0}")]
    WrongKind(String),

    #[error("frequency vector must have nonzero entries")]
    ZeroFrequency,

    #[error("division by zero")]
    DivisionByZero,

    #[error("potential depends on momenta")]
    MomentumDependence,

    #[error("symbolic parameters present where numeric coefficients are required")]
    SymbolicParameters,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
