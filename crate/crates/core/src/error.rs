use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChowError {
    #[error("zero polynomial has no leading term")]
    ZeroPolynomial,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("division is not exact")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("degree {degree} exceeds homogenization target {target}")]
    DegreeExceedsTarget { degree: u32, target: u32 },
    #[error("a denominator vanishes modulo {p}")]
    NotPAdmissible { p: u64 },
    #[error("chow form is not in normal position")]
    NotNormalPosition,
    #[error("duplicate point in input")]
    DuplicatePoint,
    #[error("leading coefficient in the main variable is zero")]
    ZeroLeadingCoefficient,
    #[error("undefined at {location}")]
    Undefined { location: String },
    #[error("degenerate choice of alpha")]
    DegenerateAlpha,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("retries exhausted after {attempts} attempts; last failure: {last}")]
    RetriesExhausted { attempts: usize, last: String },
    #[error("p = 2 is not supported")]
    EvenPrime,
    #[error("{0} is not an odd prime below 2^61")]
    InvalidModulus(u64),
    #[error("unknown bound kind `{0}`")]
    UnknownKind(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown sweep parameter `{0}`")]
    UnknownParam(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("variable order mismatch: {0}")]
    OrderMismatch(String),
}

impl ChowError {
    pub fn undefined(location: impl Into<String>) -> Self {
        ChowError::Undefined {
            location: location.into(),
        }
    }

    /// Wraps algebraic failures of a subroutine as `Undefined` at `location`.
    pub fn at(self, location: &str) -> Self {
        match self {
            ChowError::Undefined { location: inner } => ChowError::Undefined {
                location: format!("{location}/{inner}"),
            },
            ChowError::BothZero
            | ChowError::NotDivisible
            | ChowError::DivisionByZero
            | ChowError::ZeroPolynomial
            | ChowError::ZeroLeadingCoefficient
            | ChowError::NotNormalPosition
            | ChowError::DegreeExceedsTarget { .. } => ChowError::Undefined {
                location: format!("{location}: {self}"),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, ChowError>;
