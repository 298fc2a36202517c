use std::fmt;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// An argument was required to be square-free and is not.
    NotSquareFree(u64),
    /// A range argument is empty or inverted.
    InvalidRange {
        lo: u64,
        hi: u64,
    },
    /// A form does not have the expected discriminant.
    DiscriminantMismatch {
        expected: i64,
        found: i64,
    },
    /// A form coefficient violates positive-definiteness (`a <= 0`).
    NotPositiveDefinite,
    /// The discriminant is not a negative fundamental discriminant.
    NotFundamental(i64),
    /// An argument was required to be an odd prime and is not.
    NotOddPrime(u64),
    /// Two arguments were required to be coprime and are not.
    NotCoprime {
        a: u64,
        b: u64,
        context: &'static str,
    },
    /// A lattice basis is degenerate (zero determinant).
    DegenerateBasis,
    /// A numeric parameter is outside its documented domain.
    InvalidParameter(String),
    /// An enumeration exceeded its configured work budget.
    WorkBudgetExceeded {
        spent: u64,
        budget: u64,
    },
    /// An intermediate value exceeded 128-bit integer range.
    Overflow(&'static str),
    /// A table does not cover the requested range, or has missing rows.
    CoverageGap(String),
    /// Too few or degenerate points for a least-squares fit.
    DegenerateFit(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquareFree(d) => write!(f, "{d} is not square-free"),
            Error::InvalidRange { lo, hi } => write!(f, "invalid range [{lo}, {hi})"),
            Error::DiscriminantMismatch { expected, found } => {
                write!(
                    f,
                    "discriminant mismatch: expected {expected}, found {found}"
                )
            }
            Error::NotPositiveDefinite => write!(f, "form is not positive definite (a <= 0)"),
            Error::NotFundamental(delta) => {
                write!(f, "{delta} is not a negative fundamental discriminant")
            }
            Error::NotOddPrime(g) => write!(f, "{g} is not an odd prime"),
            Error::NotCoprime { a, b, context } => {
                write!(f, "{a} and {b} are not coprime ({context})")
            }
            Error::DegenerateBasis => write!(f, "degenerate lattice basis"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::WorkBudgetExceeded { spent, budget } => {
                write!(
                    f,
                    "work budget exceeded: {spent} units spent, budget {budget}"
                )
            }
            Error::Overflow(what) => write!(f, "integer overflow in {what}"),
            Error::CoverageGap(msg) => write!(f, "table coverage gap: {msg}"),
            Error::DegenerateFit(msg) => write!(f, "degenerate fit: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
