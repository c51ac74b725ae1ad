use std::fmt;

use thiserror::Error;

/// Machine-readable code attached to each failed admissibility rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    NonpositiveMaturity,
    NonfiniteStrike,
    NonfiniteSpot,
    NonpositiveStrike,
    NonpositiveSpot,
    NonfiniteParameter,
    InvalidFactors,
    ZeroSteps,
    NoArbitrageViolated,
    NonpositiveVolatility,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::NonpositiveMaturity => "NONPOSITIVE_MATURITY",
            ViolationCode::NonfiniteStrike => "NONFINITE_STRIKE",
            ViolationCode::NonfiniteSpot => "NONFINITE_SPOT",
            ViolationCode::NonpositiveStrike => "NONPOSITIVE_STRIKE",
            ViolationCode::NonpositiveSpot => "NONPOSITIVE_SPOT",
            ViolationCode::NonfiniteParameter => "NONFINITE_PARAMETER",
            ViolationCode::InvalidFactors => "INVALID_FACTORS",
            ViolationCode::ZeroSteps => "ZERO_STEPS",
            ViolationCode::NoArbitrageViolated => "NO_ARBITRAGE_VIOLATED",
            ViolationCode::NonpositiveVolatility => "NONPOSITIVE_VOLATILITY",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One violated invariant of an (option, model) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Error)]
pub enum PricingError {
    #[error("invalid inputs: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown check `{name}`; valid checks: {}", .valid.join(", "))]
    UnknownCheck { name: String, valid: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl PricingError {
    pub fn code(&self) -> &'static str {
        match self {
            PricingError::Validation(_) => "VALIDATION",
            PricingError::Domain(_) => "DOMAIN",
            PricingError::Numeric(_) => "NUMERIC",
            PricingError::Unsupported(_) => "UNSUPPORTED",
            PricingError::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            PricingError::UnknownCheck { .. } => "UNKNOWN_CHECK",
            PricingError::Io(_) => "IO",
            PricingError::Csv(_) => "CSV",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        PricingError::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        PricingError::Numeric(msg.into())
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, PricingError>;
