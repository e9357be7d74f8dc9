//! Crate-wide error type with stable, machine-readable names.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the library. `Error::name` is a stable identifier
/// used by the CLI for exit-code mapping and by scripts that parse stderr.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("no {degree}-th root of {value} is available on this backend{hint}", hint = if *suggest_complex { "; retry with the complex backend" } else { "" })]
    RootUnavailable {
        value: String,
        degree: i64,
        suggest_complex: bool,
    },

    #[error("division by zero series or scalar")]
    ZeroDivisor,

    #[error("variable mismatch: {0} vs {1}")]
    VariableMismatch(&'static str, &'static str),

    #[error("series order is indeterminate: no known terms inside the exactness window")]
    IndeterminateOrder,

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("slope violation: {0}")]
    SlopeViolation(String),

    #[error("the zero class is outside the domain of this transform")]
    ZeroClass,

    #[error("class is not irreducible for its declared ramification")]
    NotIrreducible,

    #[error("operation requires a coordinate at the other point of the disk")]
    WrongPoint,

    #[error("leading exponent is zero; no compositional inverse")]
    ZeroLeadingExponent,

    #[error("operator is not unit-leading on the window")]
    NotUnitLeading,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("exponent is not an exact rational in supported range")]
    ExponentNotRational,

    #[error("exponent denominators do not divide the declared ramification {0}")]
    RamificationMismatch(i64),

    #[error("operation requires the exact rational backend")]
    ExactBackendRequired,

    #[error("jordan size must be at least 1")]
    InvalidJordan,

    #[error("a connection object needs at least one summand")]
    EmptyConnection,

    #[error("summand {index}: {source}")]
    Summand {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn root_unavailable(value: impl ToString, degree: i64, suggest_complex: bool) -> Self {
        Error::RootUnavailable {
            value: value.to_string(),
            degree,
            suggest_complex,
        }
    }

    /// Stable error name, independent of message wording.
    pub fn name(&self) -> &'static str {
        match self {
            Error::RootUnavailable { .. } => "RootUnavailable",
            Error::ZeroDivisor => "ZeroDivisor",
            Error::VariableMismatch(..) => "VariableMismatch",
            Error::IndeterminateOrder => "IndeterminateOrder",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::SlopeViolation(_) => "SlopeViolation",
            Error::ZeroClass => "ZeroClass",
            Error::NotIrreducible => "NotIrreducible",
            Error::WrongPoint => "WrongPoint",
            Error::ZeroLeadingExponent => "ZeroLeadingExponent",
            Error::NotUnitLeading => "NotUnitLeading",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::Syntax { .. } => "SyntaxError",
            Error::ExponentNotRational => "ExponentNotRational",
            Error::RamificationMismatch(_) => "RamificationMismatch",
            Error::ExactBackendRequired => "ExactBackendRequired",
            Error::InvalidJordan => "InvalidJordan",
            Error::EmptyConnection => "EmptyConnection",
            Error::Summand { source, .. } => source.name(),
        }
    }

    /// True for errors that reflect a domain restriction rather than bad input syntax.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Syntax { .. } | Error::ExponentNotRational)
    }
}
