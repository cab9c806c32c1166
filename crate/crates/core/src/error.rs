//! Error types shared by all modules.

use alloc::string::String;

/// Errors produced by construction, parsing and evaluation.
///
/// Evaluation keeps a hard distinction between *domain* problems (the input
/// is outside the contract and is rejected up front) and *pole/divergence*
/// problems discovered while summing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Invalid precision or truncation configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Text does not match the scalar grammar.
    #[error("cannot parse scalar from `{0}`")]
    Parse(String),

    /// Gamma evaluated at a nonpositive integer. Carries the nearest
    /// nonpositive integer and the factor that hit it.
    #[error("gamma pole at {nearest} in {factor}")]
    Pole { nearest: i64, factor: String },

    /// A gamma-ratio limit does not exist because one of the shifted
    /// arguments lands exactly on zero.
    #[error("gamma ratio has no finite limit: {0}")]
    RatioPole(String),

    /// Input rejected by a domain guard (e.g. a Pochhammer denominator
    /// vanishes within the truncation range).
    #[error("domain error: {0}")]
    Domain(String),

    /// A lower series parameter is a nonpositive integer without a
    /// terminating escape.
    #[error("series parameter pole: {0}")]
    DomainPole(String),

    /// Series terms stopped decreasing before the truncation budget ran out.
    #[error("series did not converge: {0}")]
    Divergence(String),

    /// Invalid arithmetic operation (division by zero, non-finite result).
    #[error("numeric error: {0}")]
    Numeric(String),
}
