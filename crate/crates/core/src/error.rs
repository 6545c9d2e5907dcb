use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports.
///
/// Variants from [`Error::GuaranteeViolated`] down are falsification reports:
/// a checked mathematical claim failed on a concrete input. They are never
/// produced by bad input alone; see [`Error::is_falsification`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("item {item} out of range for {m} items")]
    IndexOutOfRange { item: usize, m: usize },
    #[error("too large for exhaustive computation: {0}")]
    TooLarge(String),
    #[error("parameters too large: {0}")]
    ParameterTooLarge(String),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("invalid valuation: {0}")]
    InvalidValuation(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not XOS: {0}")]
    NotXos(String),
    #[error("JSON: {0}")]
    Json(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("agent {agent}: illegal bid: {reason}")]
    IllegalBid { agent: usize, reason: String },
    #[error("agent {agent}: illegal selection: {reason}")]
    IllegalSelection { agent: usize, reason: String },
    #[error("agent {agent}: strategy failed in round {round}: no acceptable bundle remains")]
    StrategyFailed { agent: usize, round: usize },
    #[error("bundle cannot be split: {0}")]
    Unsplittable(String),
    #[error("step budget of {0} replacement steps exhausted")]
    StepBudgetExhausted(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("guarantee violated: {0}")]
    GuaranteeViolated(String),
    #[error("share relation violated: {0}")]
    RelationViolated(String),
    #[error("theorem violated: {0}")]
    TheoremViolated(String),
    #[error("lemma violated: {0}")]
    LemmaViolated(String),
    #[error("bound violated: {0}")]
    BoundViolated(String),
}

impl Error {
    /// True when the error reports a failed mathematical claim rather than
    /// bad input or resource limits.
    pub fn is_falsification(&self) -> bool {
        matches!(
            self,
            Error::GuaranteeViolated(_)
                | Error::RelationViolated(_)
                | Error::TheoremViolated(_)
                | Error::LemmaViolated(_)
                | Error::BoundViolated(_)
                | Error::StepBudgetExhausted(_)
                | Error::Numerics(NumericsError::Verification(_))
        )
    }
}
