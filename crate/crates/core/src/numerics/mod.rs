//! Exact arithmetic: the [`Rat`] scalar and an exact simplex solver.

mod lp;
mod rat;

pub use lp::{lp_solve, Constraint, LinearProgram, LpResult, LpStatus, Relation};
pub use rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericsError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("malformed linear program: {0}")]
    MalformedLp(String),
    #[error("solver self-check failed: {0}")]
    Verification(String),
}
