use crate::mdp::{StateId, ValidationReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid MDP:\n{0}")]
    InvalidMdp(ValidationReport),

    #[error("unknown state `{0}`")]
    UnknownState(StateId),

    #[error("duplicate state `{0}`")]
    DuplicateState(StateId),

    #[error("strategy undefined on reachable controller state `{0}`")]
    StrategyUndefined(StateId),

    #[error("strategy moves from `{from}` to `{to}`, which is not a successor")]
    StrategyViolation { from: StateId, to: StateId },

    #[error("value iteration did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: u64, residual: f64 },

    #[error("inconsistent values at `{state}`: rescaled distribution sums to {sum}")]
    InconsistentValues { state: StateId, sum: String },

    #[error("precondition violated at `{state}`: {reason}")]
    Precondition { state: StateId, reason: String },

    #[error("radius cap {radius} reached with gap {gap}")]
    RadiusCapReached { radius: usize, gap: f64 },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid lasso: {0}")]
    InvalidLasso(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),

    #[error("futility bound is zero at anchor mode `{mode}`")]
    ZeroBound { mode: String },

    #[error("exploration limit of {0} states exceeded")]
    ExplorationLimit(usize),

    #[error("internal error: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
