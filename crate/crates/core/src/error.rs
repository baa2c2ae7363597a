use thiserror::Error;

use crate::economy::AgentId;

/// Every violated bound of a parameter set, collected in one pass.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameters: {}", violations.join("; "))]
pub struct ParamError {
    pub violations: Vec<String>,
}

#[derive(Debug, Error)]
pub enum EconomyError {
    #[error("unknown account {0}")]
    UnknownAccount(AgentId),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    InvalidModel(#[from] ParamError),
    #[error("conservation violated: total distributed {total} but accounts sum to {accounts}")]
    Conservation { total: f64, accounts: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("snapshot: {0}")]
    Snapshot(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ParamError),
    #[error("ledger invariant violated at tick {tick}: {source}")]
    Ledger {
        tick: u64,
        #[source]
        source: EconomyError,
    },
}

impl SimError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, SimError::Ledger { .. })
    }
}
