//! Credit-based incentives for voluntary comment reviewing.
//!
//! A rational honest user who receives a comment can read it, read and
//! report it, or discard it. Reporting pays in platform credits, and this
//! crate models what happens when those credits lose value: through
//! platform-wide inflation, per-user diminishing revenue, or a hard cap.
//!
//! * [`decision`] evaluates the three strategies and the reporting threshold.
//! * [`economy`] keeps the credit ledger and the unit-value regimes.
//! * [`sim`] runs a seeded, deterministic population of reviewers.
//! * [`analysis`] gives the closed-form predictions and parameter sweeps.
//! * [`report`] and [`format`] define the CSV and JSON outputs.

pub mod analysis;
pub mod decision;
pub mod economy;
pub mod error;
pub mod exact;
pub mod format;
pub mod report;
pub mod sim;

pub use decision::{
    choose_strategy, threshold_unit_value, utility_read_only, utility_report, ModelParams, Strategy, UtilityTriple,
};
pub use economy::{marginal_revenue, AgentAccount, AgentId, CreditLedger, Grant, RevenueModel, SubmodularValuation};
pub use error::{EconomyError, ParamError, SimError};
pub use sim::{run, RunResult, SimConfig, TickRecord, WorldState};
