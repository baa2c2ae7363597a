//! File formats for simulation output.

use serde::Serialize;

use crate::format::{csv_real, to_json_string};
use crate::sim::{RunResult, SimConfig, TickRecord};

pub const TICK_CSV_HEADER: &str =
    "tick,active_honest,reporters,participation,reports_rewarded,unit_value,total_distributed,mean_utility";

pub fn tick_csv_row(r: &TickRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.tick,
        r.active_honest,
        r.reporters,
        csv_real(r.participation),
        r.reports_rewarded,
        csv_real(r.unit_value_snapshot),
        csv_real(r.total_distributed),
        csv_real(r.mean_agent_utility),
    )
}

/// Header plus one row per tick, newline-terminated.
pub fn tick_csv(records: &[TickRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TICK_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&tick_csv_row(r));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct RunSummary<'a> {
    pub config: &'a SimConfig,
    pub collapse_tick: Option<u64>,
    pub final_total_distributed: f64,
    pub final_participation: f64,
}

impl<'a> RunSummary<'a> {
    pub fn new(config: &'a SimConfig, result: &RunResult) -> Self {
        Self {
            config,
            collapse_tick: result.collapse_tick,
            final_total_distributed: result.final_ledger.total_distributed(),
            final_participation: result.records.last().map_or(0.0, |r| r.participation),
        }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self).expect("summary contains only finite reals and plain data")
    }
}
