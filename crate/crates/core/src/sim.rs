//! Deterministic discrete-time world of honest reviewers.
//!
//! Each tick runs in a fixed order:
//!
//! 1. new users arrive through a fractional accumulator and receive the
//!    initial grant;
//! 2. every agent's unit value is snapshotted, so grants made during the
//!    tick only affect decisions from the next tick on;
//! 3. agents act in ascending id order, `m` comments each. An agent decides
//!    on expected utilities but is charged realized costs;
//! 4. a [`TickRecord`] is emitted and ledger conservation is verified.
//!
//! Randomness comes from ChaCha8 seeded with the config seed. Every comment
//! consumes exactly four uniforms in `[0, 1)`, in this order: noise trigger,
//! noisy strategy pick, maliciousness, administrator processing. A uniform is
//! the top 53 bits of the next `u64` scaled by `2^-53`.

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decision::{choose_strategy, ModelParams, Strategy};
use crate::economy::{AgentId, CreditLedger, Grant, RevenueModel};
use crate::error::{ParamError, SimError};

fn default_comments() -> u32 {
    1
}
fn default_admin_prob() -> f64 {
    1.0
}
fn default_collapse_epsilon() -> f64 {
    0.01
}
fn default_collapse_window() -> u64 {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub params: ModelParams,
    pub revenue: RevenueModel,
    pub initial_honest_users: u32,
    #[serde(default = "default_comments")]
    pub comments_per_user_per_tick: u32,
    #[serde(default)]
    pub new_users_per_tick: f64,
    #[serde(default)]
    pub initial_grant: f64,
    /// Probability that a submitted valid report is processed and rewarded.
    #[serde(default = "default_admin_prob")]
    pub admin_validity_prob: f64,
    /// Probability that an agent ignores the rational rule for a comment and
    /// picks read-only or report uniformly.
    #[serde(default)]
    pub epsilon_noise: f64,
    pub horizon: u64,
    pub seed: u64,
    #[serde(default = "default_collapse_epsilon")]
    pub collapse_epsilon: f64,
    #[serde(default = "default_collapse_window")]
    pub collapse_window: u64,
}

impl SimConfig {
    /// A config with every optional knob at its default.
    pub fn new(params: ModelParams, revenue: RevenueModel, initial_honest_users: u32, horizon: u64, seed: u64) -> Self {
        Self {
            params,
            revenue,
            initial_honest_users,
            comments_per_user_per_tick: default_comments(),
            new_users_per_tick: 0.0,
            initial_grant: 0.0,
            admin_validity_prob: default_admin_prob(),
            epsilon_noise: 0.0,
            horizon,
            seed,
            collapse_epsilon: default_collapse_epsilon(),
            collapse_window: default_collapse_window(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let mut v = self.params.violations();
        v.extend(self.revenue.violations());
        if self.initial_honest_users == 0 {
            v.push("initial_honest_users must be >= 1".into());
        }
        if self.comments_per_user_per_tick == 0 {
            v.push("comments_per_user_per_tick must be >= 1".into());
        }
        if !(self.new_users_per_tick.is_finite() && self.new_users_per_tick >= 0.0) {
            v.push(format!("new_users_per_tick must be finite and >= 0 (got {})", self.new_users_per_tick));
        }
        if !(self.initial_grant.is_finite() && self.initial_grant >= 0.0) {
            v.push(format!("initial_grant must be finite and >= 0 (got {})", self.initial_grant));
        }
        for (name, x) in [("admin_validity_prob", self.admin_validity_prob), ("epsilon_noise", self.epsilon_noise)] {
            if !(0.0..=1.0).contains(&x) {
                v.push(format!("{name} must lie in [0, 1] (got {x})"));
            }
        }
        if self.horizon == 0 {
            v.push("horizon must be >= 1".into());
        }
        if !(self.collapse_epsilon > 0.0 && self.collapse_epsilon < 1.0) {
            v.push(format!("collapse_epsilon must lie in (0, 1) (got {})", self.collapse_epsilon));
        }
        if self.collapse_window == 0 {
            v.push("collapse_window must be >= 1".into());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ParamError { violations: v })
        }
    }

    /// Parameters agents decide with: the expected grant per report is
    /// `q * r`, so admin rejection is a rescaling of `r`.
    pub fn decision_params(&self) -> ModelParams {
        self.params.with_reward(self.params.r * self.admin_validity_prob)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub tick: u64,
    pub active_honest: u64,
    /// Agents that chose to report at least one of their comments.
    pub reporters: u64,
    pub reports_rewarded: u64,
    pub participation: f64,
    /// Mean decision unit value over agents at the tick-start snapshot.
    pub unit_value_snapshot: f64,
    /// `N` at the end of the tick.
    pub total_distributed: f64,
    /// `N` at the snapshot, after arrivals and before any grant.
    pub snapshot_total: f64,
    /// Realized utility per agent this tick.
    pub mean_agent_utility: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub records: Vec<TickRecord>,
    pub collapse_tick: Option<u64>,
    pub final_ledger: CreditLedger,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    config: SimConfig,
    decision_params: ModelParams,
    ledger: CreditLedger,
    rng: ChaCha8Rng,
    tick: u64,
    arrival_carry: f64,
}

impl WorldState {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let mut ledger = CreditLedger::new(config.revenue, config.initial_grant)
            .map_err(|source| SimError::Ledger { tick: 0, source })?;
        for _ in 0..config.initial_honest_users {
            ledger.register_user();
        }
        Ok(Self {
            decision_params: config.decision_params(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            ledger,
            tick: 0,
            arrival_carry: 0.0,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn ledger(&self) -> &CreditLedger {
        &self.ledger
    }

    /// Index of the next tick to run.
    pub fn current_tick(&self) -> u64 {
        self.tick
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Advances one tick.
    pub fn step(&mut self) -> Result<TickRecord, SimError> {
        self.step_observed(|_, _| {})
    }

    /// Advances one tick, passing every report grant to `on_grant` as it
    /// is made.
    pub fn step_observed(&mut self, mut on_grant: impl FnMut(AgentId, &Grant)) -> Result<TickRecord, SimError> {
        let tick = self.tick;
        let ledger_err = |source| SimError::Ledger { tick, source };

        self.arrival_carry += self.config.new_users_per_tick;
        let spawned = self.arrival_carry.floor();
        self.arrival_carry -= spawned;
        for _ in 0..spawned as u64 {
            self.ledger.register_user();
        }

        let r = self.config.params.r;
        let snapshot_total = self.ledger.total_distributed();
        let unit_values: Vec<f64> = self
            .ledger
            .accounts()
            .iter()
            .map(|a| self.ledger.model.decision_unit_value(snapshot_total, a, r))
            .collect();

        let ModelParams { c_r, p, c_p, c_w, .. } = self.config.params;
        let (eps, q, m) = (self.config.epsilon_noise, self.config.admin_validity_prob, self.config.comments_per_user_per_tick);
        let mut reporters = 0u64;
        let mut rewarded = 0u64;
        let mut utility = 0.0;

        for (i, &value) in unit_values.iter().enumerate() {
            let id = AgentId(i as u32);
            let rational = choose_strategy(&self.decision_params, value);
            let mut reported = false;
            for _ in 0..m {
                let noise = self.uniform();
                let pick = self.uniform();
                let malicious = self.uniform() < p;
                let processed = self.uniform() < q;

                let strategy = if noise < eps {
                    if pick < 0.5 {
                        Strategy::ReadOnly
                    } else {
                        Strategy::ReadAndReport
                    }
                } else {
                    rational
                };
                if !strategy.reads() {
                    continue;
                }
                utility -= c_r;
                if malicious {
                    utility -= c_p;
                }
                if strategy == Strategy::ReadAndReport {
                    reported = true;
                    if malicious {
                        utility -= c_w;
                        if processed {
                            let grant = self.ledger.grant_for_report(id, r).map_err(ledger_err)?;
                            on_grant(id, &grant);
                            utility += grant.revenue_delta;
                            rewarded += 1;
                        }
                    }
                }
            }
            reporters += reported as u64;
        }

        self.ledger.check_conservation().map_err(ledger_err)?;

        let active = unit_values.len() as u64;
        let record = TickRecord {
            tick,
            active_honest: active,
            reporters,
            reports_rewarded: rewarded,
            participation: reporters as f64 / active as f64,
            unit_value_snapshot: unit_values.iter().sum::<f64>() / active as f64,
            total_distributed: self.ledger.total_distributed(),
            snapshot_total,
            mean_agent_utility: utility / active as f64,
        };
        self.tick += 1;
        Ok(record)
    }

    pub fn into_ledger(self) -> CreditLedger {
        self.ledger
    }
}

/// First tick opening a full window of `window` ticks whose participation
/// is below `epsilon`. Windows running past the last record do not count.
pub fn detect_collapse(records: &[TickRecord], epsilon: f64, window: u64) -> Option<u64> {
    let window = window as usize;
    if window == 0 || records.len() < window {
        return None;
    }
    let mut run = 0usize;
    for (i, rec) in records.iter().enumerate() {
        if rec.participation < epsilon {
            run += 1;
            if run == window {
                return Some(records[i + 1 - window].tick);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Runs the configured horizon from a fresh world.
pub fn run(config: &SimConfig) -> Result<RunResult, SimError> {
    let mut world = WorldState::new(config.clone())?;
    let mut records = Vec::with_capacity(config.horizon.min(1 << 20) as usize);
    for _ in 0..config.horizon {
        records.push(world.step()?);
    }
    let collapse_tick = detect_collapse(&records, config.collapse_epsilon, config.collapse_window);
    Ok(RunResult { records, collapse_tick, final_ledger: world.into_ledger() })
}
