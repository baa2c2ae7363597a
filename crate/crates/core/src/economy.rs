//! Credit ledger and the unit-value regimes that make credits lose value.
//!
//! Credits are granted for processed reports and for registering, and are
//! never refunded or destroyed, so the platform total `N` only grows. How
//! much one credit is worth to its holder depends on the [`RevenueModel`]:
//!
//! * `FixedUnit` keeps a constant value (the control regime).
//! * `Inflationary` values a credit at `kappa / N`, platform-wide.
//! * `Submodular` gives each user cumulative revenue `alpha * ln(n) + beta`
//!   after `n` valid reports.
//! * `Capped` keeps a constant value until a user's balance hits the cap,
//!   after which further reports earn nothing.
//!
//! A user's unit value depends only on platform aggregates and that user's
//! own account, never on another user's balance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EconomyError, ParamError};
use crate::exact::ExactSum;
use crate::format;

/// Lower bound on `N` when computing the inflationary unit value.
pub const INFLATION_N_FLOOR: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// How the submodular regime prices the next report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubmodularValuation {
    /// Next report earns `R(n+1) - R(n)`.
    #[default]
    Marginal,
    /// Next report earns `r * R(n) / n`.
    Average,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum RevenueModel {
    FixedUnit {
        u0: f64,
    },
    Inflationary {
        kappa: f64,
    },
    Submodular {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        valuation: SubmodularValuation,
    },
    Capped {
        cap: f64,
        u0: f64,
    },
}

impl RevenueModel {
    pub fn submodular(alpha: f64, beta: f64) -> Self {
        RevenueModel::Submodular { alpha, beta, valuation: SubmodularValuation::Marginal }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RevenueModel::FixedUnit { .. } => "fixed_unit",
            RevenueModel::Inflationary { .. } => "inflationary",
            RevenueModel::Submodular { .. } => "submodular",
            RevenueModel::Capped { .. } => "capped",
        }
    }

    /// `key=value` pairs joined by `;`, for tabular output.
    pub fn describe_params(&self) -> String {
        let r = format::csv_real;
        match *self {
            RevenueModel::FixedUnit { u0 } => format!("u0={}", r(u0)),
            RevenueModel::Inflationary { kappa } => format!("kappa={}", r(kappa)),
            RevenueModel::Submodular { alpha, beta, valuation } => {
                let v = match valuation {
                    SubmodularValuation::Marginal => "marginal",
                    SubmodularValuation::Average => "average",
                };
                format!("alpha={};beta={};valuation={v}", r(alpha), r(beta))
            }
            RevenueModel::Capped { cap, u0 } => format!("cap={};u0={}", r(cap), r(u0)),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ParamError { violations })
        }
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                out.push(format!("{name} must be finite and > 0 (got {v})"));
            }
        };
        match *self {
            RevenueModel::Inflationary { kappa } => positive("kappa", kappa),
            RevenueModel::Submodular { alpha, .. } => positive("alpha", alpha),
            RevenueModel::Capped { cap, .. } => positive("cap", cap),
            RevenueModel::FixedUnit { .. } => {}
        }
        match *self {
            RevenueModel::FixedUnit { u0 } | RevenueModel::Capped { u0, .. } => {
                if !(u0.is_finite() && u0 >= 0.0) {
                    out.push(format!("u0 must be finite and >= 0 (got {u0})"));
                }
            }
            RevenueModel::Submodular { beta, .. } if !beta.is_finite() => {
                out.push(format!("beta must be finite (got {beta})"));
            }
            _ => {}
        }
        out
    }

    /// Cumulative submodular revenue `R(n)`, with `R(0) = 0`. `None` for
    /// other regimes.
    pub fn cumulative_revenue(&self, n: u64) -> Option<f64> {
        match *self {
            RevenueModel::Submodular { alpha, beta, .. } => {
                Some(if n == 0 { 0.0 } else { alpha * (n as f64).ln() + beta })
            }
            _ => None,
        }
    }

    /// Value of one credit to `account` when `total_distributed` credits
    /// exist platform-wide.
    pub fn unit_value(&self, total_distributed: f64, account: &AgentAccount) -> f64 {
        match *self {
            RevenueModel::FixedUnit { u0 } => u0,
            RevenueModel::Inflationary { kappa } => kappa / total_distributed.max(INFLATION_N_FLOOR),
            RevenueModel::Submodular { alpha, beta, .. } => {
                let n = account.valid_reports;
                if n == 0 {
                    beta.max(0.0)
                } else {
                    ((alpha * (n as f64).ln() + beta) / n as f64).max(0.0)
                }
            }
            RevenueModel::Capped { cap, u0 } => {
                if account.balance < cap {
                    u0
                } else {
                    0.0
                }
            }
        }
    }

    /// Unit value a rational user plugs into the report utility when
    /// deciding on the next report, given `r` credits per report.
    ///
    /// Equal to [`unit_value`](Self::unit_value) except under marginal
    /// submodular pricing, where it is `ΔR(n) / r` so that `r` times it is
    /// the revenue the report actually books.
    pub fn decision_unit_value(&self, total_distributed: f64, account: &AgentAccount, r: f64) -> f64 {
        match *self {
            RevenueModel::Submodular { valuation: SubmodularValuation::Marginal, .. } => {
                if r > 0.0 {
                    self.next_marginal(account.valid_reports) / r
                } else {
                    0.0
                }
            }
            _ => self.unit_value(total_distributed, account),
        }
    }

    /// Revenue booked for report number `n + 1`, clamped at zero.
    fn next_marginal(&self, n: u64) -> f64 {
        match *self {
            RevenueModel::Submodular { alpha, beta, .. } => {
                let delta = if n == 0 { beta } else { alpha * (1.0 / n as f64).ln_1p() };
                delta.max(0.0)
            }
            _ => 0.0,
        }
    }
}

/// Submodular marginal revenue `ΔR(n) = R(n+1) - R(n) = alpha * ln((n+1)/n)`.
///
/// Defined for `n >= 1` under the submodular regime only; the first report's
/// value is handled by [`RevenueModel::unit_value`].
pub fn marginal_revenue(model: &RevenueModel, n: u64) -> Result<f64, EconomyError> {
    match *model {
        RevenueModel::Submodular { alpha, .. } => {
            if n == 0 {
                return Err(EconomyError::Domain("marginal revenue requires n >= 1".into()));
            }
            Ok(alpha * (1.0 / n as f64).ln_1p())
        }
        other => Err(EconomyError::Domain(format!(
            "marginal revenue is defined for the submodular regime, not {}",
            other.name()
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentAccount {
    pub agent_id: AgentId,
    /// Credits held. Equal to lifetime grants since credits are never spent.
    pub balance: f64,
    pub valid_reports: u64,
    /// Utility booked from rewarded reports.
    pub cumulative_revenue: f64,
    /// Exact record of every credit granted to this account.
    granted: ExactSum,
}

impl AgentAccount {
    fn new(agent_id: AgentId, initial_grant: f64) -> Self {
        let granted = ExactSum::from_value(initial_grant);
        Self { agent_id, balance: granted.value(), valid_reports: 0, cumulative_revenue: 0.0, granted }
    }

    /// Standalone account, for evaluating unit values outside a ledger.
    pub fn with_history(balance: f64, valid_reports: u64) -> Self {
        Self { valid_reports, ..Self::new(AgentId(0), balance) }
    }

    pub fn lifetime_granted(&self) -> &ExactSum {
        &self.granted
    }

    /// Largest grant not above `r` that keeps the balance at or below `cap`.
    fn headroom(&self, cap: f64, r: f64) -> f64 {
        if self.balance >= cap {
            return 0.0;
        }
        let mut remaining = ExactSum::from_value(cap);
        remaining.sub_sum(&self.granted);
        let mut amount = r.min(remaining.value()).max(0.0);
        while amount > 0.0 {
            let mut after = self.granted.clone();
            after.add(amount);
            if after.value() <= cap {
                break;
            }
            amount = amount.next_down();
        }
        amount
    }

    fn credit(&mut self, amount: f64) {
        self.granted.add(amount);
        self.balance = self.granted.value();
    }
}

/// Outcome of rewarding one processed report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grant {
    pub credits_granted: f64,
    pub revenue_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreditLedger {
    pub model: RevenueModel,
    pub initial_grant: f64,
    /// Rounded value of `total_terms`, the platform's `N`.
    total_distributed: f64,
    total_terms: ExactSum,
    accounts: Vec<AgentAccount>,
}

impl CreditLedger {
    pub fn new(model: RevenueModel, initial_grant: f64) -> Result<Self, EconomyError> {
        model.validate()?;
        if !(initial_grant.is_finite() && initial_grant >= 0.0) {
            return Err(ParamError {
                violations: vec![format!("initial_grant must be finite and >= 0 (got {initial_grant})")],
            }
            .into());
        }
        Ok(Self {
            model,
            initial_grant,
            total_distributed: 0.0,
            total_terms: ExactSum::new(),
            accounts: Vec::new(),
        })
    }

    /// Total credits ever distributed, `N`.
    pub fn total_distributed(&self) -> f64 {
        self.total_distributed
    }

    pub fn accounts(&self) -> &[AgentAccount] {
        &self.accounts
    }

    pub fn len(&self) -> usize {
        self.accounts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accounts.is_empty()
    }

    pub fn account(&self, id: AgentId) -> Result<&AgentAccount, EconomyError> {
        self.accounts.get(id.0 as usize).ok_or(EconomyError::UnknownAccount(id))
    }

    /// Opens an account holding the initial grant. The grant counts toward
    /// `N`, so new users depress the inflationary unit value.
    pub fn register_user(&mut self) -> AgentId {
        let id = AgentId(u32::try_from(self.accounts.len()).expect("fewer than 2^32 accounts"));
        self.accounts.push(AgentAccount::new(id, self.initial_grant));
        self.distribute(self.initial_grant);
        id
    }

    pub fn unit_value(&self, id: AgentId) -> Result<f64, EconomyError> {
        Ok(self.model.unit_value(self.total_distributed, self.account(id)?))
    }

    pub fn decision_unit_value(&self, id: AgentId, r: f64) -> Result<f64, EconomyError> {
        Ok(self.model.decision_unit_value(self.total_distributed, self.account(id)?, r))
    }

    /// Rewards one processed valid report with `r` credits (less under a
    /// cap) and books its revenue at the pre-grant unit value.
    pub fn grant_for_report(&mut self, id: AgentId, r: f64) -> Result<Grant, EconomyError> {
        let n_total = self.total_distributed;
        let model = self.model;
        let account = self.accounts.get_mut(id.0 as usize).ok_or(EconomyError::UnknownAccount(id))?;

        let credits_granted = match model {
            RevenueModel::Capped { cap, .. } => account.headroom(cap, r),
            _ => r,
        };
        let revenue_delta = match model {
            RevenueModel::Submodular { valuation: SubmodularValuation::Marginal, .. } => {
                model.next_marginal(account.valid_reports)
            }
            _ => credits_granted * model.unit_value(n_total, account),
        };

        if credits_granted > 0.0 {
            account.credit(credits_granted);
        }
        account.valid_reports += 1;
        account.cumulative_revenue += revenue_delta;
        if credits_granted > 0.0 {
            self.distribute(credits_granted);
        }
        Ok(Grant { credits_granted, revenue_delta })
    }

    fn distribute(&mut self, amount: f64) {
        self.total_terms.add(amount);
        self.total_distributed = self.total_terms.value();
    }

    /// Verifies that `N` equals the sum of every account's lifetime grants,
    /// exactly, and that capped balances respect the cap.
    pub fn check_conservation(&self) -> Result<(), EconomyError> {
        let mut diff = self.total_terms.clone();
        let mut accounts = ExactSum::new();
        for account in &self.accounts {
            accounts.add_sum(&account.granted);
            if account.balance != account.granted.value() {
                return Err(EconomyError::Invariant(format!(
                    "account {} balance {} differs from its grants {}",
                    account.agent_id,
                    account.balance,
                    account.granted.value()
                )));
            }
            if let RevenueModel::Capped { cap, .. } = self.model {
                // the initial grant alone may exceed the cap
                if account.balance > cap.max(self.initial_grant) {
                    return Err(EconomyError::Invariant(format!(
                        "account {} balance {} exceeds cap {cap}",
                        account.agent_id, account.balance
                    )));
                }
            }
        }
        diff.sub_sum(&accounts);
        if !diff.is_zero() || self.total_distributed != self.total_terms.value() {
            return Err(EconomyError::Conservation {
                total: self.total_distributed,
                accounts: accounts.value(),
            });
        }
        Ok(())
    }

    /// JSON snapshot with 17-significant-digit reals and fixed field order.
    pub fn to_json(&self) -> Result<String, EconomyError> {
        Ok(format::to_json_string(self)?)
    }

    /// Restores a snapshot, rejecting one whose invariants do not hold.
    pub fn from_json(json: &str) -> Result<Self, EconomyError> {
        let ledger: CreditLedger = serde_json::from_str(json)?;
        ledger.model.validate()?;
        for (i, account) in ledger.accounts.iter().enumerate() {
            if account.agent_id.0 as usize != i {
                return Err(EconomyError::Invariant(format!(
                    "account at position {i} has id {}",
                    account.agent_id
                )));
            }
        }
        ledger.check_conservation()?;
        Ok(ledger)
    }
}
