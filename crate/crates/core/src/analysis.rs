//! Closed-form predictions, used as the oracle the simulator is checked
//! against, and parameter sweeps that put the two side by side.
//!
//! Sentinels follow the decision module: an infinite threshold means
//! reporting never pays. For the collapse point `N*`, `0.0` means reporting
//! is never rational and `f64::INFINITY` means it never stops being
//! rational. Tables render these as `never` and `always`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decision::{choose_strategy, threshold_unit_value, ModelParams, Strategy};
use crate::economy::{AgentAccount, RevenueModel};
use crate::format::csv_real;
use crate::sim::{self, SimConfig, TickRecord};

/// Total distributed credits `N* = kappa / u*` at which inflation makes
/// reporting irrational. Reporting is rational iff `N < N*`.
pub fn predicted_collapse_credits(params: &ModelParams, kappa: f64) -> f64 {
    let u_star = threshold_unit_value(params);
    if u_star.is_infinite() {
        0.0
    } else if u_star == 0.0 {
        f64::INFINITY
    } else {
        kappa / u_star
    }
}

/// Smallest malicious probability at which reporting pays for unit value
/// `u`: `p* = c_r / (r u - c_p - c_w)`. `params.p` is ignored.
///
/// Reporting is rational iff `p > p*`. Returns `None` when no `p` in
/// `(0, 1]` qualifies, and `Some(0.0)` when reading is free and any positive
/// `p` qualifies.
pub fn break_even_probability(params: &ModelParams, u: f64) -> Option<f64> {
    let margin = params.r * u - params.c_p - params.c_w;
    if margin <= 0.0 {
        return None;
    }
    let p_star = params.c_r / margin;
    (p_star <= 1.0).then_some(p_star)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitProfile {
    pub points: Vec<(u64, f64)>,
    /// Maximizer `exp(1 - beta/alpha)` of the continuous relaxation.
    pub n_max: f64,
}

/// Average submodular revenue `u(n) = (alpha ln n + beta) / n` at each point.
pub fn submodular_limit_profile(alpha: f64, beta: f64, n_points: &[u64]) -> LimitProfile {
    let points = n_points
        .iter()
        .map(|&n| {
            let x = n as f64;
            (n, (alpha * x.ln() + beta) / x)
        })
        .collect();
    LimitProfile { points, n_max: (1.0 - beta / alpha).exp() }
}

/// Up to `count` distinct integers from 1 to `max_n`, evenly spaced in log.
pub fn log_spaced_points(max_n: u64, count: usize) -> Vec<u64> {
    if max_n == 0 || count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![max_n];
    }
    let top = (max_n as f64).ln();
    let mut out: Vec<u64> = (0..count)
        .map(|i| ((top * i as f64 / (count - 1) as f64).exp().round() as u64).clamp(1, max_n))
        .collect();
    out.dedup();
    if out.last() != Some(&max_n) {
        out.push(max_n);
    }
    out
}

/// Simulation settings shared by every sweep cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellTemplate {
    pub initial_honest_users: u32,
    #[serde(default = "one")]
    pub comments_per_user_per_tick: u32,
    #[serde(default)]
    pub new_users_per_tick: f64,
    #[serde(default)]
    pub initial_grant: f64,
    #[serde(default = "unit")]
    pub admin_validity_prob: f64,
    #[serde(default)]
    pub epsilon_noise: f64,
    pub horizon: u64,
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub collapse_epsilon: f64,
    #[serde(default = "default_window")]
    pub collapse_window: u64,
}

fn one() -> u32 {
    1
}
fn unit() -> f64 {
    1.0
}
fn default_eps() -> f64 {
    0.01
}
fn default_window() -> u64 {
    10
}

impl CellTemplate {
    pub fn config(&self, params: ModelParams, revenue: RevenueModel) -> SimConfig {
        SimConfig {
            params,
            revenue,
            initial_honest_users: self.initial_honest_users,
            comments_per_user_per_tick: self.comments_per_user_per_tick,
            new_users_per_tick: self.new_users_per_tick,
            initial_grant: self.initial_grant,
            admin_validity_prob: self.admin_validity_prob,
            epsilon_noise: self.epsilon_noise,
            horizon: self.horizon,
            seed: self.seed,
            collapse_epsilon: self.collapse_epsilon,
            collapse_window: self.collapse_window,
        }
    }
}

/// Per-axis value lists. Cells are the cartesian product, ordered
/// lexicographically in the axis order `c_r, p, c_p, c_w, r, models`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub c_r: Vec<f64>,
    pub p: Vec<f64>,
    pub c_p: Vec<f64>,
    pub c_w: Vec<f64>,
    pub r: Vec<f64>,
    pub models: Vec<RevenueModel>,
    #[serde(default = "yes")]
    pub simulate: bool,
    pub template: CellTemplate,
}

fn yes() -> bool {
    true
}

impl SweepGrid {
    pub fn cells(&self) -> Vec<(ModelParams, RevenueModel)> {
        let mut out = Vec::new();
        for &c_r in &self.c_r {
            for &p in &self.p {
                for &c_p in &self.c_p {
                    for &c_w in &self.c_w {
                        for &r in &self.r {
                            for &model in &self.models {
                                out.push((ModelParams { c_r, p, c_p, c_w, r }, model));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellOutcome {
    Ok {
        u_star: f64,
        /// Only for the inflationary regime.
        n_star: Option<f64>,
        /// `None` when the sweep does not simulate.
        collapse_tick: Option<Option<u64>>,
        agree: Option<bool>,
    },
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: ModelParams,
    pub model: RevenueModel,
    pub outcome: CellOutcome,
}

pub const SWEEP_CSV_HEADER: &str = "c_r,p,c_p,c_w,r,model,model_params,u_star,n_star,collapse_tick,agree";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let p = &self.params;
        let lead = format!(
            "{},{},{},{},{},{},{}",
            csv_real(p.c_r),
            csv_real(p.p),
            csv_real(p.c_p),
            csv_real(p.c_w),
            csv_real(p.r),
            self.model.name(),
            self.model.describe_params()
        );
        match &self.outcome {
            CellOutcome::Invalid(msg) => format!("{lead},,,,error: {}", msg.replace([',', '\n'], ";")),
            CellOutcome::Ok { u_star, n_star, collapse_tick, agree } => {
                let u = if u_star.is_infinite() { "never".to_string() } else { csv_real(*u_star) };
                let n = match n_star {
                    None => String::new(),
                    Some(x) if *x == 0.0 => "never".into(),
                    Some(x) if x.is_infinite() => "always".into(),
                    Some(x) => csv_real(*x),
                };
                let t = match collapse_tick {
                    None => String::new(),
                    Some(None) => "none".into(),
                    Some(Some(t)) => t.to_string(),
                };
                let a = match agree {
                    None => "",
                    Some(true) => "yes",
                    Some(false) => "no",
                };
                format!("{lead},{u},{n},{t},{a}")
            }
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Evaluates every cell, simulating in parallel when the grid asks for it.
/// Invalid cells are reported in their row and do not stop the sweep.
pub fn sweep(grid: &SweepGrid) -> Vec<SweepRow> {
    grid.cells()
        .into_par_iter()
        .map(|(params, model)| SweepRow { params, model, outcome: evaluate_cell(grid, params, model) })
        .collect()
}

fn evaluate_cell(grid: &SweepGrid, params: ModelParams, model: RevenueModel) -> CellOutcome {
    let config = grid.template.config(params, model);
    if let Err(e) = config.validate() {
        return CellOutcome::Invalid(e.violations.join("; "));
    }
    let decision = config.decision_params();
    let u_star = threshold_unit_value(&decision);
    let n_star = match model {
        RevenueModel::Inflationary { kappa } => Some(predicted_collapse_credits(&decision, kappa)),
        _ => None,
    };
    if !grid.simulate {
        return CellOutcome::Ok { u_star, n_star, collapse_tick: None, agree: None };
    }
    match sim::run(&config) {
        Ok(result) => {
            let agree = (config.epsilon_noise == 0.0).then(|| snapshot_rule_holds(&config, &result.records));
            CellOutcome::Ok { u_star, n_star, collapse_tick: Some(result.collapse_tick), agree }
        }
        Err(e) => CellOutcome::Invalid(e.to_string()),
    }
}

/// Whether the simulated reporting decisions match the closed-form rule.
///
/// For homogeneous regimes every tick is checked: under inflation agents
/// report iff the snapshot `N` is below `N*`, under a fixed unit value iff
/// `u0 > u*`. For per-agent regimes only the first tick is checked, where
/// every agent still has an identical history.
pub fn snapshot_rule_holds(config: &SimConfig, records: &[TickRecord]) -> bool {
    let decision = config.decision_params();
    let reports = |rec: &TickRecord| rec.reporters > 0;
    match config.revenue {
        RevenueModel::Inflationary { kappa } => {
            let n_star = predicted_collapse_credits(&decision, kappa);
            records.iter().all(|rec| {
                let effective = rec.snapshot_total.max(crate::economy::INFLATION_N_FLOOR);
                reports(rec) == (effective < n_star) && (rec.reporters == 0 || rec.reporters == rec.active_honest)
            })
        }
        RevenueModel::FixedUnit { u0 } => {
            let expected = u0 > threshold_unit_value(&decision);
            records.iter().all(|rec| reports(rec) == expected)
        }
        model => records.first().is_none_or(|rec| {
            let fresh = AgentAccount::with_history(config.initial_grant, 0);
            let value = model.decision_unit_value(rec.snapshot_total, &fresh, config.params.r);
            reports(rec) == (choose_strategy(&decision, value) == Strategy::ReadAndReport)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(0.5, 0.2, 2.0, 1.0, 10.0).unwrap()
    }

    fn template() -> CellTemplate {
        CellTemplate {
            initial_honest_users: 3,
            comments_per_user_per_tick: 1,
            new_users_per_tick: 0.5,
            initial_grant: 2.0,
            admin_validity_prob: 1.0,
            epsilon_noise: 0.0,
            horizon: 300,
            seed: 7,
            collapse_epsilon: 0.01,
            collapse_window: 10,
        }
    }

    #[test]
    fn collapse_credits() {
        let n = predicted_collapse_credits(&params(), 100.0);
        assert!((n - 181.81818181818181).abs() < 1e-9);
        assert_eq!(predicted_collapse_credits(&params().with_probability(0.0), 100.0), 0.0);
        let free = ModelParams::new(0.0, 0.3, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(predicted_collapse_credits(&free, 100.0), f64::INFINITY);
    }

    #[test]
    fn break_even() {
        let p = break_even_probability(&params(), 1.0).unwrap();
        assert!((p - 0.5 / 7.0).abs() < 1e-15);
        let edge = ModelParams::new(0.5, 0.0, 2.0, 1.0, 3.0).unwrap();
        assert_eq!(break_even_probability(&edge, 1.0), None);
        let free_read = ModelParams::new(0.0, 0.0, 2.0, 1.0, 10.0).unwrap();
        assert_eq!(break_even_probability(&free_read, 1.0), Some(0.0));
        // needs p > 1
        let steep = ModelParams::new(5.0, 0.0, 2.0, 1.0, 10.0).unwrap();
        assert_eq!(break_even_probability(&steep, 0.5), None);
    }

    #[test]
    fn limit_profile() {
        let prof = submodular_limit_profile(1.0, 0.0, &[1, 1_000_000]);
        assert_eq!(prof.points[0], (1, 0.0));
        assert!((prof.points[1].1 - 1.38155e-5).abs() < 1e-9);
        assert!((prof.n_max - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn log_points() {
        assert_eq!(log_spaced_points(1000, 4), vec![1, 10, 100, 1000]);
        assert_eq!(log_spaced_points(3, 10), vec![1, 2, 3]);
        assert_eq!(log_spaced_points(50, 1), vec![50]);
        assert!(log_spaced_points(0, 3).is_empty());
    }

    fn grid(models: Vec<RevenueModel>) -> SweepGrid {
        SweepGrid {
            c_r: vec![0.5],
            p: vec![0.2],
            c_p: vec![2.0],
            c_w: vec![1.0],
            r: vec![10.0],
            models,
            simulate: true,
            template: template(),
        }
    }

    #[test]
    fn single_cell_matches_single_run() {
        let model = RevenueModel::Inflationary { kappa: 100.0 };
        let rows = sweep(&grid(vec![model]));
        assert_eq!(rows.len(), 1);
        let run = sim::run(&template().config(params(), model)).unwrap();
        match &rows[0].outcome {
            CellOutcome::Ok { u_star, collapse_tick, agree, n_star } => {
                assert_eq!(*u_star, threshold_unit_value(&params()));
                assert_eq!(*n_star, Some(predicted_collapse_credits(&params(), 100.0)));
                assert_eq!(*collapse_tick, Some(run.collapse_tick));
                assert_eq!(*agree, Some(true));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unit_value_axis_flips_once() {
        let u0s = [0.1, 0.3, 0.5, 0.54, 0.56, 0.7, 1.0, 2.0];
        let rows = sweep(&grid(u0s.iter().map(|&u0| RevenueModel::FixedUnit { u0 }).collect()));
        let collapsed: Vec<bool> = rows
            .iter()
            .map(|r| match r.outcome {
                CellOutcome::Ok { collapse_tick: Some(t), agree: Some(true), .. } => t.is_some(),
                ref o => panic!("{o:?}"),
            })
            .collect();
        let flips = collapsed.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1);
        assert_eq!(collapsed, vec![true, true, true, true, false, false, false, false]);
    }

    #[test]
    fn invalid_cells_are_marked() {
        let mut g = grid(vec![RevenueModel::FixedUnit { u0: 1.0 }]);
        g.p = vec![0.2, 1.5];
        let rows = sweep(&g);
        assert!(matches!(rows[0].outcome, CellOutcome::Ok { .. }));
        assert!(matches!(rows[1].outcome, CellOutcome::Invalid(_)));
        assert!(rows[1].to_csv().contains(",error: p must lie in [0; 1]"), "{}", rows[1].to_csv());
    }

    #[test]
    fn empty_grid() {
        let mut g = grid(vec![]);
        g.c_r.clear();
        assert!(sweep(&g).is_empty());
        assert_eq!(sweep_csv(&[]), format!("{SWEEP_CSV_HEADER}\n"));
    }

    #[test]
    fn lexicographic_order() {
        let mut g = grid(vec![RevenueModel::FixedUnit { u0: 0.0 }, RevenueModel::FixedUnit { u0: 1.0 }]);
        g.c_r = vec![1.0, 0.5];
        g.r = vec![1.0, 2.0];
        g.simulate = false;
        let rows = sweep(&g);
        let keys: Vec<_> = rows
            .iter()
            .map(|r| (r.params.c_r, r.params.r, r.model.describe_params()))
            .collect();
        assert_eq!(keys[0], (1.0, 1.0, "u0=0".to_string()));
        assert_eq!(keys[1], (1.0, 1.0, "u0=1".to_string()));
        assert_eq!(keys[2], (1.0, 2.0, "u0=0".to_string()));
        assert_eq!(keys[4], (0.5, 1.0, "u0=0".to_string()));
    }

    #[test]
    fn sentinel_rendering() {
        let row = SweepRow {
            params: params().with_probability(0.0),
            model: RevenueModel::Inflationary { kappa: 1.0 },
            outcome: CellOutcome::Ok { u_star: f64::INFINITY, n_star: Some(0.0), collapse_tick: None, agree: None },
        };
        assert!(row.to_csv().ends_with(",never,never,,"), "{}", row.to_csv());
    }
}
