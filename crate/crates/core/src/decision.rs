//! Three-strategy utility model for a user who receives a comment.
//!
//! A user may read the comment and do nothing, read it and report it when it
//! violates the rules, or discard it unread. Discarding is worth exactly zero;
//! the other two strategies are evaluated in expectation over the probability
//! `p` that the comment is malicious.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Per-user cost and reward constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Cost to read one comment.
    pub c_r: f64,
    /// Probability that a comment is malicious.
    pub p: f64,
    /// Expected mental cost of reading a malicious comment.
    pub c_p: f64,
    /// Cost to write and submit a report.
    pub c_w: f64,
    /// Credits granted per processed valid report.
    pub r: f64,
}

impl ModelParams {
    pub fn new(c_r: f64, p: f64, c_p: f64, c_w: f64, r: f64) -> Result<Self, ParamError> {
        let params = Self { c_r, p, c_p, c_w, r };
        params.validate()?;
        Ok(params)
    }

    /// Checks every bound and reports all violations at once.
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
        for (name, value) in [("c_r", self.c_r), ("c_p", self.c_p), ("c_w", self.c_w), ("r", self.r)] {
            if !value.is_finite() || value < 0.0 {
                out.push(format!("{name} must be finite and >= 0 (got {value})"));
            }
        }
        if !(0.0..=1.0).contains(&self.p) {
            out.push(format!("p must lie in [0, 1] (got {})", self.p));
        }
        out
    }

    /// Same costs with the per-report credit grant replaced.
    pub fn with_reward(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn with_probability(self, p: f64) -> Self {
        Self { p, ..self }
    }
}

/// What a user does with one received comment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    ReadOnly,
    ReadAndReport,
    Discard,
}

impl Strategy {
    pub fn reads(self) -> bool {
        !matches!(self, Strategy::Discard)
    }

    pub fn label(self) -> &'static str {
        match self {
            Strategy::ReadOnly => "read-only",
            Strategy::ReadAndReport => "report",
            Strategy::Discard => "discard",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Expected utilities of the three strategies at one unit value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityTriple {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl UtilityTriple {
    pub fn evaluate(params: &ModelParams, unit_value: f64) -> Self {
        Self {
            u1: utility_read_only(params),
            u2: utility_report(params, unit_value),
            u3: 0.0,
        }
    }

    pub fn of(&self, strategy: Strategy) -> f64 {
        match strategy {
            Strategy::ReadOnly => self.u1,
            Strategy::ReadAndReport => self.u2,
            Strategy::Discard => self.u3,
        }
    }
}

/// Expected utility of reading without reporting: `-(c_r + p * c_p)`.
pub fn utility_read_only(params: &ModelParams) -> f64 {
    -(params.c_r + params.p * params.c_p)
}

/// Expected utility of reading and reporting when one credit is worth
/// `unit_value`: `-c_r + p * (r * unit_value - c_p - c_w)`.
pub fn utility_report(params: &ModelParams, unit_value: f64) -> f64 {
    -params.c_r + params.p * (params.r * unit_value - params.c_p - params.c_w)
}

/// Rational choice at the given unit value.
///
/// Reports only when reporting is strictly better than discarding. Reading
/// without reporting is never chosen: it never beats discarding, and the tie
/// at zero cost goes to `Discard`.
pub fn choose_strategy(params: &ModelParams, unit_value: f64) -> Strategy {
    if utility_report(params, unit_value) > 0.0 {
        Strategy::ReadAndReport
    } else {
        Strategy::Discard
    }
}

/// Minimum unit value above which reporting is rational,
/// `c_r / (p * r) + (c_p + c_w) / r`.
///
/// Returns `f64::INFINITY` when reporting can never pay (`p = 0` or
/// `r = 0`, where the report utility cannot exceed zero) and `0.0` when
/// reporting is free.
pub fn threshold_unit_value(params: &ModelParams) -> f64 {
    if params.p == 0.0 || params.r == 0.0 {
        return f64::INFINITY;
    }
    params.c_r / (params.p * params.r) + (params.c_p + params.c_w) / params.r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_ne, prop_assume, proptest};
    use proptest::strategy::Strategy as PropStrategy;

    fn base() -> ModelParams {
        ModelParams::new(0.5, 0.2, 2.0, 1.0, 10.0).unwrap()
    }

    #[test]
    fn read_only_examples() {
        let zero = ModelParams::new(0.0, 0.0, 123.0, 0.0, 0.0).unwrap();
        assert_eq!(utility_read_only(&zero), 0.0);
        let p0 = ModelParams::new(1.0, 0.0, 5.0, 0.0, 0.0).unwrap();
        assert_eq!(utility_read_only(&p0), -1.0);
        let mixed = ModelParams::new(0.5, 0.2, 2.0, 0.0, 0.0).unwrap();
        assert!((utility_read_only(&mixed) + 0.9).abs() < 1e-12);
    }

    #[test]
    fn report_examples() {
        assert!((utility_report(&base(), 1.0) - 0.9).abs() < 1e-12);

        let b = base();
        let at_zero = utility_report(&b, 0.0);
        assert!((at_zero - (-b.c_r - b.p * (b.c_p + b.c_w))).abs() < 1e-12);
        assert!(at_zero <= utility_read_only(&b));

        let p0 = ModelParams::new(0.7, 0.0, 3.0, 4.0, 10.0).unwrap();
        assert_eq!(utility_report(&p0, 100.0), -0.7);
    }

    #[test]
    fn strategy_examples() {
        assert_eq!(choose_strategy(&base(), 1.0), Strategy::ReadAndReport);
        // exactly at the threshold the tie goes to Discard
        assert_eq!(utility_report(&base(), 0.55), 0.0);
        assert_eq!(choose_strategy(&base(), 0.55), Strategy::Discard);
        let p0 = base().with_probability(0.0);
        assert_eq!(choose_strategy(&p0, 1e9), Strategy::Discard);
    }

    #[test]
    fn degenerate_costs_tie_to_discard() {
        let free = ModelParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let t = UtilityTriple::evaluate(&free, 0.0);
        assert_eq!(t.u1, 0.0);
        assert_eq!(t.u3, 0.0);
        assert_eq!(choose_strategy(&free, 0.0), Strategy::Discard);
    }

    #[test]
    fn threshold_examples() {
        assert!((threshold_unit_value(&base()) - 0.55).abs() < 1e-12);
        let p1 = ModelParams::new(1.0, 1.0, 1.0, 1.0, 3.0).unwrap();
        assert!((threshold_unit_value(&p1) - 1.0).abs() < 1e-12);
        let p0 = ModelParams::new(1.0, 0.0, 1.0, 1.0, 10.0).unwrap();
        assert_eq!(threshold_unit_value(&p0), f64::INFINITY);
        let r0 = ModelParams::new(1.0, 0.5, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(threshold_unit_value(&r0), f64::INFINITY);
        let free = ModelParams::new(0.0, 0.5, 0.0, 0.0, 2.0).unwrap();
        assert_eq!(threshold_unit_value(&free), 0.0);
        // no revenue and no cost: U2 is always 0, which never beats discarding
        let inert = ModelParams::new(0.0, 0.5, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(threshold_unit_value(&inert), f64::INFINITY);
        assert_eq!(choose_strategy(&inert, 5.0), Strategy::Discard);
    }

    #[test]
    fn validation_lists_every_violation() {
        let err = ModelParams::new(-1.0, 1.5, f64::NAN, 0.0, f64::INFINITY).unwrap_err();
        assert_eq!(err.violations.len(), 4, "{err}");
    }

    fn params() -> impl PropStrategy<Value = ModelParams> {
        (0.0..10.0f64, 0.0..=1.0f64, 0.0..10.0f64, 0.0..10.0f64, 0.0..100.0f64)
            .prop_map(|(c_r, p, c_p, c_w, r)| ModelParams { c_r, p, c_p, c_w, r })
    }

    proptest! {
        #[test]
        fn read_only_is_dominated(params in params()) {
            let u1 = utility_read_only(&params);
            prop_assert!(u1 <= 0.0);
            if params.c_r + params.p * params.c_p > 0.0 {
                prop_assert!(u1 < 0.0);
            }
        }

        #[test]
        fn rational_choice_never_read_only(params in params(), u in 0.0..1e3f64) {
            prop_assert_ne!(choose_strategy(&params, u), Strategy::ReadOnly);
        }

        #[test]
        fn report_utility_increases_with_unit_value(params in params(), u in 0.0..100.0f64, du in 1e-3..10.0f64) {
            prop_assume!(params.p * params.r > 1e-6);
            prop_assert!(utility_report(&params, u + du) > utility_report(&params, u));
        }

        #[test]
        fn threshold_decreases_in_reward(params in params(), dr in 1e-2..10.0f64) {
            prop_assume!(params.p > 1e-3 && params.r > 1e-3);
            prop_assume!(params.c_r + params.c_p + params.c_w > 1e-3);
            let more = params.with_reward(params.r + dr);
            prop_assert!(threshold_unit_value(&more) < threshold_unit_value(&params));
        }

        #[test]
        fn threshold_decreases_in_probability(params in params(), dp in 1e-3..0.5f64) {
            prop_assume!(params.c_r > 1e-3 && params.r > 1e-3 && params.p > 1e-3 && params.p + dp <= 1.0);
            let more = params.with_probability(params.p + dp);
            prop_assert!(threshold_unit_value(&more) < threshold_unit_value(&params));
        }
    }
}
