//! Rolling weekly lockdown decisions vs one-shot block decisions.
//!
//! The toy model has a weekly lockdown cost `L`, a cost per death `C`, a
//! starting rate of `M` deaths in week zero, and weekly factors `F0 < 1`
//! (lockdown) and `F1 > 1` (easing). A weekly decision with exponent `n`
//! supports easing while `C*M*F1^n*(F1 - F0) < L`; the one-shot decision
//! over `N` weeks supports easing while the difference of the two
//! geometric death sums stays below `N*L`. The two rules can disagree,
//! and `find_inconsistency` searches for certified disagreements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qaly::{IllnessCostParams, AfterEffectParams, QalyValuation};
use crate::scenario::GeometricScenario;

/// Parameters of the weekly-vs-block decision model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionModel {
    /// Cost of one week of lockdown, GBP.
    pub lockdown_cost_per_week: f64,
    /// Cost of one death, GBP.
    pub cost_per_death: f64,
    /// Deaths in week zero.
    pub initial_weekly_deaths: f64,
    /// Weekly death-rate factor under lockdown, in (0, 1).
    pub lockdown_factor: f64,
    /// Weekly death-rate factor under easing, > 1.
    pub easing_factor: f64,
    /// Number of weeks in the block decision.
    pub horizon_weeks: u32,
}

/// One side-by-side evaluation of a decision inequality. Easing is
/// supported strictly; a tie resolves to lockdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionMargin {
    /// True when the inequality supports easing.
    pub ease: bool,
    /// Left side: marginal death cost of easing, GBP.
    pub death_cost: f64,
    /// Right side: lockdown cost avoided, GBP.
    pub lockdown_cost: f64,
}

/// A parameter set where every weekly decision says ease but the one-shot
/// block decision says lockdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InconsistencyWitness {
    pub model: DecisionModel,
    /// Per-week verdicts for weeks `1..=horizon` (true = ease).
    pub weekly_verdicts: Vec<bool>,
    /// Block verdict over the same horizon (true = ease).
    pub block_verdict: bool,
    /// Binding weekly margin, at the final week.
    pub weekly_margin: DecisionMargin,
    /// Block margin.
    pub block_margin: DecisionMargin,
}

/// Grid over a closed real interval: `steps` evenly spaced values
/// including both endpoints (a single value when `steps == 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub steps: u32,
}

impl GridRange {
    pub fn fixed(value: f64) -> Self {
        GridRange {
            min: value,
            max: value,
            steps: 1,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 || self.min == self.max {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + step * i as f64).collect()
    }

    fn validate(&self, name: &'static str) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(Error::invalid(name, "requires finite min <= max"));
        }
        if self.steps == 0 {
            return Err(Error::invalid(name, "requires steps >= 1"));
        }
        Ok(())
    }
}

/// Inclusive integer grid over horizons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonRange {
    pub min: u32,
    pub max: u32,
    #[serde(default = "default_horizon_step")]
    pub step: u32,
}

fn default_horizon_step() -> u32 {
    1
}

impl HorizonRange {
    pub fn values(&self) -> Vec<u32> {
        (self.min..=self.max).step_by(self.step.max(1) as usize).collect()
    }
}

/// Search box for `find_inconsistency`: grids over the two factors, the
/// horizon, and the ratio `L / (C*M)` (fixed at 1 by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBox {
    pub lockdown_factor: GridRange,
    pub easing_factor: GridRange,
    pub horizon: HorizonRange,
    #[serde(default = "default_cost_ratio")]
    pub lockdown_cost_ratio: GridRange,
}

fn default_cost_ratio() -> GridRange {
    GridRange::fixed(1.0)
}

impl SearchBox {
    pub fn validate(&self) -> Result<()> {
        self.lockdown_factor.validate("lockdown_factor")?;
        self.easing_factor.validate("easing_factor")?;
        self.lockdown_cost_ratio.validate("lockdown_cost_ratio")?;
        if self.horizon.min < 1 || self.horizon.min > self.horizon.max {
            return Err(Error::invalid("horizon", "requires 1 <= min <= max"));
        }
        Ok(())
    }
}

impl DecisionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.lockdown_factor > 0.0 && self.lockdown_factor < 1.0) {
            return Err(Error::invalid(
                "lockdown_factor",
                format!("must lie in (0, 1), got {}", self.lockdown_factor),
            ));
        }
        if !(self.easing_factor > 1.0) || !self.easing_factor.is_finite() {
            return Err(Error::invalid(
                "easing_factor",
                format!("must be finite and > 1, got {}", self.easing_factor),
            ));
        }
        for (name, value) in [
            ("lockdown_cost_per_week", self.lockdown_cost_per_week),
            ("cost_per_death", self.cost_per_death),
            ("initial_weekly_deaths", self.initial_weekly_deaths),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "decision",
                    reason: format!("{name} must be finite and > 0, got {value}"),
                });
            }
        }
        if self.horizon_weeks < 1 {
            return Err(Error::invalid("horizon_weeks", "must be >= 1"));
        }
        Ok(())
    }

    /// Weekly rolling decision with exponent `n`: ease while
    /// `C*M*F1^n*(F1 - F0) < L`.
    pub fn weekly_easing_condition(&self, n: u32) -> Result<DecisionMargin> {
        if n < 1 || n > self.horizon_weeks {
            return Err(Error::WeekOutOfRange {
                week: n,
                horizon: self.horizon_weeks,
            });
        }
        let death_cost = self.cost_per_death
            * self.initial_weekly_deaths
            * self.easing_factor.powi(n as i32)
            * (self.easing_factor - self.lockdown_factor);
        Ok(DecisionMargin {
            ease: death_cost < self.lockdown_cost_per_week,
            death_cost,
            lockdown_cost: self.lockdown_cost_per_week,
        })
    }

    /// One-shot decision over the whole horizon: ease while
    /// `C*M*(sum of eased deaths - sum of locked deaths) < N*L`.
    pub fn block_easing_condition(&self) -> DecisionMargin {
        let n = self.horizon_weeks;
        let eased = geometric_sum(self.easing_factor, n);
        let locked = geometric_sum(self.lockdown_factor, n);
        let death_cost =
            self.cost_per_death * self.initial_weekly_deaths * (eased - locked);
        let lockdown_cost = n as f64 * self.lockdown_cost_per_week;
        DecisionMargin {
            ease: death_cost < lockdown_cost,
            death_cost,
            lockdown_cost,
        }
    }

    /// All weekly verdicts for `n = 1..=horizon`.
    pub fn weekly_verdicts(&self) -> Vec<bool> {
        (1..=self.horizon_weeks)
            .map(|n| self.weekly_easing_condition(n).expect("n in range").ease)
            .collect()
    }

    /// Verifies that the easing weeks form a prefix of `1..=horizon`: once
    /// the weekly rule flips to lockdown it never flips back. This is a
    /// theorem for `F1 > 1`; a `false` return indicates a bug.
    pub fn weekly_monotonicity_check(&self) -> bool {
        let verdicts = self.weekly_verdicts();
        let mut seen_lockdown = false;
        for ease in verdicts {
            if ease && seen_lockdown {
                return false;
            }
            if !ease {
                seen_lockdown = true;
            }
        }
        true
    }
}

/// Sum `F + F^2 + ... + F^N`, with the limit branch at `F = 1`.
fn geometric_sum(factor: f64, n: u32) -> f64 {
    if factor == 1.0 {
        return n as f64;
    }
    factor * (n as f64 * factor.ln()).exp_m1() / (factor - 1.0)
}

/// Searches a grid box for parameter sets where every weekly decision
/// says ease while the block decision says lockdown. Every candidate the
/// grid scan flags is re-verified by direct evaluation of both
/// inequalities before being emitted; witnesses come out in canonical
/// (horizon, easing, lockdown, ratio) order. An empty result is a valid
/// outcome.
pub fn find_inconsistency(
    search_box: &SearchBox,
    cost_per_death: f64,
    initial_weekly_deaths: f64,
) -> Result<Vec<InconsistencyWitness>> {
    search_box.validate()?;
    if !(cost_per_death > 0.0) || !(initial_weekly_deaths > 0.0) {
        return Err(Error::invalid(
            "find_inconsistency",
            "cost_per_death and initial_weekly_deaths must be > 0",
        ));
    }

    let mut witnesses = Vec::new();
    for &horizon in &search_box.horizon.values() {
        for &easing in &search_box.easing_factor.values() {
            for &lockdown in &search_box.lockdown_factor.values() {
                for &ratio in &search_box.lockdown_cost_ratio.values() {
                    let model = DecisionModel {
                        lockdown_cost_per_week: ratio * cost_per_death * initial_weekly_deaths,
                        cost_per_death,
                        initial_weekly_deaths,
                        lockdown_factor: lockdown,
                        easing_factor: easing,
                        horizon_weeks: horizon,
                    };
                    if model.validate().is_err() {
                        continue;
                    }
                    // Grid shortcut: the weekly margin grows with n, so the
                    // final week decides whether all weeks ease.
                    let last = model.weekly_easing_condition(horizon).expect("in range");
                    if !last.ease || model.block_easing_condition().ease {
                        continue;
                    }
                    if let Some(witness) = certify_witness(model) {
                        witnesses.push(witness);
                    }
                }
            }
        }
    }
    witnesses.sort_by(|a, b| {
        (a.model.horizon_weeks, a.model.easing_factor, a.model.lockdown_factor)
            .partial_cmp(&(
                b.model.horizon_weeks,
                b.model.easing_factor,
                b.model.lockdown_factor,
            ))
            .expect("finite keys")
            .then(
                a.model
                    .lockdown_cost_per_week
                    .partial_cmp(&b.model.lockdown_cost_per_week)
                    .expect("finite cost"),
            )
    });
    Ok(witnesses)
}

/// Re-evaluates every weekly inequality and the block inequality from
/// scratch; returns a witness only if all weeks ease and the block locks.
fn certify_witness(model: DecisionModel) -> Option<InconsistencyWitness> {
    let weekly_verdicts = model.weekly_verdicts();
    if !weekly_verdicts.iter().all(|&ease| ease) {
        return None;
    }
    let block_margin = model.block_easing_condition();
    if block_margin.ease {
        return None;
    }
    let weekly_margin = model
        .weekly_easing_condition(model.horizon_weeks)
        .expect("horizon in range");
    Some(InconsistencyWitness {
        model,
        weekly_verdicts,
        block_verdict: false,
        weekly_margin,
        block_margin,
    })
}

/// Verdict of a quarterly cost comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ease,
    Lockdown,
}

/// All intermediate figures of the quarterly easing-vs-lockdown
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuarterlyComparison {
    /// Extra deaths from easing rather than locking down.
    pub excess_deaths: f64,
    /// QALYs attributed to each death in this comparison.
    pub qalys_per_death: f64,
    /// QALY cost of the excess deaths.
    pub qaly_cost: f64,
    /// Money value of the QALY cost, GBP.
    pub monetized_cost: f64,
    /// Economic cost of a quarter of lockdown, GBP.
    pub lockdown_quarter_cost: f64,
    /// Ease when the monetized QALY cost is strictly below the lockdown
    /// cost; a tie resolves to lockdown.
    pub verdict: Verdict,
}

/// Compares the monetized death cost of easing against the economic cost
/// of a quarter of lockdown, counting deaths only.
pub fn quarterly_comparison(
    ease: &GeometricScenario,
    lockdown: &GeometricScenario,
    lockdown_quarter_cost: f64,
    valuation: &QalyValuation,
) -> Result<QuarterlyComparison> {
    comparison_with_qalys_per_death(
        ease,
        lockdown,
        lockdown_quarter_cost,
        valuation,
        valuation.qalys_per_death,
    )
}

/// Extended comparison that also charges illness and after-effect QALYs
/// for each death.
pub fn quarterly_comparison_extended(
    ease: &GeometricScenario,
    lockdown: &GeometricScenario,
    lockdown_quarter_cost: f64,
    valuation: &QalyValuation,
    illness: &IllnessCostParams,
    after_effects: &AfterEffectParams,
) -> Result<QuarterlyComparison> {
    let per_death =
        crate::qaly::total_qaly_per_death(valuation, illness, after_effects, true, true)?;
    comparison_with_qalys_per_death(ease, lockdown, lockdown_quarter_cost, valuation, per_death)
}

fn comparison_with_qalys_per_death(
    ease: &GeometricScenario,
    lockdown: &GeometricScenario,
    lockdown_quarter_cost: f64,
    valuation: &QalyValuation,
    qalys_per_death: f64,
) -> Result<QuarterlyComparison> {
    if ease.initial_weekly_deaths != lockdown.initial_weekly_deaths {
        return Err(Error::invalid(
            "quarterly_comparison",
            "scenarios must share initial_weekly_deaths",
        ));
    }
    if !(lockdown_quarter_cost > 0.0) || !lockdown_quarter_cost.is_finite() {
        return Err(Error::invalid(
            "lockdown_quarter_cost",
            "must be finite and > 0",
        ));
    }
    valuation.validate()?;
    let excess_deaths = ease.excess_deaths(lockdown)?;
    let qaly_cost = excess_deaths * qalys_per_death;
    let monetized_cost = valuation.monetize(qaly_cost);
    let verdict = if monetized_cost < lockdown_quarter_cost {
        Verdict::Ease
    } else {
        Verdict::Lockdown
    };
    Ok(QuarterlyComparison {
        excess_deaths,
        qalys_per_death,
        qaly_cost,
        monetized_cost,
        lockdown_quarter_cost,
        verdict,
    })
}
