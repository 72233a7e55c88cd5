//! Geometric weekly-death-rate scenarios.
//!
//! A scenario is fully described by an initial weekly death rate, a
//! constant weekly multiplication factor and a horizon in weeks. The
//! death rate in week `n` is `D * F^n` and cumulative totals follow the
//! geometric-series closed form, with an explicit limit branch at `F = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-parameter epidemic scenario: initial rate `D`, weekly factor `F`,
/// evaluated over a fixed horizon of weeks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricScenario {
    #[serde(rename = "name")]
    pub label: String,
    /// Deaths per week entering the projection (week 0 rate).
    pub initial_weekly_deaths: f64,
    /// Multiplicative change in the weekly death rate per week.
    pub weekly_factor: f64,
    /// Number of projected weeks, `>= 1`.
    pub horizon_weeks: u32,
}

/// Weekly projection of a scenario, optionally truncated by a
/// finite-population cap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    /// Deaths in weeks `1..=horizon`.
    pub weekly_deaths: Vec<f64>,
    /// Total deaths over the horizon; equals the sum of `weekly_deaths`.
    pub cumulative_deaths: f64,
    /// True when the population cap truncated growth.
    pub capped: bool,
}

impl GeometricScenario {
    pub fn new(
        label: impl Into<String>,
        initial_weekly_deaths: f64,
        weekly_factor: f64,
        horizon_weeks: u32,
    ) -> Result<Self> {
        let scenario = GeometricScenario {
            label: label.into(),
            initial_weekly_deaths,
            weekly_factor,
            horizon_weeks,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial_weekly_deaths > 0.0) || !self.initial_weekly_deaths.is_finite() {
            return Err(Error::invalid(
                "initial_weekly_deaths",
                format!("must be finite and > 0, got {}", self.initial_weekly_deaths),
            ));
        }
        if !(self.weekly_factor > 0.0) || !self.weekly_factor.is_finite() {
            return Err(Error::invalid(
                "weekly_factor",
                format!("must be finite and > 0, got {}", self.weekly_factor),
            ));
        }
        if self.horizon_weeks < 1 {
            return Err(Error::invalid("horizon_weeks", "must be >= 1"));
        }
        Ok(())
    }

    /// Death rate in week `n` (1-based): `D * F^n`.
    pub fn weekly_deaths(&self, week: u32) -> Result<f64> {
        if week < 1 || week > self.horizon_weeks {
            return Err(Error::WeekOutOfRange {
                week,
                horizon: self.horizon_weeks,
            });
        }
        Ok(self.initial_weekly_deaths * self.weekly_factor.powi(week as i32))
    }

    /// Total deaths over weeks `1..=horizon`.
    ///
    /// Uses `D*F*(F^N - 1)/(F - 1)` for `F != 1` and the limit `D*N` at
    /// `F = 1`. The numerator is evaluated as `exp_m1(N*ln F)` so the
    /// closed form stays accurate arbitrarily close to `F = 1`.
    pub fn cumulative_deaths(&self) -> f64 {
        let d = self.initial_weekly_deaths;
        let f = self.weekly_factor;
        let n = self.horizon_weeks;
        if f == 1.0 {
            return d * n as f64;
        }
        let pow_minus_one = (n as f64 * f.ln()).exp_m1();
        d * f * pow_minus_one / (f - 1.0)
    }

    /// Cumulative deaths of `self` (an easing scenario) minus those of
    /// `lockdown`, over a shared horizon. Negative when lockdown is worse.
    pub fn excess_deaths(&self, lockdown: &GeometricScenario) -> Result<f64> {
        if self.horizon_weeks != lockdown.horizon_weeks {
            return Err(Error::HorizonMismatch {
                left: self.horizon_weeks,
                right: lockdown.horizon_weeks,
            });
        }
        Ok(self.cumulative_deaths() - lockdown.cumulative_deaths())
    }

    /// Projects the weekly series but truncates once the implied cumulative
    /// infections (`cumulative_deaths / ifr`) would exceed
    /// `population * max_infected_fraction`. The capping week emits the
    /// residual death budget and later weeks emit zero.
    pub fn project_with_cap(
        &self,
        population: f64,
        max_infected_fraction: f64,
        ifr: f64,
    ) -> Result<Trajectory> {
        if !(population > 0.0) || !population.is_finite() {
            return Err(Error::invalid("population", "must be finite and > 0"));
        }
        if !(max_infected_fraction > 0.0 && max_infected_fraction <= 1.0) {
            return Err(Error::invalid(
                "max_infected_fraction",
                "must lie in (0, 1]",
            ));
        }
        if !(ifr > 0.0 && ifr < 1.0) {
            return Err(Error::invalid("ifr", "must lie in (0, 1)"));
        }

        let death_budget = population * max_infected_fraction * ifr;
        let mut weekly = Vec::with_capacity(self.horizon_weeks as usize);
        let mut cumulative = 0.0_f64;
        let mut capped = false;
        for week in 1..=self.horizon_weeks {
            // Same power-form evaluation as weekly_deaths, so capped and
            // uncapped weeks compare exactly.
            let rate = self.initial_weekly_deaths * self.weekly_factor.powi(week as i32);
            if !rate.is_finite() {
                return Err(Error::NonFinite("project_with_cap weekly rate"));
            }
            let emitted = if capped {
                0.0
            } else if cumulative + rate > death_budget {
                capped = true;
                let residual = death_budget - cumulative;
                cumulative = death_budget;
                residual
            } else {
                cumulative += rate;
                rate
            };
            weekly.push(emitted);
        }
        Ok(Trajectory {
            weekly_deaths: weekly,
            cumulative_deaths: cumulative,
            capped,
        })
    }
}
