//! Option value of epidemic end states under uncertain future treatment
//! discovery and vaccine arrival.
//!
//! A state at the planning horizon is summarized by its weekly death
//! rate, the weekly factor under the policy in force, the fraction of the
//! population already infected, and a week counter anchoring the
//! treatment-discovery clock to the start of the pandemic. Future deaths
//! are projected geometrically, scaled down by `m^M` once `M` treatments
//! are available, optionally cut off by a vaccine, and truncated by the
//! remaining susceptible pool.
//!
//! Monte Carlo estimates use ChaCha8 with a 64-bit seed. Each sample
//! draws from its own ChaCha stream (stream number = sample index), so
//! results are bit-reproducible, independent of evaluation order, and
//! earlier samples are unchanged when `n_samples` grows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::epidemic::SirParams;
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_by};
use crate::qaly::QalyValuation;

/// Weeks per quarter, the granularity of vaccine arrival.
pub const WEEKS_PER_QUARTER: u32 = 13;

/// How treatment discoveries arrive over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscoveryMode {
    /// One discovery at the end of every interval, deterministically.
    DeterministicQuarterly,
    /// Discovery counts drawn week by week from a Poisson process.
    Poisson,
}

/// Treatment-discovery process and its per-discovery mortality effect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreatmentDiscoveryModel {
    #[serde(default = "default_mode")]
    pub mode: DiscoveryMode,
    /// Weeks between deterministic discoveries.
    #[serde(default = "default_interval")]
    pub discovery_interval_weeks: f64,
    /// Mortality is multiplied by this once per discovery, in (0, 1].
    #[serde(default = "default_multiplier")]
    pub mortality_multiplier_per_discovery: f64,
    /// Arrival rate for the Poisson mode, discoveries per week.
    #[serde(default = "default_poisson_rate")]
    pub poisson_rate_per_week: f64,
}

fn default_mode() -> DiscoveryMode {
    DiscoveryMode::DeterministicQuarterly
}

fn default_interval() -> f64 {
    13.0
}

fn default_multiplier() -> f64 {
    0.92
}

fn default_poisson_rate() -> f64 {
    1.0 / 13.0
}

impl Default for TreatmentDiscoveryModel {
    fn default() -> Self {
        TreatmentDiscoveryModel {
            mode: default_mode(),
            discovery_interval_weeks: default_interval(),
            mortality_multiplier_per_discovery: default_multiplier(),
            poisson_rate_per_week: default_poisson_rate(),
        }
    }
}

impl TreatmentDiscoveryModel {
    /// Preset with the stronger 10% per-discovery effect (0.90 multiplier).
    pub fn effect_10pct() -> Self {
        TreatmentDiscoveryModel {
            mortality_multiplier_per_discovery: 0.90,
            ..TreatmentDiscoveryModel::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.mortality_multiplier_per_discovery;
        if !(m > 0.0 && m <= 1.0) {
            return Err(Error::invalid(
                "mortality_multiplier_per_discovery",
                format!("must lie in (0, 1], got {m}"),
            ));
        }
        if !(self.discovery_interval_weeks > 0.0) || !self.discovery_interval_weeks.is_finite() {
            return Err(Error::invalid(
                "discovery_interval_weeks",
                "must be finite and > 0",
            ));
        }
        if !(self.poisson_rate_per_week >= 0.0) || !self.poisson_rate_per_week.is_finite() {
            return Err(Error::invalid(
                "poisson_rate_per_week",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }

    /// Mortality multiplier once `discoveries` treatments are available.
    pub fn mortality_multiplier(&self, discoveries: u32) -> f64 {
        self.mortality_multiplier_per_discovery.powi(discoveries as i32)
    }

    /// Deterministic discovery count available in the given absolute week:
    /// a discovery lands at the end of each interval and takes effect the
    /// following week, so week `w` benefits from `floor((w-1)/interval)`
    /// discoveries. Weeks 26, 39 and 52 after the pandemic start see
    /// multipliers 0.92, 0.8464 and 0.778688 at the defaults.
    pub fn discoveries_before_week(&self, absolute_week: u32) -> u32 {
        if absolute_week == 0 {
            return 0;
        }
        ((absolute_week - 1) as f64 / self.discovery_interval_weeks).floor() as u32
    }
}

/// What a vaccine does once it arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VaccineEffect {
    /// No deaths from the quarter after arrival.
    EndsEpidemic,
    /// The weekly factor is multiplied by `transmission_multiplier_value`
    /// from the quarter after arrival.
    TransmissionMultiplier,
}

/// Vaccine arrival model, quarterly granularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VaccineModel {
    /// Probability of arrival in each quarter; 0 is the pessimistic
    /// baseline and any other value is an explicit assumption.
    #[serde(default)]
    pub per_quarter_arrival_probability: f64,
    #[serde(default = "default_vaccine_effect")]
    pub effect: VaccineEffect,
    /// Factor applied to the weekly factor under the
    /// `transmission_multiplier` effect, in (0, 1].
    #[serde(default = "default_transmission_multiplier")]
    pub transmission_multiplier_value: f64,
}

fn default_vaccine_effect() -> VaccineEffect {
    VaccineEffect::EndsEpidemic
}

fn default_transmission_multiplier() -> f64 {
    1.0
}

impl Default for VaccineModel {
    fn default() -> Self {
        VaccineModel {
            per_quarter_arrival_probability: 0.0,
            effect: default_vaccine_effect(),
            transmission_multiplier_value: default_transmission_multiplier(),
        }
    }
}

impl VaccineModel {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.per_quarter_arrival_probability) {
            return Err(Error::invalid(
                "per_quarter_arrival_probability",
                "must lie in [0, 1]",
            ));
        }
        let tm = self.transmission_multiplier_value;
        if self.effect == VaccineEffect::TransmissionMultiplier && !(tm > 0.0 && tm <= 1.0) {
            return Err(Error::invalid(
                "transmission_multiplier_value",
                format!("must lie in (0, 1], got {tm}"),
            ));
        }
        Ok(())
    }
}

/// Epidemic condition at the planning horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndState {
    /// Deaths per week at the horizon.
    pub weekly_deaths: f64,
    /// Weekly factor under the policy assumed from the horizon on.
    pub weekly_factor_under_policy: f64,
    /// Fraction of the population infected so far, in [0, 1).
    pub cumulative_infected_fraction: f64,
    /// Weeks since the pandemic start; anchors the discovery clock.
    pub weeks_since_pandemic_start: u32,
}

impl EndState {
    pub fn validate(&self) -> Result<()> {
        if !(self.weekly_deaths >= 0.0) || !self.weekly_deaths.is_finite() {
            return Err(Error::invalid("weekly_deaths", "must be finite and >= 0"));
        }
        if !(self.weekly_factor_under_policy > 0.0)
            || !self.weekly_factor_under_policy.is_finite()
        {
            return Err(Error::invalid(
                "weekly_factor_under_policy",
                "must be finite and > 0",
            ));
        }
        if !(0.0..1.0).contains(&self.cumulative_infected_fraction) {
            return Err(Error::invalid(
                "cumulative_infected_fraction",
                "must lie in [0, 1)",
            ));
        }
        Ok(())
    }
}

/// Valuation of an end state's expected future.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndStateValuation {
    pub expected_future_deaths: f64,
    pub expected_future_qalys: f64,
    /// `expected_future_qalys * pounds_per_qaly`, GBP.
    pub monetized: f64,
    /// Standard error of the mean of future deaths; exactly 0 when every
    /// stochastic element is degenerate.
    pub standard_error: f64,
    pub samples: u64,
}

/// Everything shared between the states being valued: discovery model,
/// vaccine model, optional susceptible-pool cap and the infection
/// fatality rate converting infections to deaths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FutureModel {
    #[serde(default)]
    pub treatment: TreatmentDiscoveryModel,
    #[serde(default)]
    pub vaccine: VaccineModel,
    /// Reproduction parameters plus population for the death budget; the
    /// projection is uncapped when absent.
    #[serde(default)]
    pub cap: Option<SirParams>,
    /// Infection fatality rate, in (0, 1).
    #[serde(default = "default_ifr")]
    pub ifr: f64,
}

fn default_ifr() -> f64 {
    0.006
}

impl Default for FutureModel {
    fn default() -> Self {
        FutureModel {
            treatment: TreatmentDiscoveryModel::default(),
            vaccine: VaccineModel::default(),
            cap: None,
            ifr: default_ifr(),
        }
    }
}

impl FutureModel {
    pub fn validate(&self) -> Result<()> {
        self.treatment.validate()?;
        self.vaccine.validate()?;
        if let Some(cap) = &self.cap {
            cap.validate()?;
            if cap.population.is_none() {
                return Err(Error::invalid(
                    "cap.population",
                    "required to derive the death budget",
                ));
            }
        }
        if !(self.ifr > 0.0 && self.ifr < 1.0) {
            return Err(Error::invalid("ifr", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Residual death budget for a state: the infections still to come under
/// the final-size ceiling, times population and fatality rate.
fn death_budget(cap: &SirParams, ifr: f64, state: &EndState) -> Result<f64> {
    let population = cap
        .population
        .ok_or_else(|| Error::invalid("cap.population", "required to derive the death budget"))?;
    if state.cumulative_infected_fraction >= cap.initial_susceptible_fraction {
        return Ok(0.0);
    }
    let future_fraction = cap.future_attack(state.cumulative_infected_fraction)?;
    Ok(population * future_fraction * ifr)
}

/// One projected path. `discoveries[n-1]` gives the treatments available
/// in window week `n`; `epidemic_ends_week` zeroes deaths from that week
/// on; `factor_change` rescales the weekly factor from a given week;
/// `budget` truncates with residual-then-zero semantics.
fn path_future_deaths(
    state: &EndState,
    horizon_weeks: u32,
    per_discovery: f64,
    discoveries: &[u32],
    epidemic_ends_week: Option<u32>,
    factor_change: Option<(u32, f64)>,
    budget: Option<f64>,
) -> f64 {
    let mut geometric = 1.0_f64;
    let mut cumulative = 0.0_f64;
    for n in 1..=horizon_weeks {
        if let Some(end) = epidemic_ends_week {
            if n >= end {
                break;
            }
        }
        let mut factor = state.weekly_factor_under_policy;
        if let Some((from, multiplier)) = factor_change {
            if n >= from {
                factor *= multiplier;
            }
        }
        geometric *= factor;
        let weekly = state.weekly_deaths
            * geometric
            * per_discovery.powi(discoveries[(n - 1) as usize] as i32);
        match budget {
            Some(b) if cumulative + weekly > b => {
                cumulative = b;
                break;
            }
            _ => cumulative += weekly,
        }
    }
    cumulative
}

/// Deterministic discovery counts for each window week.
fn deterministic_discovery_counts(
    treatment: &TreatmentDiscoveryModel,
    clock: u32,
    horizon_weeks: u32,
) -> Vec<u32> {
    (1..=horizon_weeks)
        .map(|n| treatment.discoveries_before_week(clock + n))
        .collect()
}

/// Deterministic future-death projection for an end state: geometric
/// growth under the policy factor, scaled by the quarterly discovery
/// schedule, truncated by the remaining susceptible pool.
pub fn project_future_deaths(
    state: &EndState,
    horizon_weeks: u32,
    treatment: &TreatmentDiscoveryModel,
    cap: Option<&SirParams>,
    ifr: f64,
) -> Result<f64> {
    state.validate()?;
    treatment.validate()?;
    if horizon_weeks < 1 {
        return Err(Error::invalid("horizon_weeks", "must be >= 1"));
    }
    if treatment.mode != DiscoveryMode::DeterministicQuarterly {
        return Err(Error::invalid(
            "treatment.mode",
            "deterministic projection requires the deterministic_quarterly mode",
        ));
    }
    if !(ifr > 0.0 && ifr < 1.0) {
        return Err(Error::invalid("ifr", "must lie in (0, 1)"));
    }
    let budget = cap.map(|c| death_budget(c, ifr, state)).transpose()?;
    let clock = state.weeks_since_pandemic_start;
    let counts = deterministic_discovery_counts(treatment, clock, horizon_weeks);
    Ok(path_future_deaths(
        state,
        horizon_weeks,
        treatment.mortality_multiplier_per_discovery,
        &counts,
        None,
        None,
        budget,
    ))
}

/// Monte Carlo valuation of an end state.
///
/// Samples discovery times (Poisson mode) and the vaccine arrival quarter,
/// averages future deaths across `n_samples` independent ChaCha streams,
/// and converts the mean into QALYs and GBP. The reported standard error
/// is on the deaths mean and is exactly zero when all samples coincide.
pub fn mc_end_state_value(
    state: &EndState,
    horizon_weeks: u32,
    model: &FutureModel,
    valuation: &QalyValuation,
    n_samples: u64,
    seed: u64,
) -> Result<EndStateValuation> {
    state.validate()?;
    model.validate()?;
    valuation.validate()?;
    if horizon_weeks < 1 {
        return Err(Error::invalid("horizon_weeks", "must be >= 1"));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "must be >= 1"));
    }

    let budget = model
        .cap
        .as_ref()
        .map(|c| death_budget(c, model.ifr, state))
        .transpose()?;
    let clock = state.weeks_since_pandemic_start;
    let treatment = &model.treatment;
    let n_quarters = horizon_weeks.div_ceil(WEEKS_PER_QUARTER);
    let vaccine_probability = model.vaccine.per_quarter_arrival_probability;
    let poisson = match treatment.mode {
        DiscoveryMode::Poisson if treatment.poisson_rate_per_week > 0.0 => Some(
            Poisson::new(treatment.poisson_rate_per_week)
                .map_err(|_| Error::invalid("poisson_rate_per_week", "invalid Poisson rate"))?,
        ),
        _ => None,
    };
    // Discoveries already made before the window opens.
    let past_discoveries = treatment.discoveries_before_week(clock + 1);
    let deterministic_counts = match treatment.mode {
        DiscoveryMode::DeterministicQuarterly => {
            deterministic_discovery_counts(treatment, clock, horizon_weeks)
        }
        DiscoveryMode::Poisson => Vec::new(),
    };

    let mut samples = Vec::with_capacity(n_samples as usize);
    let mut poisson_counts = vec![0u32; horizon_weeks as usize];
    for sample_index in 0..n_samples {
        // A fresh generator per sample, positioned on its own stream, makes
        // every sample a pure function of (seed, sample_index).
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample_index);

        // Fixed draw order: all vaccine uniforms first, then (Poisson mode)
        // one discovery count per week. Every draw happens regardless of
        // outcome so that common random numbers line up across parameter
        // changes.
        let mut arrival_quarter = None;
        for quarter in 1..=n_quarters {
            let u: f64 = rng.random();
            if arrival_quarter.is_none() && u < vaccine_probability {
                arrival_quarter = Some(quarter);
            }
        }
        let discoveries: &[u32] = match treatment.mode {
            DiscoveryMode::DeterministicQuarterly => &deterministic_counts,
            DiscoveryMode::Poisson => {
                let mut available = past_discoveries;
                for slot in poisson_counts.iter_mut() {
                    // Count available *entering* the week; this week's
                    // arrivals help only later weeks.
                    *slot = available;
                    if let Some(dist) = &poisson {
                        available += dist.sample(&mut rng) as u32;
                    }
                }
                &poisson_counts
            }
        };

        // A vaccine arriving in quarter q takes effect the following week.
        let effective_week = arrival_quarter.map(|q| q * WEEKS_PER_QUARTER + 1);
        let (ends_week, factor_change) = match (effective_week, model.vaccine.effect) {
            (Some(week), VaccineEffect::EndsEpidemic) => (Some(week), None),
            (Some(week), VaccineEffect::TransmissionMultiplier) => {
                (None, Some((week, model.vaccine.transmission_multiplier_value)))
            }
            (None, _) => (None, None),
        };

        samples.push(path_future_deaths(
            state,
            horizon_weeks,
            treatment.mortality_multiplier_per_discovery,
            discoveries,
            ends_week,
            factor_change,
            budget,
        ));
    }

    let n = samples.len();
    let first = samples[0];
    let degenerate = samples.iter().all(|s| s.to_bits() == first.to_bits());
    let (mean, standard_error) = if degenerate {
        (first, 0.0)
    } else {
        let mean = pairwise_sum(&samples) / n as f64;
        let sum_sq = pairwise_sum_by(n, &|i| {
            let dev = samples[i] - mean;
            dev * dev
        });
        (mean, (sum_sq / (n as f64 * (n as f64 - 1.0))).sqrt())
    };

    let qalys = valuation.death_qaly_cost(mean);
    Ok(EndStateValuation {
        expected_future_deaths: mean,
        expected_future_qalys: qalys,
        monetized: valuation.monetize(qalys),
        standard_error,
        samples: n_samples,
    })
}

/// Monetized cost difference between two end states under one shared
/// model configuration and common random numbers: `value(b) - value(a)`,
/// positive when `b` is the costlier state.
pub fn end_state_value_difference(
    a: &EndState,
    b: &EndState,
    horizon_weeks: u32,
    model: &FutureModel,
    valuation: &QalyValuation,
    n_samples: u64,
    seed: u64,
) -> Result<f64> {
    let value_a = mc_end_state_value(a, horizon_weeks, model, valuation, n_samples, seed)?;
    let value_b = mc_end_state_value(b, horizon_weeks, model, valuation, n_samples, seed)?;
    Ok(value_b.monetized - value_a.monetized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::GeometricScenario;

    fn state(weekly_deaths: f64, factor: f64, infected: f64, clock: u32) -> EndState {
        EndState {
            weekly_deaths,
            weekly_factor_under_policy: factor,
            cumulative_infected_fraction: infected,
            weeks_since_pandemic_start: clock,
        }
    }

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let rel = ((actual - expected) / expected).abs();
        assert!(rel <= tol, "expected {expected}, got {actual} (rel {rel:e})");
    }

    #[test]
    fn multiplier_powers_match_reference_checkpoints() {
        let t = TreatmentDiscoveryModel::default();
        assert!((t.mortality_multiplier(1) - 0.92).abs() < 1e-12);
        assert!((t.mortality_multiplier(2) - 0.8464).abs() < 1e-12);
        assert!((t.mortality_multiplier(3) - 0.778688).abs() < 1e-12);
        assert_eq!(t.mortality_multiplier(0), 1.0);

        let half = TreatmentDiscoveryModel {
            mortality_multiplier_per_discovery: 0.5,
            ..t
        };
        assert_eq!(half.mortality_multiplier(4), 0.0625);
    }

    #[test]
    fn discovery_clock_hits_quarterly_checkpoints() {
        // Weeks 26/39/52 after the pandemic start (roughly mid-September,
        // mid-December, mid-March) see 1, 2 and 3 discoveries.
        let t = TreatmentDiscoveryModel::default();
        assert_eq!(t.discoveries_before_week(1), 0);
        assert_eq!(t.discoveries_before_week(13), 0);
        assert_eq!(t.discoveries_before_week(14), 1);
        assert_eq!(t.discoveries_before_week(26), 1);
        assert_eq!(t.discoveries_before_week(27), 2);
        assert_eq!(t.discoveries_before_week(39), 2);
        assert_eq!(t.discoveries_before_week(40), 3);
        assert_eq!(t.discoveries_before_week(52), 3);
    }

    #[test]
    fn effect_10pct_preset() {
        let t = TreatmentDiscoveryModel::effect_10pct();
        assert_eq!(t.mortality_multiplier_per_discovery, 0.90);
        assert_eq!(t.mode, DiscoveryMode::DeterministicQuarterly);
    }

    #[test]
    fn unit_multiplier_reduces_to_geometric_cumulative() {
        let no_effect = TreatmentDiscoveryModel {
            mortality_multiplier_per_discovery: 1.0,
            ..TreatmentDiscoveryModel::default()
        };
        let s = state(7572.0, 0.7, 0.0, 26);
        let deaths = project_future_deaths(&s, 13, &no_effect, None, 0.006).unwrap();
        let scenario = GeometricScenario::new("ref", 7572.0, 0.7, 13).unwrap();
        assert_rel(deaths, scenario.cumulative_deaths(), 1e-12);
    }

    #[test]
    fn two_prior_discoveries_factor_out_of_the_window() {
        // Clock at week 26: weeks 27..=39 all carry exactly two
        // discoveries, so the multiplier factors out of the geometric sum.
        let t = TreatmentDiscoveryModel::default();
        let s = state(7572.0, 0.7, 0.0, 26);
        let deaths = project_future_deaths(&s, 13, &t, None, 0.006).unwrap();
        let scenario = GeometricScenario::new("ref", 7572.0, 0.7, 13).unwrap();
        let expected = t.mortality_multiplier(2) * scenario.cumulative_deaths();
        assert_rel(deaths, expected, 1e-12);
        assert_rel(deaths, 14_697.0, 0.01);
    }

    #[test]
    fn exhausted_budget_truncates_immediately() {
        let t = TreatmentDiscoveryModel {
            mortality_multiplier_per_discovery: 1.0,
            ..TreatmentDiscoveryModel::default()
        };
        let cap = SirParams {
            r0: 2.0,
            initial_susceptible_fraction: 1.0,
            population: Some(1000.0),
        };
        let s = state(100.0, 2.0, 0.0, 0);
        let deaths = project_future_deaths(&s, 10, &t, Some(&cap), 0.1).unwrap();
        // Budget = 1000 * future_attack(0) * 0.1, far below week-1 deaths.
        let budget = 1000.0 * cap.future_attack(0.0).unwrap() * 0.1;
        assert_eq!(deaths, budget);
    }

    #[test]
    fn poisson_mode_rejected_by_deterministic_projection() {
        let t = TreatmentDiscoveryModel {
            mode: DiscoveryMode::Poisson,
            ..TreatmentDiscoveryModel::default()
        };
        let s = state(100.0, 1.0, 0.0, 0);
        assert!(project_future_deaths(&s, 13, &t, None, 0.006).is_err());
    }

    #[test]
    fn degenerate_monte_carlo_collapses_to_projection() {
        let model = FutureModel::default();
        let s = state(7572.0, 0.7, 0.1, 26);
        let valuation = QalyValuation::default();
        let mc = mc_end_state_value(&s, 13, &model, &valuation, 500, 7).unwrap();
        let deterministic =
            project_future_deaths(&s, 13, &model.treatment, None, model.ifr).unwrap();
        assert_eq!(mc.expected_future_deaths.to_bits(), deterministic.to_bits());
        assert_eq!(mc.standard_error, 0.0);
        assert_eq!(mc.expected_future_qalys, valuation.death_qaly_cost(deterministic));
        assert_eq!(mc.monetized, valuation.monetize(mc.expected_future_qalys));
    }

    #[test]
    fn certain_vaccine_stops_deaths_after_first_quarter() {
        let model = FutureModel {
            vaccine: VaccineModel {
                per_quarter_arrival_probability: 1.0,
                ..VaccineModel::default()
            },
            treatment: TreatmentDiscoveryModel {
                mortality_multiplier_per_discovery: 1.0,
                ..TreatmentDiscoveryModel::default()
            },
            ..FutureModel::default()
        };
        let s = state(100.0, 1.0, 0.0, 0);
        let mc =
            mc_end_state_value(&s, 26, &model, &QalyValuation::default(), 200, 11).unwrap();
        // Arrival is certain in quarter 1, effective from week 14: exactly
        // the first 13 weeks accrue.
        assert_rel(mc.expected_future_deaths, 1300.0, 1e-12);
        assert_eq!(mc.standard_error, 0.0);
    }

    #[test]
    fn monte_carlo_mean_matches_two_quarter_closed_form() {
        let p = 0.35;
        let model = FutureModel {
            vaccine: VaccineModel {
                per_quarter_arrival_probability: p,
                ..VaccineModel::default()
            },
            treatment: TreatmentDiscoveryModel {
                mortality_multiplier_per_discovery: 1.0,
                ..TreatmentDiscoveryModel::default()
            },
            ..FutureModel::default()
        };
        let s = state(100.0, 1.1, 0.0, 0);
        let mc =
            mc_end_state_value(&s, 26, &model, &QalyValuation::default(), 100_000, 42).unwrap();

        // Enumeration oracle: quarter 1 always accrues; quarter 2 accrues
        // unless the vaccine arrived in quarter 1.
        let q1 = GeometricScenario::new("q1", 100.0, 1.1, 13)
            .unwrap()
            .cumulative_deaths();
        let q12 = GeometricScenario::new("q12", 100.0, 1.1, 26)
            .unwrap()
            .cumulative_deaths();
        let expected = q1 + (1.0 - p) * (q12 - q1);
        assert!(mc.standard_error > 0.0);
        assert!(
            (mc.expected_future_deaths - expected).abs() <= 3.0 * mc.standard_error,
            "mean {} vs oracle {expected} (se {})",
            mc.expected_future_deaths,
            mc.standard_error
        );
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let model = FutureModel {
            vaccine: VaccineModel {
                per_quarter_arrival_probability: 0.4,
                ..VaccineModel::default()
            },
            treatment: TreatmentDiscoveryModel {
                mode: DiscoveryMode::Poisson,
                ..TreatmentDiscoveryModel::default()
            },
            ..FutureModel::default()
        };
        let s = state(500.0, 1.05, 0.05, 26);
        let v = QalyValuation::default();
        let first = mc_end_state_value(&s, 26, &model, &v, 2_000, 99).unwrap();
        let second = mc_end_state_value(&s, 26, &model, &v, 2_000, 99).unwrap();
        assert_eq!(
            first.expected_future_deaths.to_bits(),
            second.expected_future_deaths.to_bits()
        );
        assert_eq!(first.standard_error.to_bits(), second.standard_error.to_bits());
        let other_seed = mc_end_state_value(&s, 26, &model, &v, 2_000, 100).unwrap();
        assert_ne!(
            first.expected_future_deaths.to_bits(),
            other_seed.expected_future_deaths.to_bits()
        );
    }

    #[test]
    fn growing_sample_count_preserves_earlier_samples() {
        // Per-sample streams: the mean over k samples must be recoverable
        // from the means over k and k+1 samples of the same seed.
        let model = FutureModel {
            vaccine: VaccineModel {
                per_quarter_arrival_probability: 0.5,
                ..VaccineModel::default()
            },
            treatment: TreatmentDiscoveryModel {
                mortality_multiplier_per_discovery: 1.0,
                ..TreatmentDiscoveryModel::default()
            },
            ..FutureModel::default()
        };
        let s = state(100.0, 1.0, 0.0, 0);
        let v = QalyValuation::default();
        for k in [1u64, 2, 3, 7] {
            let smaller = mc_end_state_value(&s, 26, &model, &v, k, 5).unwrap();
            let larger = mc_end_state_value(&s, 26, &model, &v, k + 1, 5).unwrap();
            // Recover sample k from the two means; it must be one of the
            // two attainable path values (vaccine in quarter 1 or never).
            let recovered = larger.expected_future_deaths * (k + 1) as f64
                - smaller.expected_future_deaths * k as f64;
            let q1 = 1300.0;
            let full = 2600.0;
            assert!(
                (recovered - q1).abs() < 1e-6 || (recovered - full).abs() < 1e-6,
                "recovered sample {recovered} is not an attainable path value"
            );
        }
    }

    #[test]
    fn suppression_is_cheaper_than_raging_epidemic() {
        let model = FutureModel::default();
        let v = QalyValuation::default();
        let suppression = state(13.0, 1.0, 0.107, 26);
        let raging = state(7572.0, 1.0, 0.22, 26);
        let difference =
            end_state_value_difference(&suppression, &raging, 26, &model, &v, 100, 3).unwrap();
        assert!(difference > 0.0);

        let same =
            end_state_value_difference(&raging, &raging, 26, &model, &v, 100, 3).unwrap();
        assert_eq!(same, 0.0);
    }

    #[test]
    fn pessimistic_assumptions_erase_the_difference() {
        // No treatments, no vaccine, and a binding cap with identical
        // prior infections: both states run to the same final size, so
        // the end-state difference vanishes.
        let model = FutureModel {
            treatment: TreatmentDiscoveryModel {
                mortality_multiplier_per_discovery: 1.0,
                ..TreatmentDiscoveryModel::default()
            },
            cap: Some(SirParams {
                r0: 2.0,
                initial_susceptible_fraction: 1.0,
                population: Some(10_000.0),
            }),
            ifr: 0.01,
            ..FutureModel::default()
        };
        let v = QalyValuation::default();
        let suppression = state(13.0, 1.0, 0.2, 26);
        let raging = state(7572.0, 1.15, 0.2, 26);
        let difference =
            end_state_value_difference(&suppression, &raging, 52, &model, &v, 50, 17).unwrap();
        assert_eq!(difference, 0.0);
    }

    #[test]
    fn zero_samples_rejected() {
        let s = state(100.0, 1.0, 0.0, 0);
        assert!(mc_end_state_value(
            &s,
            13,
            &FutureModel::default(),
            &QalyValuation::default(),
            0,
            1
        )
        .is_err());
    }

    #[test]
    fn validation_rejects_bad_models() {
        let t = TreatmentDiscoveryModel {
            mortality_multiplier_per_discovery: 0.0,
            ..TreatmentDiscoveryModel::default()
        };
        assert!(t.validate().is_err());
        let vac = VaccineModel {
            per_quarter_arrival_probability: 1.5,
            ..VaccineModel::default()
        };
        assert!(vac.validate().is_err());
        let vac = VaccineModel {
            effect: VaccineEffect::TransmissionMultiplier,
            transmission_multiplier_value: 0.0,
            per_quarter_arrival_probability: 0.5,
        };
        assert!(vac.validate().is_err());
        let s = EndState {
            weekly_deaths: -1.0,
            weekly_factor_under_policy: 1.0,
            cumulative_infected_fraction: 0.0,
            weeks_since_pandemic_start: 0,
        };
        assert!(s.validate().is_err());
        let model = FutureModel {
            cap: Some(SirParams {
                r0: 2.0,
                initial_susceptible_fraction: 1.0,
                population: None,
            }),
            ..FutureModel::default()
        };
        assert!(model.validate().is_err());
    }
}
