//! Run configuration: a single strict JSON document.
//!
//! Unknown keys are rejected everywhere, every numeric field is validated
//! against its owning type's invariants, and every omitted block falls
//! back to the published reference defaults (UK, mid-2020), so an empty
//! `{}` is a complete, runnable assumption set.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use epicost_core::{
    AfterEffectParams, DecisionModel, EndState, FutureModel, GeometricScenario, GridRange,
    HorizonRange, HospitalizationParams, IllnessCostParams, QalyValuation, SearchBox, SirParams,
    TreatmentDiscoveryModel, VaccineModel,
};

use crate::error::CliError;
use crate::report::Format;

pub const UK_POPULATION: f64 = 67_000_000.0;
pub const DEFAULT_IFR: f64 = 0.006;
/// Cited lowest economic cost of one quarter of lockdown, GBP.
pub const DEFAULT_LOCKDOWN_QUARTER_COST: f64 = 200e9;

/// Top-level configuration document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seed for all Monte Carlo work.
    #[serde(default)]
    pub seed: u64,
    /// Output format unless overridden on the command line.
    #[serde(default)]
    pub output_format: Format,
    /// Named weekly-death-rate scenarios, in output order.
    #[serde(default = "default_scenarios")]
    pub scenarios: Vec<GeometricScenario>,
    /// QALY valuation: preset name or explicit figures.
    #[serde(default)]
    pub valuation: ValuationConfig,
    #[serde(default)]
    pub illness: IllnessCostParams,
    #[serde(default)]
    pub after_effects: AfterEffectParams,
    #[serde(default)]
    pub hospitalization: HospitalizationParams,
    /// Weekly-vs-block toy decision model.
    #[serde(default = "default_decision")]
    pub decision: DecisionModel,
    #[serde(default)]
    pub compare: CompareConfig,
    #[serde(default)]
    pub epidemic: EpidemicConfig,
    #[serde(default)]
    pub option_value: OptionValueConfig,
    /// Search box for the consistency subcommand.
    #[serde(default = "default_consistency_box")]
    pub consistency: SearchBox,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            output_format: Format::default(),
            scenarios: default_scenarios(),
            valuation: ValuationConfig::default(),
            illness: IllnessCostParams::default(),
            after_effects: AfterEffectParams::default(),
            hospitalization: HospitalizationParams::default(),
            decision: default_decision(),
            compare: CompareConfig::default(),
            epidemic: EpidemicConfig::default(),
            option_value: OptionValueConfig::default(),
            consistency: default_consistency_box(),
            sweep: SweepConfig::default(),
        }
    }
}

fn default_scenarios() -> Vec<GeometricScenario> {
    let defs = [
        ("lockdown", 1230.0, 0.7, 13u32),
        ("ease_slow_decline", 1230.0, 0.9, 13),
        ("ease_flat", 1230.0, 1.0, 13),
        ("ease_growth", 1230.0, 1.15, 13),
        ("sept_ease", 7572.0, 1.15, 13),
        ("sept_lockdown", 7572.0, 0.7, 13),
    ];
    defs.iter()
        .map(|&(name, d, f, n)| GeometricScenario::new(name, d, f, n).expect("valid default"))
        .collect()
}

fn default_decision() -> DecisionModel {
    // The unit-ratio disagreement family: L = C*M.
    DecisionModel {
        lockdown_cost_per_week: 300_000.0 * 1230.0,
        cost_per_death: 300_000.0,
        initial_weekly_deaths: 1230.0,
        lockdown_factor: 0.5,
        easing_factor: 1.05,
        horizon_weeks: 12,
    }
}

fn default_consistency_box() -> SearchBox {
    SearchBox {
        lockdown_factor: GridRange {
            min: 0.3,
            max: 0.7,
            steps: 5,
        },
        easing_factor: GridRange {
            min: 1.01,
            max: 1.09,
            steps: 5,
        },
        horizon: HorizonRange {
            min: 8,
            max: 16,
            step: 2,
        },
        lockdown_cost_ratio: GridRange::fixed(1.0),
    }
}

/// Valuation selection: a named preset or explicit figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ValuationConfig {
    Preset(String),
    Explicit(QalyValuation),
}

impl Default for ValuationConfig {
    fn default() -> Self {
        ValuationConfig::Preset("nice-standard".to_string())
    }
}

impl ValuationConfig {
    pub fn resolve(&self) -> Result<QalyValuation, CliError> {
        match self {
            ValuationConfig::Preset(name) => QalyValuation::preset(name).ok_or_else(|| {
                CliError::Config(format!(
                    "valuation.preset: unknown preset '{name}' (expected one of {})",
                    epicost_core::VALUATION_PRESETS
                        .iter()
                        .map(|(n, _)| *n)
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            }),
            ValuationConfig::Explicit(v) => {
                v.validate().map_err(|e| CliError::Config(e.to_string()))?;
                Ok(*v)
            }
        }
    }

    /// Provenance note for report rows.
    pub fn provenance(&self) -> String {
        match self {
            ValuationConfig::Preset(name) => format!("preset: {name}"),
            ValuationConfig::Explicit(_) => "config".to_string(),
        }
    }
}

/// Scenario pair and cost for the quarterly comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    /// Name of the easing scenario.
    #[serde(default = "default_compare_ease")]
    pub ease: String,
    /// Name of the lockdown scenario.
    #[serde(default = "default_compare_lockdown")]
    pub lockdown: String,
    /// Economic cost of one quarter of lockdown, GBP.
    #[serde(default = "default_quarter_cost")]
    pub lockdown_quarter_cost: f64,
    /// Also charge illness and after-effect QALYs per death.
    #[serde(default)]
    pub extended: bool,
}

fn default_compare_ease() -> String {
    "sept_ease".to_string()
}

fn default_compare_lockdown() -> String {
    "sept_lockdown".to_string()
}

fn default_quarter_cost() -> f64 {
    DEFAULT_LOCKDOWN_QUARTER_COST
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            ease: default_compare_ease(),
            lockdown: default_compare_lockdown(),
            lockdown_quarter_cost: default_quarter_cost(),
            extended: false,
        }
    }
}

/// Reproduction numbers for the final-size table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicConfig {
    #[serde(default = "default_r0_values")]
    pub r0_values: Vec<f64>,
    #[serde(default = "default_s0")]
    pub initial_susceptible_fraction: f64,
    #[serde(default = "default_population")]
    pub population: Option<f64>,
}

fn default_r0_values() -> Vec<f64> {
    vec![0.8, 1.0, 1.5, 2.0, 2.5, 3.0]
}

fn default_s0() -> f64 {
    1.0
}

fn default_population() -> Option<f64> {
    Some(UK_POPULATION)
}

impl Default for EpidemicConfig {
    fn default() -> Self {
        EpidemicConfig {
            r0_values: default_r0_values(),
            initial_susceptible_fraction: default_s0(),
            population: default_population(),
        }
    }
}

/// One named end state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedEndState {
    pub name: String,
    pub weekly_deaths: f64,
    pub weekly_factor_under_policy: f64,
    pub cumulative_infected_fraction: f64,
    pub weeks_since_pandemic_start: u32,
}

impl NamedEndState {
    pub fn state(&self) -> EndState {
        EndState {
            weekly_deaths: self.weekly_deaths,
            weekly_factor_under_policy: self.weekly_factor_under_policy,
            cumulative_infected_fraction: self.cumulative_infected_fraction,
            weeks_since_pandemic_start: self.weeks_since_pandemic_start,
        }
    }
}

/// End states and the shared future model for the endstate subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionValueConfig {
    /// Weeks of future to value.
    #[serde(default = "default_ov_horizon")]
    pub horizon_weeks: u32,
    /// Monte Carlo samples unless overridden on the command line.
    #[serde(default = "default_ov_samples")]
    pub samples: u64,
    #[serde(default)]
    pub treatment: TreatmentDiscoveryModel,
    #[serde(default)]
    pub vaccine: VaccineModel,
    /// Susceptible-pool cap; null disables it.
    #[serde(default = "default_ov_cap")]
    pub cap: Option<SirParams>,
    #[serde(default = "default_ifr_field")]
    pub ifr: f64,
    #[serde(default = "default_end_states")]
    pub end_states: Vec<NamedEndState>,
}

fn default_ov_horizon() -> u32 {
    26
}

fn default_ov_samples() -> u64 {
    10_000
}

fn default_ov_cap() -> Option<SirParams> {
    Some(SirParams {
        r0: 2.5,
        initial_susceptible_fraction: 1.0,
        population: Some(UK_POPULATION),
    })
}

fn default_ifr_field() -> f64 {
    DEFAULT_IFR
}

fn default_end_states() -> Vec<NamedEndState> {
    // Mid-September states implied by the 13-week scenarios from mid-June:
    // cumulative infections are prior deaths over the IFR.
    vec![
        NamedEndState {
            name: "near_suppression".to_string(),
            weekly_deaths: 13.0,
            weekly_factor_under_policy: 1.0,
            cumulative_infected_fraction: 0.107,
            weeks_since_pandemic_start: 26,
        },
        NamedEndState {
            name: "raging_epidemic".to_string(),
            weekly_deaths: 7572.0,
            weekly_factor_under_policy: 1.0,
            cumulative_infected_fraction: 0.22,
            weeks_since_pandemic_start: 26,
        },
    ]
}

impl Default for OptionValueConfig {
    fn default() -> Self {
        OptionValueConfig {
            horizon_weeks: default_ov_horizon(),
            samples: default_ov_samples(),
            treatment: TreatmentDiscoveryModel::default(),
            vaccine: VaccineModel::default(),
            cap: default_ov_cap(),
            ifr: default_ifr_field(),
            end_states: default_end_states(),
        }
    }
}

impl OptionValueConfig {
    pub fn future_model(&self) -> FutureModel {
        FutureModel {
            treatment: self.treatment,
            vaccine: self.vaccine,
            cap: self.cap.clone(),
            ifr: self.ifr,
        }
    }
}

/// What the sweep subcommand runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Compare,
    Endstate,
}

/// Which parameter the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    PoundsPerQaly,
    QalysPerDeath,
    VaccineProbability,
}

impl SweepParameter {
    pub fn key(&self) -> &'static str {
        match self {
            SweepParameter::PoundsPerQaly => "pounds_per_qaly",
            SweepParameter::QalysPerDeath => "qalys_per_death",
            SweepParameter::VaccineProbability => "vaccine_probability",
        }
    }
}

/// Parameter grid for the sweep subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_target")]
    pub target: SweepTarget,
    #[serde(default = "default_sweep_parameter")]
    pub parameter: SweepParameter,
    #[serde(default = "default_sweep_values")]
    pub values: Vec<f64>,
}

fn default_sweep_target() -> SweepTarget {
    SweepTarget::Compare
}

fn default_sweep_parameter() -> SweepParameter {
    SweepParameter::PoundsPerQaly
}

fn default_sweep_values() -> Vec<f64> {
    vec![30_000.0, 50_000.0, 90_000.0, 300_000.0]
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            target: default_sweep_target(),
            parameter: default_sweep_parameter(),
            values: default_sweep_values(),
        }
    }
}

impl RunConfig {
    /// Parses and validates a config file.
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read {}: {e}", path.display()))
        })?;
        RunConfig::from_json(&text)
    }

    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<RunConfig, CliError> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("parse error: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Full validation: per-type invariants plus name resolution.
    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |e: epicost_core::Error| CliError::Config(e.to_string());

        if self.scenarios.is_empty() {
            return Err(CliError::Config("scenarios: at least one required".into()));
        }
        for s in &self.scenarios {
            s.validate().map_err(invalid)?;
        }
        let mut names: Vec<&str> = self.scenarios.iter().map(|s| s.label.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Config("scenarios: duplicate names".into()));
        }

        self.valuation.resolve()?;
        self.illness.validate().map_err(invalid)?;
        self.after_effects.validate().map_err(invalid)?;
        self.hospitalization.validate().map_err(invalid)?;
        self.decision.validate().map_err(invalid)?;
        self.consistency.validate().map_err(invalid)?;

        self.scenario(&self.compare.ease)?;
        self.scenario(&self.compare.lockdown)?;
        if !(self.compare.lockdown_quarter_cost > 0.0) {
            return Err(CliError::Config(
                "compare.lockdown_quarter_cost: must be > 0".into(),
            ));
        }

        if self.epidemic.r0_values.is_empty() {
            return Err(CliError::Config("epidemic.r0_values: at least one required".into()));
        }
        for &r0 in &self.epidemic.r0_values {
            SirParams {
                r0,
                initial_susceptible_fraction: self.epidemic.initial_susceptible_fraction,
                population: self.epidemic.population,
            }
            .validate()
            .map_err(invalid)?;
        }

        let ov = &self.option_value;
        ov.future_model().validate().map_err(invalid)?;
        if ov.horizon_weeks < 1 {
            return Err(CliError::Config("option_value.horizon_weeks: must be >= 1".into()));
        }
        if ov.samples < 1 {
            return Err(CliError::Config("option_value.samples: must be >= 1".into()));
        }
        if ov.end_states.is_empty() {
            return Err(CliError::Config(
                "option_value.end_states: at least one required".into(),
            ));
        }
        let mut state_names: Vec<&str> =
            ov.end_states.iter().map(|s| s.name.as_str()).collect();
        state_names.sort_unstable();
        if state_names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Config("option_value.end_states: duplicate names".into()));
        }
        for s in &ov.end_states {
            s.state().validate().map_err(invalid)?;
        }

        if self.sweep.values.is_empty() {
            return Err(CliError::Config("sweep.values: at least one required".into()));
        }
        match (self.sweep.target, self.sweep.parameter) {
            (SweepTarget::Compare, SweepParameter::VaccineProbability) => {
                return Err(CliError::Config(
                    "sweep: vaccine_probability only applies to the endstate target".into(),
                ));
            }
            (SweepTarget::Endstate, SweepParameter::PoundsPerQaly | SweepParameter::QalysPerDeath) => {
                return Err(CliError::Config(
                    "sweep: valuation parameters only apply to the compare target".into(),
                ));
            }
            _ => {}
        }
        for &v in &self.sweep.values {
            let ok = match self.sweep.parameter {
                SweepParameter::PoundsPerQaly | SweepParameter::QalysPerDeath => v > 0.0,
                SweepParameter::VaccineProbability => (0.0..=1.0).contains(&v),
            };
            if !ok {
                return Err(CliError::Config(format!(
                    "sweep.values: {v} out of range for {}",
                    self.sweep.parameter.key()
                )));
            }
        }
        Ok(())
    }

    /// Looks up a scenario by name.
    pub fn scenario(&self, name: &str) -> Result<&GeometricScenario, CliError> {
        self.scenarios
            .iter()
            .find(|s| s.label == name)
            .ok_or_else(|| CliError::Config(format!("unresolved scenario name '{name}'")))
    }
}
