//! QALY accounting: deaths, illness bouts, hospital stays and long-term
//! after-effects converted into quality-adjusted life years, and QALYs
//! converted into money.
//!
//! Defaults reproduce the published UK reference arithmetic: 10 QALYs per
//! death valued at the NICE 30k GBP threshold, 0.02 QALYs per illness bout
//! (twice the severity and twice the duration of a 0.005-QALY flu bout),
//! 150 bouts per death at 0.6% mortality, and a 2%-prevalence severe
//! after-effect cohort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Days per year used for stay-length conversions.
pub const DAYS_PER_YEAR: f64 = 365.25;

/// Money value of a QALY plus the QALY cost attributed to one death.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QalyValuation {
    /// GBP per QALY.
    #[serde(default = "default_pounds_per_qaly")]
    pub pounds_per_qaly: f64,
    /// QALYs lost per death; the published range is 5-10.
    #[serde(default = "default_qalys_per_death")]
    pub qalys_per_death: f64,
}

fn default_pounds_per_qaly() -> f64 {
    30_000.0
}

fn default_qalys_per_death() -> f64 {
    10.0
}

impl Default for QalyValuation {
    fn default() -> Self {
        QalyValuation {
            pounds_per_qaly: default_pounds_per_qaly(),
            qalys_per_death: default_qalys_per_death(),
        }
    }
}

/// The named valuation presets shipped with the library, as
/// `(name, pounds_per_qaly)` pairs.
pub const VALUATION_PRESETS: [(&str, f64); 4] = [
    ("nice-standard", 30_000.0),
    ("end-of-life", 50_000.0),
    ("trebled", 90_000.0),
    ("very-rare-disease", 300_000.0),
];

impl QalyValuation {
    /// Looks up one of the four named presets (10 QALYs per death).
    pub fn preset(name: &str) -> Option<QalyValuation> {
        VALUATION_PRESETS
            .iter()
            .find(|(preset, _)| *preset == name)
            .map(|&(_, pounds)| QalyValuation {
                pounds_per_qaly: pounds,
                qalys_per_death: default_qalys_per_death(),
            })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pounds_per_qaly > 0.0) || !self.pounds_per_qaly.is_finite() {
            return Err(Error::invalid("pounds_per_qaly", "must be finite and > 0"));
        }
        if !(self.qalys_per_death > 0.0) || !self.qalys_per_death.is_finite() {
            return Err(Error::invalid("qalys_per_death", "must be finite and > 0"));
        }
        Ok(())
    }

    /// QALYs lost to a number of deaths.
    pub fn death_qaly_cost(&self, deaths: f64) -> f64 {
        deaths * self.qalys_per_death
    }

    /// Money value of a QALY total.
    pub fn monetize(&self, qalys: f64) -> f64 {
        qalys * self.pounds_per_qaly
    }
}

/// Cost of non-fatal illness bouts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IllnessCostParams {
    /// QALYs lost per average bout.
    #[serde(default = "default_qaly_per_bout")]
    pub qaly_per_bout: f64,
    /// Illness bouts per death.
    #[serde(default = "default_bouts_per_death")]
    pub bouts_per_death: f64,
    /// QALY cost of a flu bout, the anchor for the derived bout cost.
    #[serde(default = "default_flu_baseline_qaly")]
    pub flu_baseline_qaly: f64,
    /// How much worse than flu an average bout is.
    #[serde(default = "default_factor_two")]
    pub severity_multiplier: f64,
    /// How much longer than flu an average bout lasts.
    #[serde(default = "default_factor_two")]
    pub duration_multiplier: f64,
    /// Mortality rate implying the bouts-per-death ratio.
    #[serde(default = "default_mortality_rate")]
    pub implied_mortality_rate: f64,
}

fn default_qaly_per_bout() -> f64 {
    0.02
}

fn default_bouts_per_death() -> f64 {
    150.0
}

fn default_flu_baseline_qaly() -> f64 {
    0.005
}

fn default_factor_two() -> f64 {
    2.0
}

fn default_mortality_rate() -> f64 {
    0.006
}

impl Default for IllnessCostParams {
    fn default() -> Self {
        IllnessCostParams {
            qaly_per_bout: default_qaly_per_bout(),
            bouts_per_death: default_bouts_per_death(),
            flu_baseline_qaly: default_flu_baseline_qaly(),
            severity_multiplier: default_factor_two(),
            duration_multiplier: default_factor_two(),
            implied_mortality_rate: default_mortality_rate(),
        }
    }
}

impl IllnessCostParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("qaly_per_bout", self.qaly_per_bout),
            ("bouts_per_death", self.bouts_per_death),
            ("flu_baseline_qaly", self.flu_baseline_qaly),
            ("severity_multiplier", self.severity_multiplier),
            ("duration_multiplier", self.duration_multiplier),
            ("implied_mortality_rate", self.implied_mortality_rate),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "illness",
                    reason: format!("{name} must be finite and > 0, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// Bout cost derived from the flu baseline and the two factor-of-two
    /// adjustments, rather than taken from `qaly_per_bout` directly.
    pub fn derived_qaly_per_bout(&self) -> f64 {
        self.flu_baseline_qaly * self.severity_multiplier * self.duration_multiplier
    }

    /// QALYs lost to non-fatal bouts per death.
    pub fn illness_qaly_per_death(&self) -> f64 {
        self.qaly_per_bout * self.bouts_per_death
    }
}

/// Long-term after-effects among survivors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfterEffectParams {
    /// Fraction of patients with severe after-effects.
    #[serde(default = "default_prevalence")]
    pub prevalence_among_patients: f64,
    /// Quality-weight loss while affected.
    #[serde(default = "default_quality_decrement")]
    pub quality_decrement: f64,
    /// Years the quality decrement lasts.
    #[serde(default = "default_decrement_duration")]
    pub decrement_duration_years: f64,
    /// Years of life expectancy lost.
    #[serde(default = "default_life_expectancy_loss")]
    pub life_expectancy_loss_years: f64,
    /// Mortality rate relating the cohort size to deaths.
    #[serde(default = "default_mortality_rate")]
    pub mortality_rate: f64,
}

fn default_prevalence() -> f64 {
    0.02
}

fn default_quality_decrement() -> f64 {
    0.2
}

fn default_decrement_duration() -> f64 {
    5.0
}

fn default_life_expectancy_loss() -> f64 {
    2.0
}

impl Default for AfterEffectParams {
    fn default() -> Self {
        AfterEffectParams {
            prevalence_among_patients: default_prevalence(),
            quality_decrement: default_quality_decrement(),
            decrement_duration_years: default_decrement_duration(),
            life_expectancy_loss_years: default_life_expectancy_loss(),
            mortality_rate: default_mortality_rate(),
        }
    }
}

impl AfterEffectParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.prevalence_among_patients) {
            return Err(Error::invalid(
                "prevalence_among_patients",
                "must lie in [0, 1]",
            ));
        }
        if !(0.0..=1.0).contains(&self.quality_decrement) {
            return Err(Error::invalid("quality_decrement", "must lie in [0, 1]"));
        }
        for (name, value) in [
            ("decrement_duration_years", self.decrement_duration_years),
            ("life_expectancy_loss_years", self.life_expectancy_loss_years),
            ("mortality_rate", self.mortality_rate),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "after_effects",
                    reason: format!("{name} must be finite and >= 0, got {value}"),
                });
            }
        }
        Ok(())
    }

    /// QALYs lost to after-effects per death: the affected cohort per death
    /// (`prevalence / mortality`) times the per-person loss
    /// (`decrement * duration + life expectancy loss`).
    pub fn aftereffect_qaly_per_death(&self) -> Result<f64> {
        if self.mortality_rate == 0.0 {
            return Err(Error::invalid(
                "mortality_rate",
                "must be > 0 to relate after-effect cohort to deaths",
            ));
        }
        let cohort_per_death = self.prevalence_among_patients / self.mortality_rate;
        let loss_per_person = self.quality_decrement * self.decrement_duration_years
            + self.life_expectancy_loss_years;
        Ok(cohort_per_death * loss_per_person)
    }
}

/// Quality loss during hospital stays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HospitalizationParams {
    /// Patients hospitalized.
    #[serde(default = "default_hospitalized")]
    pub hospitalized_count: f64,
    /// Deaths in the same period, for per-death ratios.
    #[serde(default = "default_reference_deaths")]
    pub reference_deaths: f64,
    /// Mean stay in days.
    #[serde(default = "default_stay_days")]
    pub mean_stay_days: f64,
    /// Quality weight while hospitalized (0 = total loss).
    #[serde(default)]
    pub quality_during_stay: f64,
}

fn default_hospitalized() -> f64 {
    125_000.0
}

fn default_reference_deaths() -> f64 {
    40_000.0
}

fn default_stay_days() -> f64 {
    5.0
}

impl Default for HospitalizationParams {
    fn default() -> Self {
        HospitalizationParams {
            hospitalized_count: default_hospitalized(),
            reference_deaths: default_reference_deaths(),
            mean_stay_days: default_stay_days(),
            quality_during_stay: 0.0,
        }
    }
}

impl HospitalizationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("hospitalized_count", self.hospitalized_count),
            ("reference_deaths", self.reference_deaths),
            ("mean_stay_days", self.mean_stay_days),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "hospitalization",
                    reason: format!("{name} must be finite and >= 0, got {value}"),
                });
            }
        }
        if !(0.0..=1.0).contains(&self.quality_during_stay) {
            return Err(Error::invalid("quality_during_stay", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Total QALYs lost across all stays.
    pub fn hospitalization_qaly_total(&self) -> f64 {
        self.hospitalized_count
            * (self.mean_stay_days / DAYS_PER_YEAR)
            * (1.0 - self.quality_during_stay)
    }
}

/// QALYs per death with the optional illness and after-effect components
/// added to the base mortality cost.
pub fn total_qaly_per_death(
    valuation: &QalyValuation,
    illness: &IllnessCostParams,
    after_effects: &AfterEffectParams,
    include_illness: bool,
    include_aftereffects: bool,
) -> Result<f64> {
    let mut total = valuation.qalys_per_death;
    if include_illness {
        total += illness.illness_qaly_per_death();
    }
    if include_aftereffects {
        total += after_effects.aftereffect_qaly_per_death()?;
    }
    Ok(total)
}
