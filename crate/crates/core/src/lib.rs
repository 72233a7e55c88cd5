//! Cost-benefit models for epidemic lockdown policy.
//!
//! The crate covers five pieces of machinery:
//!
//! * [`scenario`] — geometric weekly-death-rate projections with a
//!   finite-population cap;
//! * [`epidemic`] — herd-immunity threshold, SIR final size and overshoot;
//! * [`qaly`] — QALY costing of deaths, illness, hospital stays and
//!   after-effects, and monetization at configurable thresholds;
//! * [`option_value`] — valuation of epidemic end states under uncertain
//!   treatment discovery and vaccine arrival, deterministic and Monte
//!   Carlo;
//! * [`decision`] — rolling weekly vs one-shot block lockdown decisions,
//!   including a search for parameter sets on which the two rules
//!   disagree.
//!
//! All types are immutable after construction and every operation is a
//! pure function; Monte Carlo estimation is seeded, streamed per sample,
//! and bit-reproducible.

pub mod decision;
pub mod epidemic;
pub mod error;
pub mod numeric;
pub mod option_value;
pub mod qaly;
pub mod scenario;

pub use decision::{
    find_inconsistency, quarterly_comparison, quarterly_comparison_extended, DecisionMargin,
    DecisionModel, GridRange, HorizonRange, InconsistencyWitness, QuarterlyComparison, SearchBox,
    Verdict,
};
pub use epidemic::{FinalSizeResult, SirParams};
pub use error::{Error, Result};
pub use option_value::{
    end_state_value_difference, mc_end_state_value, project_future_deaths, DiscoveryMode,
    EndState, EndStateValuation, FutureModel, TreatmentDiscoveryModel, VaccineEffect,
    VaccineModel,
};
pub use qaly::{
    total_qaly_per_death, AfterEffectParams, HospitalizationParams, IllnessCostParams,
    QalyValuation, VALUATION_PRESETS,
};
pub use scenario::{GeometricScenario, Trajectory};
