//! Herd-immunity threshold, SIR final size and epidemic overshoot.
//!
//! The final size solves the closed-SIR fixed point with an infinitesimal
//! seed: new infections `a` satisfy `a = s0 * (1 - exp(-r0 * a))` and the
//! attack rate is `(1 - s0) + a`. For a fully susceptible population this
//! is exactly `r = 1 - exp(-r0 * r)`. The root is found by bisection on a
//! bracketed residual. Only terminal quantities are computed; there is no
//! time-resolved integration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the fixed-point residual.
pub const FINAL_SIZE_TOLERANCE: f64 = 1e-12;
/// Bisection iteration budget; far beyond what halving [1e-9, 1] needs.
pub const FINAL_SIZE_MAX_ITERATIONS: u32 = 200;

/// Reproduction number, initial susceptible fraction and optional absolute
/// population for the closed SIR end-state analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirParams {
    /// Basic reproduction number.
    pub r0: f64,
    /// Fraction of the population susceptible at the start, in (0, 1].
    #[serde(default = "default_susceptible_fraction")]
    pub initial_susceptible_fraction: f64,
    /// Population size in persons, when absolute counts are wanted.
    #[serde(default)]
    pub population: Option<f64>,
}

fn default_susceptible_fraction() -> f64 {
    1.0
}

/// Outcome of the final-size computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalSizeResult {
    /// Fraction of the population no longer susceptible once the epidemic
    /// has run its course (includes any initially non-susceptible mass).
    pub attack_rate: f64,
    /// Herd-immunity threshold `1 - 1/r0` (clamped at 0).
    pub herd_threshold: f64,
    /// Attack rate in excess of the herd threshold; 0 for subcritical runs.
    pub overshoot: f64,
    /// Fixed-point residual at the returned attack rate (0 when no solve
    /// was needed).
    pub residual: f64,
    /// Bisection iterations performed.
    pub iterations: u32,
}

impl SirParams {
    pub fn new(r0: f64) -> Result<Self> {
        let p = SirParams {
            r0,
            initial_susceptible_fraction: 1.0,
            population: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_susceptible_fraction(mut self, s0: f64) -> Result<Self> {
        self.initial_susceptible_fraction = s0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r0 > 0.0) || !self.r0.is_finite() {
            return Err(Error::invalid("r0", format!("must be finite and > 0, got {}", self.r0)));
        }
        let s0 = self.initial_susceptible_fraction;
        if !(s0 > 0.0 && s0 <= 1.0) {
            return Err(Error::invalid(
                "initial_susceptible_fraction",
                format!("must lie in (0, 1], got {s0}"),
            ));
        }
        if let Some(pop) = self.population {
            if !(pop > 0.0) || !pop.is_finite() {
                return Err(Error::invalid("population", "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Fraction `1 - 1/r0` that must be immune for the epidemic to decline.
    pub fn herd_immunity_threshold(&self) -> f64 {
        (1.0 - 1.0 / self.r0).max(0.0)
    }

    /// Solves the final-size fixed point for this parameter set.
    ///
    /// With an infinitesimal seed, nothing spreads when the effective
    /// reproduction number `r0 * s0` is at or below 1: the attack rate is
    /// then just the initially non-susceptible mass `1 - s0`. Otherwise
    /// the nonzero root of `a - s0*(1 - exp(-r0*a))` is bracketed in
    /// [1e-9, 1] and bisected to `FINAL_SIZE_TOLERANCE`, and the attack
    /// rate is `(1 - s0) + a`.
    pub fn final_size(&self) -> Result<FinalSizeResult> {
        self.validate()?;
        let s0 = self.initial_susceptible_fraction;
        let herd = self.herd_immunity_threshold();

        if self.r0 * s0 <= 1.0 {
            return Ok(FinalSizeResult {
                attack_rate: 1.0 - s0,
                herd_threshold: herd,
                overshoot: 0.0,
                residual: 0.0,
                iterations: 0,
            });
        }

        let residual_fn = |a: f64| a - s0 * (-(-self.r0 * a).exp_m1());
        let mut lo = 1e-9_f64;
        let mut hi = 1.0_f64;
        debug_assert!(residual_fn(lo) < 0.0 && residual_fn(hi) > 0.0);

        let mut root = 0.5 * (lo + hi);
        let mut residual = residual_fn(root);
        let mut iterations = 0;
        // Bisect until the bracket collapses as well as the residual: near
        // r0 = 1 the residual alone goes below tolerance while the root is
        // still poorly located, which would corrupt small overshoots.
        while hi - lo > 1e-13 || residual.abs() >= FINAL_SIZE_TOLERANCE {
            iterations += 1;
            if iterations > FINAL_SIZE_MAX_ITERATIONS {
                return Err(Error::NoConvergence {
                    iterations: FINAL_SIZE_MAX_ITERATIONS,
                    residual,
                });
            }
            if residual < 0.0 {
                lo = root;
            } else if residual > 0.0 {
                hi = root;
            } else {
                break;
            }
            root = 0.5 * (lo + hi);
            residual = residual_fn(root);
        }

        let attack_rate = (1.0 - s0) + root;
        Ok(FinalSizeResult {
            attack_rate,
            herd_threshold: herd,
            overshoot: attack_rate - herd,
            residual,
            iterations,
        })
    }

    /// New infections still to come, as a fraction of the total population,
    /// for a state in which `already_infected` of the population has been
    /// infected so far.
    pub fn future_attack(&self, already_infected: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&already_infected) {
            return Err(Error::invalid(
                "already_infected",
                format!("must lie in [0, 1), got {already_infected}"),
            ));
        }
        let remaining = self.initial_susceptible_fraction - already_infected;
        if remaining <= 0.0 {
            return Err(Error::invalid(
                "already_infected",
                "exceeds the initially susceptible fraction",
            ));
        }
        let future = SirParams {
            r0: self.r0,
            initial_susceptible_fraction: remaining,
            population: self.population,
        };
        let result = future.final_size()?;
        Ok(result.attack_rate - (1.0 - remaining))
    }

    /// How much larger the future epidemic is from state `a` than from
    /// state `b`, where each state is summarized by its already-infected
    /// fraction. Positive when `a` (fewer infections out of the way)
    /// faces the larger remaining epidemic.
    pub fn remaining_susceptible_advantage(
        &self,
        already_infected_a: f64,
        already_infected_b: f64,
    ) -> Result<f64> {
        Ok(self.future_attack(already_infected_a)? - self.future_attack(already_infected_b)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected} +- {tol}, got {actual}"
        );
    }

    /// Independent oracle: fixed-point iteration of the new-infection
    /// relation `a <- s0*(1 - exp(-r0*a))`, no bisection involved.
    fn new_infections_by_iteration(r0: f64, s0: f64) -> f64 {
        let mut a = 0.9_f64;
        for _ in 0..100_000 {
            let next = s0 * (1.0 - (-r0 * a).exp());
            if (next - a).abs() < 1e-15 {
                return next;
            }
            a = next;
        }
        a
    }

    #[test]
    fn herd_threshold_formula() {
        assert_eq!(SirParams::new(2.0).unwrap().herd_immunity_threshold(), 0.5);
        assert_eq!(SirParams::new(1.0).unwrap().herd_immunity_threshold(), 0.0);
        assert_close(
            SirParams::new(1.5).unwrap().herd_immunity_threshold(),
            1.0 / 3.0,
            1e-9,
        );
        // Subcritical values clamp at zero rather than going negative.
        assert_eq!(SirParams::new(0.5).unwrap().herd_immunity_threshold(), 0.0);
    }

    #[test]
    fn final_size_r0_two() {
        let result = SirParams::new(2.0).unwrap().final_size().unwrap();
        // Frozen from the fixed-point iteration oracle.
        assert_close(result.attack_rate, 0.7968121, 1e-6);
        assert_close(result.overshoot, 0.2968121, 1e-6);
        assert!(result.residual.abs() < FINAL_SIZE_TOLERANCE);
        let oracle = new_infections_by_iteration(2.0, 1.0);
        assert_close(result.attack_rate, oracle, 1e-10);
    }

    #[test]
    fn final_size_r0_one_and_a_half() {
        let result = SirParams::new(1.5).unwrap().final_size().unwrap();
        assert_close(result.attack_rate, 0.5828116, 1e-6);
        assert_close(result.overshoot, 0.2494783, 1e-6);
        let oracle = new_infections_by_iteration(1.5, 1.0);
        assert_close(result.attack_rate, oracle, 1e-10);
    }

    #[test]
    fn final_size_subcritical_is_zero() {
        let result = SirParams::new(0.8).unwrap().final_size().unwrap();
        assert_eq!(result.attack_rate, 0.0);
        assert_eq!(result.overshoot, 0.0);
        assert_eq!(result.iterations, 0);
    }

    #[test]
    fn future_attack_equal_states_cancel() {
        let p = SirParams::new(2.0).unwrap();
        assert_eq!(p.remaining_susceptible_advantage(0.2, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn fewer_prior_infections_mean_larger_future_epidemic() {
        let p = SirParams::new(2.0).unwrap();
        let advantage = p.remaining_susceptible_advantage(0.0, 0.3).unwrap();
        assert!(advantage > 0.0, "got {advantage}");
        // Cross-check both legs against the iteration oracle.
        let future_a = p.future_attack(0.0).unwrap();
        assert_close(future_a, new_infections_by_iteration(2.0, 1.0), 1e-9);
        let future_b = p.future_attack(0.3).unwrap();
        assert_close(future_b, new_infections_by_iteration(2.0, 0.7), 1e-9);
    }

    #[test]
    fn subcritical_states_have_no_future_epidemic() {
        let p = SirParams::new(0.9).unwrap();
        assert_eq!(p.remaining_susceptible_advantage(0.1, 0.4).unwrap(), 0.0);
        assert_eq!(p.future_attack(0.25).unwrap(), 0.0);
    }

    #[test]
    fn attack_rate_exceeds_herd_threshold_when_supercritical() {
        for &(r0, s0) in &[(1.2, 1.0), (2.0, 0.9), (5.0, 0.3), (9.5, 1.0)] {
            let p = SirParams::new(r0)
                .unwrap()
                .with_susceptible_fraction(s0)
                .unwrap();
            if r0 * s0 <= 1.0 {
                continue;
            }
            let result = p.final_size().unwrap();
            assert!(result.attack_rate >= result.herd_threshold);
            assert!(result.attack_rate <= 1.0);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(SirParams::new(0.0).is_err());
        assert!(SirParams::new(f64::NAN).is_err());
        assert!(SirParams::new(2.0).unwrap().with_susceptible_fraction(0.0).is_err());
        assert!(SirParams::new(2.0).unwrap().with_susceptible_fraction(1.5).is_err());
        let p = SirParams::new(2.0).unwrap();
        assert!(p.future_attack(1.0).is_err());
        assert!(p.future_attack(-0.1).is_err());
    }
}
