//! Variational search for local unitaries that zero the `|001>, |010>, |011>`
//! amplitudes, with the restart-and-threshold acceptance policy.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::{noisy_outcome_probabilities, sample_multinomial, NoiseConfig, FORBIDDEN_OUTCOMES};
use crate::optimizer::{minimize, OptimizerOptions};
use crate::state::{apply_local_unitaries, outcome_probabilities, LocalUnitaryParams, PureState3};
use crate::streams::seeded_rng;

/// Acceptance threshold used when the noise level is zero.
pub const NOISELESS_THRESHOLD: f64 = 1e-8;
/// Threshold slope per unit of the noise tuning parameter.
pub const THRESHOLD_PER_LEVEL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostMode {
    /// Statevector probabilities.
    Exact,
    /// Frequencies from a finite number of shots.
    Sampled,
}

impl FromStr for CostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CostMode::Exact),
            "sampled" => Ok(CostMode::Sampled),
            other => Err(Error::InvalidArgument(format!("unknown cost mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalizationPolicy {
    pub cost_threshold: f64,
    pub max_attempts: usize,
    pub cost_mode: CostMode,
    pub shots_per_cost_eval: u64,
    /// When set, the training cost is measured through this error model, as it
    /// would be on a noisy device. `None` trains on the ideal circuit.
    pub training_noise: Option<NoiseConfig>,
}

impl Default for CanonicalizationPolicy {
    fn default() -> Self {
        CanonicalizationPolicy {
            cost_threshold: NOISELESS_THRESHOLD,
            max_attempts: 5,
            cost_mode: CostMode::Exact,
            shots_per_cost_eval: 10_000,
            training_noise: None,
        }
    }
}

impl CanonicalizationPolicy {
    /// Threshold `0.02·t` (floored at `1e-8`) with training through noise level `t`.
    pub fn for_noise_level(t: u32) -> Result<Self> {
        let noise = NoiseConfig::from_level(t)?;
        Ok(CanonicalizationPolicy {
            cost_threshold: threshold_for_level(t),
            training_noise: (!noise.is_noiseless()).then_some(noise),
            ..Default::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.cost_threshold) {
            return Err(Error::InvalidArgument(format!(
                "cost threshold {} outside [0, 1)",
                self.cost_threshold
            )));
        }
        if self.max_attempts == 0 || self.shots_per_cost_eval == 0 {
            return Err(Error::InvalidArgument(
                "max_attempts and shots_per_cost_eval must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

pub fn threshold_for_level(t: u32) -> f64 {
    (THRESHOLD_PER_LEVEL * f64::from(t)).max(NOISELESS_THRESHOLD)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalizationOutcome {
    pub params: LocalUnitaryParams,
    pub final_cost: f64,
    pub attempts_used: usize,
    pub accepted: bool,
    pub canonical_state: PureState3,
    /// Objective evaluations summed over all attempts.
    pub evaluations: usize,
    /// Outer optimizer iterations summed over all attempts.
    pub iterations: usize,
}

/// Probability mass on the three forbidden outcomes after the local unitaries.
pub fn cost(state: &PureState3, params: &LocalUnitaryParams) -> f64 {
    forbidden_mass(&outcome_probabilities(&apply_local_unitaries(state, params)))
}

/// [`cost`] estimated from `shots` ideal measurements.
pub fn cost_sampled<R: Rng + ?Sized>(
    state: &PureState3,
    params: &LocalUnitaryParams,
    shots: u64,
    rng: &mut R,
) -> f64 {
    let probs = outcome_probabilities(&apply_local_unitaries(state, params));
    sampled_forbidden_fraction(&probs, shots, rng)
}

/// Forbidden mass of the outcome distribution seen through `noise`.
pub fn noisy_cost(state: &PureState3, params: &LocalUnitaryParams, noise: &NoiseConfig) -> f64 {
    forbidden_mass(&noisy_outcome_probabilities(
        &apply_local_unitaries(state, params),
        noise,
    ))
}

/// [`noisy_cost`] estimated from `shots` noisy measurements. Shots are
/// independent, so a multinomial draw from the averaged distribution has the
/// same law as shot-by-shot error insertion.
pub fn noisy_cost_sampled<R: Rng + ?Sized>(
    state: &PureState3,
    params: &LocalUnitaryParams,
    noise: &NoiseConfig,
    shots: u64,
    rng: &mut R,
) -> f64 {
    let probs = noisy_outcome_probabilities(&apply_local_unitaries(state, params), noise);
    sampled_forbidden_fraction(&probs, shots, rng)
}

#[inline]
fn forbidden_mass(p: &[f64; 8]) -> f64 {
    FORBIDDEN_OUTCOMES.iter().map(|&i| p[i]).sum()
}

fn sampled_forbidden_fraction<R: Rng + ?Sized>(probs: &[f64; 8], shots: u64, rng: &mut R) -> f64 {
    let counts = sample_multinomial(probs, shots, rng);
    let hits: u64 = FORBIDDEN_OUTCOMES.iter().map(|&i| counts[i]).sum();
    hits as f64 / shots as f64
}

/// Runs the optimizer on the nine-angle cost, restarting from random angles
/// until the threshold is met or the attempt budget is spent. The best attempt
/// is returned either way.
pub fn canonicalize<R: Rng + ?Sized>(
    state: &PureState3,
    policy: &CanonicalizationPolicy,
    opts: &OptimizerOptions,
    rng: &mut R,
) -> Result<CanonicalizationOutcome> {
    policy.validate()?;
    opts.validate()?;

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut attempts_used = 0;
    let mut evaluations = 0;
    let mut iterations = 0;

    for attempt in 0..policy.max_attempts {
        let x0: Vec<f64> = if attempt == 0 {
            vec![0.0; LocalUnitaryParams::LEN]
        } else {
            (0..LocalUnitaryParams::LEN)
                .map(|_| rng.random::<f64>() * TAU)
                .collect()
        };
        // Common random numbers within an attempt keep the sampled objective
        // a deterministic function of the angles.
        let attempt_seed: u64 = rng.random();

        let objective = |x: &[f64]| -> f64 {
            let Ok(p) = LocalUnitaryParams::from_slice(x) else {
                return f64::NAN;
            };
            match (policy.cost_mode, policy.training_noise) {
                (CostMode::Exact, None) => cost(state, &p),
                (CostMode::Exact, Some(noise)) => noisy_cost(state, &p, &noise),
                (CostMode::Sampled, None) => {
                    cost_sampled(state, &p, policy.shots_per_cost_eval, &mut seeded_rng(attempt_seed))
                }
                (CostMode::Sampled, Some(noise)) => noisy_cost_sampled(
                    state,
                    &p,
                    &noise,
                    policy.shots_per_cost_eval,
                    &mut seeded_rng(attempt_seed),
                ),
            }
        };

        let result = minimize(objective, &x0, opts)?;
        attempts_used += 1;
        evaluations += result.evaluations;
        iterations += result.iterations;

        if best.as_ref().is_none_or(|(_, v)| result.best_value < *v) {
            best = Some((result.best_params, result.best_value));
        }
        if best.as_ref().is_some_and(|(_, v)| *v <= policy.cost_threshold) {
            break;
        }
    }

    let (x, final_cost) = best.expect("at least one attempt runs");
    let params = LocalUnitaryParams::from_slice(&x)?;
    Ok(CanonicalizationOutcome {
        params,
        final_cost,
        attempts_used,
        accepted: final_cost <= policy.cost_threshold,
        canonical_state: apply_local_unitaries(state, &params),
        evaluations,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{extract_canonical_coefficients, tangle};

    #[test]
    fn cost_of_named_states() {
        let zero = LocalUnitaryParams::zero();
        assert_eq!(cost(&PureState3::ghz(), &zero), 0.0);
        assert_eq!(cost(&PureState3::basis(0b010).unwrap(), &zero), 1.0);
    }

    #[test]
    fn sampled_cost_of_named_states() {
        let zero = LocalUnitaryParams::zero();
        let mut rng = seeded_rng(5);
        assert_eq!(cost_sampled(&PureState3::ghz(), &zero, 1000, &mut rng), 0.0);
        assert_eq!(cost_sampled(&PureState3::basis(0b010).unwrap(), &zero, 1000, &mut rng), 1.0);
    }

    #[test]
    fn noisy_cost_reduces_to_exact_without_noise() {
        let p = LocalUnitaryParams::new([0.3, 1.0, -2.0], [1.1, 0.2, 0.0], [2.0, -0.4, 0.9]).unwrap();
        let s = PureState3::w();
        assert_eq!(noisy_cost(&s, &p, &NoiseConfig::noiseless()), cost(&s, &p));
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(threshold_for_level(0), 1e-8);
        assert!((threshold_for_level(5) - 0.1).abs() < 1e-15);
        let p = CanonicalizationPolicy::for_noise_level(0).unwrap();
        assert!(p.training_noise.is_none());
        assert!(CanonicalizationPolicy::for_noise_level(3).unwrap().training_noise.is_some());
    }

    #[test]
    fn policy_validation() {
        let mut p = CanonicalizationPolicy::default();
        p.max_attempts = 0;
        assert!(p.validate().is_err());
        p.max_attempts = 1;
        p.cost_threshold = 1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn ghz_is_accepted_immediately() {
        let mut rng = seeded_rng(9);
        let out = canonicalize(
            &PureState3::ghz(),
            &CanonicalizationPolicy::default(),
            &OptimizerOptions::default(),
            &mut rng,
        )
        .unwrap();
        assert!(out.accepted);
        assert_eq!(out.attempts_used, 1);
        assert!(out.final_cost <= 1e-8);
        assert!((tangle(&out.canonical_state) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn basis_000_canonicalizes_to_itself() {
        let mut rng = seeded_rng(10);
        let out = canonicalize(
            &PureState3::basis(0).unwrap(),
            &CanonicalizationPolicy::default(),
            &OptimizerOptions::default(),
            &mut rng,
        )
        .unwrap();
        assert!(out.accepted);
        let cc = extract_canonical_coefficients(&out.canonical_state).unwrap();
        assert!((cc.lambda()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_mode_runs_and_respects_budget() {
        let mut rng = seeded_rng(11);
        let policy = CanonicalizationPolicy {
            cost_mode: CostMode::Sampled,
            cost_threshold: 0.01,
            shots_per_cost_eval: 2000,
            max_attempts: 2,
            ..Default::default()
        };
        let out = canonicalize(&PureState3::w(), &policy, &OptimizerOptions::default(), &mut rng)
            .unwrap();
        assert!(out.attempts_used <= 2);
        assert_eq!(out.accepted, out.final_cost <= 0.01);
        assert!(cost(&PureState3::w(), &out.params) < 0.05);
    }
}
