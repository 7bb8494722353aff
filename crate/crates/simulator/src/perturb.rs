//! Per-shot bounded perturbations of the state and of the effects.
//!
//! A perturbed object is a convex mix toward a random valid object, so it is
//! valid by construction: σ̃ = σ + t(τ − σ) and Ẽ_k = E_k + t(F_k − E_k),
//! with t chosen so that the entrywise 1-norm of the shift (the largest one
//! over k for effects) equals a radius drawn uniformly from [0, δ].

use fidelimax_core::random::sample_categorical;
use fidelimax_core::{
    born_probs, derive_seed, povm::smooth, random_povm, random_pure_state_dim, rng_from_seed, DensityMatrix, Error,
    HermitianOperator, MeasurementPlan, PovmSetting, Result, Rng,
};
use fidelimax_estimator::{AffineEstimator, Dataset, RobustnessInput};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

/// Redraws allowed when a random direction is too short for the radius.
pub const MAX_PERTURBATION_RETRIES: usize = 100;

/// Noiseless and perturbed runs of one experiment sharing their outcome
/// randomness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub noiseless_estimate: f64,
    pub perturbed_estimate: f64,
    pub observed_difference: f64,
    /// Robustness bound with the histogram errors set to the measured ones.
    pub bound: f64,
    /// F̂ at the shot-averaged perturbed probabilities minus F̂ at the exact
    /// ones; the infinite-shot part of the difference.
    pub expected_shift: f64,
    /// max_l ‖f − p‖∞ of the noiseless run.
    pub hist_err: f64,
    /// max_l ‖f̃ − p̄‖∞ of the perturbed run against its averaged
    /// probabilities.
    pub hist_err_tilde: f64,
}

fn perturb_state(sigma: &DensityMatrix, delta: f64, rng: &mut Rng) -> Result<HermitianOperator> {
    if delta == 0.0 {
        return Ok(sigma.op().clone());
    }
    let radius = delta * rng.random::<f64>();
    for _ in 0..MAX_PERTURBATION_RETRIES {
        let tau = random_pure_state_dim(sigma.dim(), rng.random())?;
        let dir = tau.op().sub(sigma.op());
        let t = radius / dir.entrywise_l1();
        if t <= 1.0 {
            return Ok(sigma.op().add_scaled(t, &dir));
        }
    }
    Err(Error::InvalidInput(format!("state perturbation of size {delta} cannot be kept valid")))
}

fn perturb_effects(setting: &PovmSetting, delta: f64, rng: &mut Rng) -> Result<Vec<HermitianOperator>> {
    if delta == 0.0 {
        return Ok(setting.effects().to_vec());
    }
    let radius = delta * rng.random::<f64>();
    for _ in 0..MAX_PERTURBATION_RETRIES {
        let other = random_povm(setting.dim(), setting.num_outcomes(), rng.random())?;
        let dirs: Vec<HermitianOperator> =
            other.effects().iter().zip(setting.effects()).map(|(f, e)| f.sub(e)).collect();
        let largest = dirs.iter().map(HermitianOperator::entrywise_l1).fold(0.0, f64::max);
        let t = radius / largest;
        if t <= 1.0 {
            return Ok(setting.effects().iter().zip(&dirs).map(|(e, d)| e.add_scaled(t, d)).collect());
        }
    }
    Err(Error::InvalidInput(format!("effect perturbation of size {delta} cannot be kept valid")))
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs the plan once on `true_state` and once with every shot seeing its
/// own perturbed state (entrywise 1-norm ≤ δ_S) and effects (≤ δ_M). Both
/// runs consume the same uniform draws for outcome selection, so with
/// δ_S = δ_M = 0 they coincide.
pub fn perturb_and_estimate(
    plan: &MeasurementPlan,
    estimator: &AffineEstimator,
    true_state: &DensityMatrix,
    delta_s: f64,
    delta_m: f64,
    seed: u64,
) -> Result<PerturbationReport> {
    if !(delta_s >= 0.0 && delta_m >= 0.0 && delta_s.is_finite() && delta_m.is_finite()) {
        return Err(Error::InvalidInput("perturbation sizes must be finite and nonnegative".into()));
    }
    estimator.check_plan(plan)?;
    if plan.dim() != true_state.dim() {
        return Err(Error::DimensionMismatch { expected: plan.dim(), found: true_state.dim() });
    }
    let eo = plan.epsilon_o();
    let mut outcome_rng = rng_from_seed(derive_seed(seed, 0));
    let mut perturb_rng = rng_from_seed(derive_seed(seed, 1));
    let (mut counts, mut counts_tilde) = (Vec::new(), Vec::new());
    let (mut probs, mut probs_bar) = (Vec::new(), Vec::new());
    let (mut hist_err, mut hist_err_tilde) = (0.0f64, 0.0f64);

    for s in plan.settings() {
        let n = s.num_outcomes();
        let reps = s.repetitions();
        let p = born_probs(s, true_state, eo)?;
        let mut c = vec![0u64; n];
        let mut ct = vec![0u64; n];
        let mut p_bar = vec![0.0; n];
        for _ in 0..reps {
            let u: f64 = outcome_rng.random();
            c[sample_categorical(&p, u)] += 1;
            let sigma = perturb_state(true_state, delta_s, &mut perturb_rng)?;
            let effects = perturb_effects(s, delta_m, &mut perturb_rng)?;
            let pt: Vec<f64> = effects.iter().map(|e| smooth(e.inner(&sigma), n, eo)).collect();
            ct[sample_categorical(&pt, u)] += 1;
            for (acc, v) in p_bar.iter_mut().zip(&pt) {
                *acc += v / reps as f64;
            }
        }
        let r = reps as f64;
        let f: Vec<f64> = c.iter().map(|&k| k as f64 / r).collect();
        let ft: Vec<f64> = ct.iter().map(|&k| k as f64 / r).collect();
        hist_err = hist_err.max(sup_distance(&f, &p));
        hist_err_tilde = hist_err_tilde.max(sup_distance(&ft, &p_bar));
        counts.push(c);
        counts_tilde.push(ct);
        probs.push(p);
        probs_bar.push(p_bar);
    }

    let noiseless = estimator.estimate(&Dataset::for_plan(plan, counts)?)?;
    let perturbed = estimator.estimate(&Dataset::for_plan(plan, counts_tilde)?)?;
    let expected_shift = estimator.estimate_frequencies(&probs_bar)? - estimator.estimate_frequencies(&probs)?;
    let rin = RobustnessInput {
        delta_s,
        delta_m,
        hist_err,
        hist_err_tilde,
        max_effect_infnorm: plan
            .settings()
            .iter()
            .flat_map(|s| s.effects().iter().map(HermitianOperator::max_abs_entry))
            .fold(0.0, f64::max),
        state_infnorm: true_state.op().max_abs_entry(),
    };
    Ok(PerturbationReport {
        noiseless_estimate: noiseless,
        perturbed_estimate: perturbed,
        observed_difference: (perturbed - noiseless).abs(),
        bound: estimator.robustness_bound(&rin),
        expected_shift,
        hist_err,
        hist_err_tilde,
    })
}
