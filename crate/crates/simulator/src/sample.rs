use fidelimax_core::random::sample_categorical;
use fidelimax_core::{born_probs, rng_from_seed, DensityMatrix, Error, MeasurementPlan, Result};
use fidelimax_estimator::Dataset;
use rand::Rng as _;

fn check_dim(plan: &MeasurementPlan, state: &DensityMatrix) -> Result<()> {
    if plan.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: plan.dim(), found: state.dim() });
    }
    Ok(())
}

/// Individual outcome indices, R_l independent draws per setting from the
/// smoothed Born probabilities of `true_state`.
pub fn sample_outcome_lists(plan: &MeasurementPlan, true_state: &DensityMatrix, seed: u64) -> Result<Vec<Vec<usize>>> {
    check_dim(plan, true_state)?;
    let mut rng = rng_from_seed(seed);
    plan.settings()
        .iter()
        .map(|s| {
            let p = born_probs(s, true_state, plan.epsilon_o())?;
            Ok((0..s.repetitions()).map(|_| sample_categorical(&p, rng.random())).collect())
        })
        .collect()
}

/// Outcome counts of one simulated run of `plan`, tagged with its
/// fingerprint. Same seed, same dataset.
pub fn sample_outcomes(plan: &MeasurementPlan, true_state: &DensityMatrix, seed: u64) -> Result<Dataset> {
    let lists = sample_outcome_lists(plan, true_state, seed)?;
    let counts = lists
        .iter()
        .zip(plan.settings())
        .map(|(list, s)| {
            let mut c = vec![0u64; s.num_outcomes()];
            for &k in list {
                c[k] += 1;
            }
            c
        })
        .collect();
    Dataset::for_plan(plan, counts)
}
