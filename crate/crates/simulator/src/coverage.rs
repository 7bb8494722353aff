use fidelimax_core::{derive_seed, fidelity_pure, DensityMatrix, Error, MeasurementPlan, Result};
use fidelimax_estimator::AffineEstimator;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sample::sample_outcomes;

/// Schema version of the trial report file.
pub const REPORT_VERSION: u32 = 1;

/// Outcome of repeated simulated experiments with one estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub version: u32,
    pub trials: usize,
    /// tr(ρσ) of the simulated state.
    pub true_fidelity: f64,
    /// Half-width used for the coverage test.
    pub risk: f64,
    /// Estimates in trial order.
    pub estimates: Vec<f64>,
    pub coverage_count: usize,
    pub empirical_coverage: f64,
    pub mean_estimate: f64,
    pub mean_abs_error: f64,
}

impl TrialReport {
    pub(crate) fn from_estimates(estimates: Vec<f64>, true_fidelity: f64, risk: f64) -> Self {
        let trials = estimates.len();
        let coverage_count = estimates.iter().filter(|e| (*e - true_fidelity).abs() <= risk).count();
        let n = trials as f64;
        Self {
            version: REPORT_VERSION,
            trials,
            true_fidelity,
            risk,
            coverage_count,
            empirical_coverage: coverage_count as f64 / n,
            mean_estimate: estimates.iter().sum::<f64>() / n,
            mean_abs_error: estimates.iter().map(|e| (e - true_fidelity).abs()).sum::<f64>() / n,
            estimates,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}

/// Runs `trials` independent experiments on `true_state`. Trial t draws its
/// outcomes from stream `derive_seed(seed, t)`, so the report does not
/// depend on how trials are scheduled across threads.
pub fn run_coverage(
    plan: &MeasurementPlan,
    estimator: &AffineEstimator,
    true_state: &DensityMatrix,
    trials: usize,
    seed: u64,
) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    estimator.check_plan(plan)?;
    let truth = fidelity_pure(plan.target(), true_state)?;
    let estimates = (0..trials as u64)
        .into_par_iter()
        .map(|t| estimator.estimate(&sample_outcomes(plan, true_state, derive_seed(seed, t))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport::from_estimates(estimates, truth, estimator.risk()))
}
