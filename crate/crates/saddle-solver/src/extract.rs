//! Turning a saddle point into an affine estimator.

use fidelimax_core::{born_probs, plan_fingerprint, MeasurementPlan, Result};
use fidelimax_estimator::AffineEstimator;

use crate::outer::SaddlePoint;

/// Per-setting coefficients (α*/2)·ln(p₁(k)/p₂(k)) at the saddle point.
pub fn optimal_coefficients(sp: &SaddlePoint, plan: &MeasurementPlan) -> Result<Vec<Vec<f64>>> {
    plan.settings()
        .iter()
        .map(|s| {
            let p1 = born_probs(s, &sp.chi1_star, plan.epsilon_o())?;
            let p2 = born_probs(s, &sp.chi2_star, plan.epsilon_o())?;
            Ok(p1.iter().zip(&p2).map(|(a, b)| 0.5 * sp.alpha_star * (a / b).ln()).collect())
        })
        .collect()
}

/// The affine estimator attached to a saddle point: coefficients from the
/// log-likelihood ratio, constant (tr ρχ₁* + tr ρχ₂*)/2 and the padded risk.
pub fn extract_estimator(sp: &SaddlePoint, plan: &MeasurementPlan) -> Result<AffineEstimator> {
    let rho = plan.target().op();
    let constant = 0.5 * (rho.inner(sp.chi1_star.op()) + rho.inner(sp.chi2_star.op()));
    AffineEstimator::new(
        optimal_coefficients(sp, plan)?,
        plan.settings().iter().map(|s| s.repetitions()).collect(),
        constant.clamp(0.0, 1.0),
        sp.reported_risk().min(0.5),
        plan.epsilon(),
        plan.epsilon_o(),
        plan_fingerprint(plan),
    )
}
