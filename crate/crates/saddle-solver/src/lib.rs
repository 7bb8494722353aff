//! Saddle-point computation for minimax fidelity estimation: a scalar
//! search over α wrapped around an accelerated projected-gradient solve over
//! pairs of density matrices, plus extraction of the resulting estimator.

#![forbid(unsafe_code)]

mod config;
mod extract;
mod inner;
mod outer;
mod reduced;

pub use config::SolverConfig;
pub use extract::{extract_estimator, optimal_coefficients};
pub use inner::{eval_phi, inner_gradient, inner_maximize, inner_objective, InnerSolution};
pub use outer::{outer_minimize, BracketEnd, SaddlePoint, SolverDiagnostics};
pub use reduced::{solve_reduced_two_outcome, TwoOutcomeProblem};

/// Solves the saddle point of a plan and extracts its estimator.
pub fn build_estimator(
    plan: &fidelimax_core::MeasurementPlan,
    config: &SolverConfig,
) -> fidelimax_core::Result<(SaddlePoint, fidelimax_estimator::AffineEstimator)> {
    let sp = outer_minimize(plan, config)?;
    let est = extract_estimator(&sp, plan)?;
    Ok((sp, est))
}
