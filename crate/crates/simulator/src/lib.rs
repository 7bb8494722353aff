//! Measurement simulation: Born-rule outcome sampling, repeated coverage
//! trials, per-shot perturbation experiments and risk curves over Pauli
//! plans.

#![forbid(unsafe_code)]

mod coverage;
mod curve;
mod perturb;
mod sample;

pub use coverage::{run_coverage, TrialReport, REPORT_VERSION};
pub use curve::{risk_curve, risk_curve_csv, CurveCell};
pub use perturb::{perturb_and_estimate, PerturbationReport, MAX_PERTURBATION_RETRIES};
pub use sample::{sample_outcome_lists, sample_outcomes};

/// Fixed scientific notation with six significant digits.
pub fn format_sci(v: f64) -> String {
    format!("{v:.5e}")
}
