//! Affine fidelity estimators: evaluation on outcome data, serialization
//! bound to a plan fingerprint, and the robustness bound under perturbed
//! states, effects and histograms.

#![forbid(unsafe_code)]

mod affine;
mod dataset;

pub use affine::{robustness_bound, AffineEstimator, Estimate, RobustnessInput, ESTIMATOR_VERSION};
pub use dataset::{frequencies, Dataset};
