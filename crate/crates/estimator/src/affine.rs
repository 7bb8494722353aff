//! Affine estimators F̂ = Σ_l R_l⟨a^(l), f^(l)⟩ + c and their robustness
//! bound.

use fidelimax_core::json::is_fingerprint;
use fidelimax_core::{plan_fingerprint, Error, MeasurementPlan, Result};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

/// Schema version of the estimator file format.
pub const ESTIMATOR_VERSION: u32 = 1;
/// Slack on the risk and constant invariants.
pub const INVARIANT_TOL: f64 = 1e-3;

/// Coefficients a^(l)_k, constant c and risk of an affine fidelity
/// estimator, bound to one plan by its fingerprint.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineEstimator {
    coefficients: Vec<Vec<f64>>,
    repetitions: Vec<u64>,
    constant: f64,
    risk: f64,
    epsilon: f64,
    epsilon_o: f64,
    plan_fingerprint: String,
}

/// An estimate with its half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub risk: f64,
    /// Set when the raw affine value lies outside [0, 1]; it is not clipped.
    pub unphysical: bool,
}

impl AffineEstimator {
    pub fn new(
        coefficients: Vec<Vec<f64>>,
        repetitions: Vec<u64>,
        constant: f64,
        risk: f64,
        epsilon: f64,
        epsilon_o: f64,
        plan_fingerprint: String,
    ) -> Result<Self> {
        if coefficients.len() != repetitions.len() {
            return Err(Error::InvalidInput(format!(
                "{} coefficient vectors for {} settings",
                coefficients.len(),
                repetitions.len()
            )));
        }
        if coefficients.iter().flatten().any(|a| !a.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        if !(0.0..=0.5 + INVARIANT_TOL).contains(&risk) {
            return Err(Error::InvalidInput(format!("risk {risk} outside [0, 0.5]")));
        }
        if !(-1e-9..=1.0 + 1e-9).contains(&constant) || constant + risk > 1.0 + INVARIANT_TOL {
            return Err(Error::InvalidInput(format!("constant {constant} with risk {risk} violates 0 ≤ c ≤ c + risk ≤ 1")));
        }
        if !is_fingerprint(&plan_fingerprint) {
            return Err(Error::Integrity(format!("malformed plan fingerprint '{plan_fingerprint}'")));
        }
        Ok(Self { coefficients, repetitions, constant, risk, epsilon, epsilon_o, plan_fingerprint })
    }

    /// Constant estimator c with the given risk (ignores all data).
    pub fn constant_for(plan: &MeasurementPlan, constant: f64, risk: f64) -> Result<Self> {
        Self::new(
            plan.settings().iter().map(|s| vec![0.0; s.num_outcomes()]).collect(),
            plan.settings().iter().map(|s| s.repetitions()).collect(),
            constant,
            risk,
            plan.epsilon(),
            plan.epsilon_o(),
            plan_fingerprint(plan),
        )
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    pub fn repetitions(&self) -> &[u64] {
        &self.repetitions
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn risk(&self) -> f64 {
        self.risk
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn epsilon_o(&self) -> f64 {
        self.epsilon_o
    }

    pub fn plan_fingerprint(&self) -> &str {
        &self.plan_fingerprint
    }

    /// Errors unless `plan` is the plan this estimator was built for.
    pub fn check_plan(&self, plan: &MeasurementPlan) -> Result<()> {
        let fp = plan_fingerprint(plan);
        if fp != self.plan_fingerprint {
            return Err(Error::Integrity(format!(
                "estimator was built for plan {}, not {fp}",
                self.plan_fingerprint
            )));
        }
        Ok(())
    }

    /// Σ_l R_l⟨a^(l), f^(l)⟩ + c.
    pub fn estimate(&self, data: &Dataset) -> Result<f64> {
        self.check_data(data)?;
        Ok(self.estimate_frequencies_unchecked(&data.frequencies()))
    }

    /// [`AffineEstimator::estimate`] with risk and an out-of-range flag.
    pub fn evaluate(&self, data: &Dataset) -> Result<Estimate> {
        let value = self.estimate(data)?;
        Ok(Estimate { value, risk: self.risk, unphysical: !(0.0..=1.0).contains(&value) })
    }

    /// The estimate for arbitrary per-setting frequency vectors, with the
    /// estimator's own R_l as weights.
    pub fn estimate_frequencies(&self, freqs: &[Vec<f64>]) -> Result<f64> {
        if freqs.len() != self.coefficients.len()
            || freqs.iter().zip(&self.coefficients).any(|(f, a)| f.len() != a.len())
        {
            return Err(Error::InvalidInput("frequency shapes do not match the estimator".into()));
        }
        Ok(self.estimate_frequencies_unchecked(freqs))
    }

    fn estimate_frequencies_unchecked(&self, freqs: &[Vec<f64>]) -> f64 {
        let sum: f64 = self
            .coefficients
            .iter()
            .zip(freqs)
            .zip(&self.repetitions)
            .map(|((a, f), &r)| r as f64 * a.iter().zip(f).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        sum + self.constant
    }

    /// Σ_l Σ_r a^(l)_{o_r} + c over individual outcomes.
    pub fn estimate_outcomes(&self, outcomes: &[Vec<usize>]) -> Result<f64> {
        if outcomes.len() != self.coefficients.len() {
            return Err(Error::InvalidInput("outcome lists do not match the estimator".into()));
        }
        let mut total = self.constant;
        for ((list, a), &r) in outcomes.iter().zip(&self.coefficients).zip(&self.repetitions) {
            if list.len() as u64 != r {
                return Err(Error::InvalidInput(format!("{} outcomes recorded, expected {r}", list.len())));
            }
            for &k in list {
                total += *a
                    .get(k)
                    .ok_or_else(|| Error::InvalidInput(format!("outcome {k} out of range")))?;
            }
        }
        Ok(total)
    }

    fn check_data(&self, data: &Dataset) -> Result<()> {
        if let Some(fp) = data.plan_fingerprint() {
            if fp != self.plan_fingerprint {
                return Err(Error::Integrity(format!(
                    "dataset belongs to plan {fp}, estimator to plan {}",
                    self.plan_fingerprint
                )));
            }
        }
        if data.num_settings() != self.coefficients.len() {
            return Err(Error::InvalidInput(format!(
                "dataset has {} settings, estimator has {}",
                data.num_settings(),
                self.coefficients.len()
            )));
        }
        for (l, (c, a)) in data.counts().iter().zip(&self.coefficients).enumerate() {
            if c.len() != a.len() {
                return Err(Error::InvalidInput(format!("setting {l}: {} counts for {} outcomes", c.len(), a.len())));
            }
        }
        if data.repetitions() != self.repetitions {
            return Err(Error::InvalidInput(format!(
                "shot numbers {:?} differ from the estimator's {:?}",
                data.repetitions(),
                self.repetitions
            )));
        }
        Ok(())
    }

    /// ‖ℓ‖₁ = Σ_l R_l Σ_k |a^(l)_k|.
    pub fn l1_weight(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.repetitions)
            .map(|(a, &r)| r as f64 * a.iter().map(|x| x.abs()).sum::<f64>())
            .sum()
    }

    /// Worst-case shift of the estimate under bounded state, POVM and
    /// histogram errors.
    pub fn robustness_bound(&self, rin: &RobustnessInput) -> f64 {
        self.l1_weight()
            * (rin.max_effect_infnorm * rin.delta_s
                + rin.state_infnorm * rin.delta_m
                + rin.delta_m * rin.delta_s
                + rin.hist_err
                + rin.hist_err_tilde)
    }

    pub fn to_json(&self) -> String {
        let file = EstimatorFile {
            version: ESTIMATOR_VERSION,
            constant: self.constant,
            risk: self.risk,
            epsilon: self.epsilon,
            epsilon_o: self.epsilon_o,
            repetitions: self.repetitions.clone(),
            coefficients: self.coefficients.clone(),
            plan_fingerprint: self.plan_fingerprint.clone(),
        };
        serde_json::to_string_pretty(&file).expect("estimator serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: EstimatorFile = serde_json::from_str(text)?;
        if f.version != ESTIMATOR_VERSION {
            return Err(Error::Parse(format!("unsupported estimator version {}", f.version)));
        }
        Self::new(f.coefficients, f.repetitions, f.constant, f.risk, f.epsilon, f.epsilon_o, f.plan_fingerprint)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimatorFile {
    version: u32,
    constant: f64,
    risk: f64,
    epsilon: f64,
    epsilon_o: f64,
    repetitions: Vec<u64>,
    coefficients: Vec<Vec<f64>>,
    plan_fingerprint: String,
}

/// Error budget for the robustness bound.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RobustnessInput {
    /// Bound on the entrywise 1-norm of each state perturbation.
    pub delta_s: f64,
    /// Bound on the entrywise 1-norm of each effect perturbation.
    pub delta_m: f64,
    /// max_l ‖f^(l) − p^(l)‖∞ for the unperturbed experiment.
    pub hist_err: f64,
    /// The same for the perturbed experiment.
    pub hist_err_tilde: f64,
    /// Largest absolute entry over all effects.
    pub max_effect_infnorm: f64,
    /// Largest absolute entry of the true state.
    pub state_infnorm: f64,
}

impl RobustnessInput {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.delta_s,
            self.delta_m,
            self.hist_err,
            self.hist_err_tilde,
            self.max_effect_infnorm,
            self.state_infnorm,
        ];
        if fields.iter().all(|v| *v >= 0.0 && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput("robustness inputs must be finite and nonnegative".into()))
        }
    }
}

/// Free-function form of [`AffineEstimator::robustness_bound`].
pub fn robustness_bound(est: &AffineEstimator, rin: &RobustnessInput) -> f64 {
    est.robustness_bound(rin)
}
