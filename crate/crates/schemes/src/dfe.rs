//! Direct fidelity estimation (DFE) as a benchmark scheme generator.
//!
//! The constants follow Flammia and Liu's protocol: ℓ = ⌈1/(r²ε)⌉ Paulis are
//! drawn with probability tr(ρW_i)²/d, and Pauli i gets
//! m_i = ⌈2 ln(2/ε)/(ℓ·tr(ρW_i)²·r²)⌉ shots, where r is the target accuracy.
//! The identity (probability 1/d, expectation exactly 1) is accounted for
//! analytically instead of being sampled.

use std::collections::BTreeMap;

use fidelimax_core::{
    pauli_expectations, qubits_for_dim, rng_from_seed, DensityMatrix, Error, MeasurementPlan, PauliString, Result,
};
use fidelimax_estimator::Dataset;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::pauli_povm::{outcome_values, pauli_povm, PauliPovmMode};

/// Expectations below this magnitude are treated as zero weight.
const WEIGHT_FLOOR: f64 = 1e-12;

/// One distinct Pauli of a DFE prescription with all draws merged.
#[derive(Clone, Debug, PartialEq)]
pub struct DfeSetting {
    /// Unsigned Pauli string.
    pub pauli: PauliString,
    /// tr(ρW)
    pub expectation: f64,
    /// How many of the ℓ draws picked this Pauli.
    pub draws: u64,
    /// Shots per draw, m_i.
    pub shots_per_draw: u64,
}

impl DfeSetting {
    pub fn total_shots(&self) -> u64 {
        self.draws * self.shots_per_draw
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DfeScheme {
    pub target: DensityMatrix,
    pub risk: f64,
    pub epsilon: f64,
    /// ℓ, the number of sampled Paulis.
    pub ell: u64,
    /// Distinct sampled Paulis in base-4 order.
    pub settings: Vec<DfeSetting>,
}

impl DfeScheme {
    pub fn total_shots(&self) -> u64 {
        self.settings.iter().map(DfeSetting::total_shots).sum()
    }

    /// One setting per distinct Pauli with all its shots pooled.
    pub fn plan(&self, mode: PauliPovmMode, epsilon_o: f64) -> Result<MeasurementPlan> {
        let settings = self
            .settings
            .iter()
            .map(|s| pauli_povm(&s.pauli, mode, s.total_shots()))
            .collect::<Result<Vec<_>>>()?;
        MeasurementPlan::new(self.target.clone(), self.epsilon, epsilon_o, settings)
    }
}

/// Draws a DFE prescription for accuracy `risk` at confidence 1 − ε.
pub fn dfe_scheme(target: &DensityMatrix, risk: f64, epsilon: f64, seed: u64) -> Result<DfeScheme> {
    target.require_pure()?;
    if !(risk > 0.0 && risk < 0.5) {
        return Err(Error::InvalidInput(format!("risk {risk} outside (0, 0.5)")));
    }
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon} outside (0, 0.25)")));
    }
    let n = qubits_for_dim(target.dim())?;
    let x = pauli_expectations(target, n)?;
    let ell_f = (1.0 / (risk * risk * epsilon)).ceil();
    if ell_f > 1e9 {
        return Err(Error::ResourceLimit(format!("DFE would sample {ell_f:e} Paulis")));
    }
    let ell = ell_f as u64;
    let weights: Vec<f64> = x.iter().map(|v| if v.abs() > WEIGHT_FLOOR { v * v } else { 0.0 }).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..ell {
        *counts.entry(dist.sample(&mut rng)).or_default() += 1;
    }
    let log_term = 2.0 * (2.0 / epsilon).ln();
    let settings = counts
        .into_iter()
        .map(|(i, draws)| {
            let e = x[i];
            let m = (log_term / (ell as f64 * e * e * risk * risk)).ceil().max(1.0);
            DfeSetting { pauli: PauliString::from_index(n, i + 1), expectation: e, draws, shots_per_draw: m as u64 }
        })
        .collect();
    Ok(DfeScheme { target: target.clone(), risk, epsilon, ell, settings })
}

/// DFE fidelity estimate from data collected on `scheme.plan(mode, _)`:
/// 1/d + (1 − 1/d)/ℓ · Σ_i (sum of ±1 outcomes on W_i)/(m_i·tr(ρW_i)).
pub fn dfe_estimate(scheme: &DfeScheme, mode: PauliPovmMode, data: &Dataset) -> Result<f64> {
    if data.num_settings() != scheme.settings.len() {
        return Err(Error::InvalidInput(format!(
            "data has {} settings, scheme has {}",
            data.num_settings(),
            scheme.settings.len()
        )));
    }
    let d = scheme.target.dim() as f64;
    let mut sum = 0.0;
    for (s, counts) in scheme.settings.iter().zip(data.counts()) {
        let values = outcome_values(&s.pauli, mode);
        if counts.len() != values.len() {
            return Err(Error::InvalidInput(format!("setting {} expects {} outcomes", s.pauli, values.len())));
        }
        if counts.iter().sum::<u64>() != s.total_shots() {
            return Err(Error::InvalidInput(format!("setting {} expects {} shots", s.pauli, s.total_shots())));
        }
        let outcome_sum: f64 = counts.iter().zip(&values).map(|(&c, v)| c as f64 * v).sum();
        sum += outcome_sum / (s.shots_per_draw as f64 * s.expectation);
    }
    Ok(1.0 / d + (1.0 - 1.0 / d) * sum / scheme.ell as f64)
}
