//! Randomized schemes: uniform stabilizer sampling and weighted Pauli
//! sampling, each summarized by a two-outcome effective POVM.

use fidelimax_core::{
    pauli_expectations, qubits_for_dim, rng_from_seed, DensityMatrix, Error, PauliString,
    Result, StabilizerGroup,
};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;

use crate::effective::EffectivePovm;

/// R uniformly drawn non-identity stabilizers and the effective POVM
/// Θ = ρ + (d/2 − 1)/(d − 1)·Δ_ρ of measuring one of them at random.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerScheme {
    pub samples: Vec<PauliString>,
    pub povm: EffectivePovm,
    pub repetitions: u64,
}

/// Samples R stabilizer elements (with replacement, identity excluded).
pub fn stabilizer_scheme(group: &StabilizerGroup, repetitions: u64, seed: u64) -> Result<StabilizerScheme> {
    let elements = group.enumerate()?;
    let target = group.state()?;
    let d = group.dim() as f64;
    let mut rng = rng_from_seed(seed);
    // Index 0 is the identity.
    let samples = (0..repetitions).map(|_| elements[rng.random_range(1..elements.len())].clone()).collect();
    let povm = EffectivePovm::new(&target, 1.0, (d / 2.0 - 1.0) / (d - 1.0))?;
    Ok(StabilizerScheme { samples, povm, repetitions })
}

/// Sampling distribution p_i = |tr(W_iρ)|/N over non-identity Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSchemeSpec {
    pub target: DensityMatrix,
    /// Non-identity Pauli strings in base-4 order, signed by sign(tr(W_iρ)).
    pub paulis: Vec<PauliString>,
    pub probabilities: Vec<f64>,
    /// N = Σ_i |tr(W_iρ)|.
    pub norm_n: f64,
}

impl PauliSchemeSpec {
    pub fn new(target: &DensityMatrix) -> Result<Self> {
        target.require_pure()?;
        let n = qubits_for_dim(target.dim())?;
        let x = pauli_expectations(target, n)?;
        let norm_n: f64 = x.iter().map(|v| v.abs()).sum();
        if !(norm_n > 0.0) {
            return Err(Error::Integrity("pure state with vanishing Pauli weights".into()));
        }
        let d = target.dim() as f64;
        if norm_n > (d - 1.0) * (d + 1.0).sqrt() + 1e-8 {
            return Err(Error::Integrity(format!("Pauli norm {norm_n} exceeds (d-1)sqrt(d+1)")));
        }
        let paulis = (1..x.len() + 1)
            .map(|i| {
                let w = PauliString::from_index(n, i);
                if x[i - 1] < 0.0 {
                    w.negated()
                } else {
                    w
                }
            })
            .collect();
        let probabilities = x.iter().map(|v| v.abs() / norm_n).collect();
        Ok(Self { target: target.clone(), paulis, probabilities, norm_n })
    }

    /// Θ = (d + N − 1)/(2N)·ρ + (N − 1)/(2N)·Δ_ρ.
    pub fn effective_povm(&self) -> Result<EffectivePovm> {
        let (d, n) = (self.target.dim() as f64, self.norm_n);
        EffectivePovm::new(&self.target, (d + n - 1.0) / (2.0 * n), (n - 1.0) / (2.0 * n))
    }
}

/// One draw of the randomized Pauli scheme. The recorded ±1 outcome of the
/// unsigned string is multiplied by the sign of `pauli`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPauli {
    /// Index into `PauliSchemeSpec::paulis`.
    pub index: usize,
    pub pauli: PauliString,
}

impl SampledPauli {
    /// Outcome after the sign flip, given the raw ±1 eigenvalue of the
    /// unsigned string.
    pub fn flipped(&self, raw: f64) -> f64 {
        self.pauli.sign() * raw
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliScheme {
    pub spec: PauliSchemeSpec,
    pub samples: Vec<SampledPauli>,
    pub povm: EffectivePovm,
    pub repetitions: u64,
}

/// Draws R Paulis i.i.d. from p_i (with replacement).
pub fn pauli_scheme(target: &DensityMatrix, repetitions: u64, seed: u64) -> Result<PauliScheme> {
    let spec = PauliSchemeSpec::new(target)?;
    let dist = WeightedIndex::new(&spec.probabilities).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = rng_from_seed(seed);
    let samples = (0..repetitions)
        .map(|_| {
            let index = dist.sample(&mut rng);
            SampledPauli { index, pauli: spec.paulis[index].clone() }
        })
        .collect();
    let povm = spec.effective_povm()?;
    Ok(PauliScheme { spec, samples, povm, repetitions })
}
