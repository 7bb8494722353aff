//! Measurement-plan generators: the optimal two-outcome POVM, stabilizer
//! sampling, randomized Pauli sampling, DFE-style Pauli prescriptions, and
//! POVM builders for single Pauli operators.

#![forbid(unsafe_code)]

mod dfe;
mod effective;
mod pauli_povm;
mod sampling;

pub use dfe::{dfe_estimate, dfe_scheme, DfeScheme, DfeSetting};
pub use effective::{optimal_povm, EffectivePovm};
pub use pauli_povm::{pauli_povm, PauliPovmMode};
pub use sampling::{pauli_scheme, stabilizer_scheme, PauliScheme, PauliSchemeSpec, SampledPauli, StabilizerScheme};
