//! Quantum building blocks for minimax fidelity estimation: dense Hermitian
//! operators, density matrices, POVM settings and measurement plans, Pauli
//! strings and stabilizer groups, projections, seeded randomness, JSON
//! encodings, and the accelerated projected-gradient routine shared by the
//! solvers.

#![forbid(unsafe_code)]

pub mod error;
pub mod hermitian;
pub mod json;
pub mod optim;
pub mod pauli;
pub mod povm;
pub mod projection;
pub mod random;

pub use error::{Error, Result};
pub use hermitian::{depolarize, fidelity_pure, trace_distance, CMatrix, DensityMatrix, HermitianOperator};
pub use json::{plan_fingerprint, plan_from_json, plan_to_json, PlanFile};
pub use pauli::{pauli_expectations, qubits_for_dim, stabilizer_state, Pauli, PauliString, StabilizerGroup};
pub use povm::{
    born_probs, classical_fidelity, hellinger_affinity, log_hellinger_affinity, MeasurementPlan, PovmSetting,
    DEFAULT_EPSILON_O,
};
pub use projection::{project_density, project_simplex};
pub use random::{derive_seed, random_povm, random_pure_state, random_pure_state_dim, rng_from_seed, Rng};

pub use num_complex::Complex64;
