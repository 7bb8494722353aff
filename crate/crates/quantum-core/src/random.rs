//! Seeded randomness: generator choice, seed derivation, random states and
//! POVMs, categorical sampling.
//!
//! Every random draw in the workspace comes from [`Rng`], the ChaCha20
//! stream cipher used as a counter-based generator. Independent streams are
//! keyed by [`derive_seed`], so results never depend on execution order.

use num_complex::Complex64;
use rand::{Rng as _, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::hermitian::{CMatrix, DensityMatrix, HermitianOperator};
use crate::povm::PovmSetting;

/// The workspace random number generator.
pub type Rng = rand_chacha::ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `stream` under master seed `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    mix(mix(master) ^ stream.wrapping_mul(0xD605_BBB5_8C8A_BBFD))
}

pub fn standard_complex(rng: &mut Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random pure state of dimension `d`.
pub fn random_pure_state_dim(d: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let v: Vec<Complex64> = (0..d).map(|_| standard_complex(&mut rng)).collect();
    DensityMatrix::from_pure(&v)
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure_state(n: usize, seed: u64) -> Result<DensityMatrix> {
    if n == 0 || n > 20 {
        return Err(invalid(format!("qubit count {n} out of range")));
    }
    random_pure_state_dim(1 << n, seed)
}

/// Random `outcomes`-element POVM E_k = M^{-1/2} G_kG_k† M^{-1/2}, where the
/// G_k are complex Gaussian d×d matrices and M = Σ_k G_kG_k†.
pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Result<PovmSetting> {
    if d == 0 || outcomes < 2 {
        return Err(invalid("random POVM needs d ≥ 1 and at least two outcomes"));
    }
    let mut rng = rng_from_seed(seed);
    let wisharts: Vec<HermitianOperator> = (0..outcomes)
        .map(|_| {
            let g = CMatrix::from_fn(d, d, |_, _| standard_complex(&mut rng));
            HermitianOperator::symmetrized(&g * g.adjoint())
        })
        .collect();
    let total = wisharts
        .iter()
        .fold(HermitianOperator::zeros(d), |acc, w| acc.add(w));
    let inv_sqrt = total.map_spectrum(|v| 1.0 / v.sqrt());
    let mut effects: Vec<HermitianOperator> = wisharts.iter().map(|w| inv_sqrt.sandwich(w)).collect();
    // Put the rounding residue of Σ E_k − I into the last effect.
    let sum = effects
        .iter()
        .fold(HermitianOperator::zeros(d), |acc, e| acc.add(e));
    let residue = HermitianOperator::identity(d).sub(&sum);
    let last = effects.len() - 1;
    effects[last] = effects[last].add(&residue);
    PovmSetting::new(format!("random-{seed}"), effects, 1)
}

/// Index of the first cumulative probability exceeding `u`.
pub fn sample_categorical(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // u landed in the rounding gap above the total.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Outcome counts of `shots` independent categorical draws.
pub fn sample_counts(probs: &[f64], shots: u64, rng: &mut Rng) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        counts[sample_categorical(probs, u)] += 1;
    }
    counts
}
