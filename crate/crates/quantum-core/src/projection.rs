//! Euclidean projections onto the probability simplex and the state space.

use crate::error::{invalid, Result};
use crate::hermitian::{DensityMatrix, HermitianOperator};

/// Euclidean projection onto {x ≥ 0, Σx = 1} by the sorted-threshold rule.
pub fn project_simplex(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(invalid("cannot project an empty vector onto the simplex"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(invalid("simplex projection input must be finite"));
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    Ok(v.iter().map(|&x| (x - theta).max(0.0)).collect())
}

/// Frobenius-nearest density matrix: diagonalize, project the spectrum onto
/// the simplex, reassemble.
pub fn project_density(h: &HermitianOperator) -> DensityMatrix {
    let (vals, vecs) = h.eigh();
    // Finite input always yields a finite spectrum, so the projection succeeds.
    let p = project_simplex(&vals).unwrap_or_else(|_| vec![1.0 / vals.len() as f64; vals.len()]);
    DensityMatrix::new_unchecked(HermitianOperator::from_eigen(&p, &vecs))
}
