//! Dense Hermitian operators and density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Dense complex matrix used throughout the workspace.
pub type CMatrix = DMatrix<Complex64>;

/// Absolute tolerance for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Purity tolerance for rank-one targets.
pub const PURITY_TOL: f64 = 1e-8;

/// A d×d complex Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    /// Checks Hermiticity within [`HERMITIAN_TOL`] and stores the symmetrized
    /// matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(invalid(format!(
                "operator must be a nonempty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(invalid(format!("matrix is not Hermitian (deviation {dev:.3e})")));
        }
        Ok(Self::symmetrized(m))
    }

    /// Returns (m + m†)/2 without checking how far `m` was from Hermitian.
    ///
    /// # Panics
    /// Panics if `m` is not square.
    pub fn symmetrized(m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        let adj = m.adjoint();
        Self { m: (m + adj).scale(0.5) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { m: CMatrix::zeros(d, d) }
    }

    pub fn identity(d: usize) -> Self {
        Self { m: CMatrix::identity(d, d) }
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        Self {
            m: CMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::new(values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// The outer product |v⟩⟨v| (no normalization).
    pub fn outer(v: &[Complex64]) -> Self {
        let d = v.len();
        Self { m: CMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// tr(self · other), which is real for Hermitian arguments.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: &self.m - &other.m }
    }

    /// self + s·other
    pub fn add_scaled(&self, s: f64, other: &Self) -> Self {
        Self { m: &self.m + other.m.scale(s) }
    }

    /// Hermitian product A·B·A, symmetrized.
    pub fn sandwich(&self, inner: &Self) -> Self {
        Self::symmetrized(&self.m * &inner.m * &self.m)
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let eig = self.m.clone().symmetric_eigen();
        let d = self.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// Rebuilds V·diag(values)·V†.
    pub fn from_eigen(values: &[f64], vectors: &CMatrix) -> Self {
        let d = vectors.nrows();
        let mut scaled = vectors.clone();
        for (c, &v) in values.iter().enumerate() {
            for r in 0..d {
                scaled[(r, c)] *= v;
            }
        }
        Self::symmetrized(scaled * vectors.adjoint())
    }

    /// Applies a real function to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let (vals, vecs) = self.eigh();
        let mapped: Vec<f64> = vals.into_iter().map(f).collect();
        Self::from_eigen(&mapped, &vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -PSD_TOL
    }

    /// Largest absolute entry (the entrywise ∞-norm).
    pub fn max_abs_entry(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Sum of absolute entries (the entrywise 1-norm of the vectorization).
    pub fn entrywise_l1(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|v| v.abs()).sum()
    }

    /// Isometric real coordinates: diagonal entries, then √2·Re and √2·Im of
    /// each upper off-diagonal entry. `a.embed()·b.embed() == a.inner(b)`.
    pub fn embed(&self) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            out.push(self.m[(i, i)].re);
        }
        let s = std::f64::consts::SQRT_2;
        for i in 0..d {
            for j in i + 1..d {
                let z = self.m[(i, j)];
                out.push(s * z.re);
                out.push(s * z.im);
            }
        }
        out
    }

    /// Inverse of [`HermitianOperator::embed`].
    ///
    /// # Panics
    /// Panics if `x.len() != d*d`.
    pub fn from_embedding(d: usize, x: &[f64]) -> Self {
        assert_eq!(x.len(), d * d, "embedding length must be d^2");
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = Complex64::new(x[i], 0.0);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut idx = d;
        for i in 0..d {
            for j in i + 1..d {
                let z = Complex64::new(s * x[idx], s * x[idx + 1]);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                idx += 2;
            }
        }
        Self { m }
    }
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A positive semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validates positivity (eigenvalues ≥ −1e-10) and unit trace.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = op.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(invalid(format!("density matrix has negative eigenvalue {min:.3e}")));
        }
        Ok(Self { op })
    }

    /// Wraps an operator already known to be a state (projection output).
    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    /// |ψ⟩⟨ψ| for the normalized version of `psi`.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if psi.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(invalid("state vector must be nonzero and finite"));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self { op: HermitianOperator::outer(&v) })
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(invalid(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        Self::from_pure(&v)
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { op: HermitianOperator::identity(d).scale(1.0 / d as f64) }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// tr(ρ²)
    pub fn purity(&self) -> f64 {
        self.op.inner(&self.op)
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURITY_TOL
    }

    /// Errors unless the state is rank one.
    pub fn require_pure(&self) -> Result<()> {
        if self.is_pure() {
            Ok(())
        } else {
            Err(invalid(format!("target state must be pure (purity {})", self.purity())))
        }
    }

    /// The projector I − ρ, which for pure ρ is Δ_ρ.
    pub fn complement(&self) -> HermitianOperator {
        HermitianOperator::identity(self.dim()).sub(&self.op)
    }
}

/// tr(ρσ) for a pure target ρ.
pub fn fidelity_pure(target: &DensityMatrix, state: &DensityMatrix) -> Result<f64> {
    target.require_pure()?;
    check_dims(target.dim(), state.dim())?;
    Ok(target.op.inner(&state.op))
}

/// (1−p)·state + p·I/d.
pub fn depolarize(state: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("depolarizing strength {p} outside [0, 1]")));
    }
    let d = state.dim();
    let op = state
        .op
        .scale(1.0 - p)
        .add(&HermitianOperator::identity(d).scale(p / d as f64));
    Ok(DensityMatrix { op })
}

/// Half the trace norm of the difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(0.5 * a.op.sub(&b.op).trace_norm())
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(HermitianOperator::new(m).is_err());
    }

    #[test]
    fn embedding_is_isometric() {
        let a = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 0.0), c(0.1, -0.4), c(0.1, 0.4), c(0.7, 0.0)],
        ))
        .unwrap();
        let b = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(-1.0, 0.0), c(2.0, 0.5), c(2.0, -0.5), c(0.2, 0.0)],
        ))
        .unwrap();
        let dot: f64 = a.embed().iter().zip(b.embed()).map(|(x, y)| x * y).sum();
        let direct = (a.matrix() * b.matrix()).trace().re;
        assert!((dot - direct).abs() < 1e-14);
        assert!(HermitianOperator::from_embedding(2, &a.embed()).sub(&a).max_abs_entry() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let rho = DensityMatrix::basis_state(4, 2).unwrap();
        assert!((fidelity_pure(&rho, &rho).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((fidelity_pure(&rho, &mixed).unwrap() - 0.25).abs() < 1e-15);
        let noisy = depolarize(&rho, 0.1).unwrap();
        assert!((fidelity_pure(&rho, &noisy).unwrap() - 0.925).abs() < 1e-12);
        assert!(fidelity_pure(&mixed, &rho).is_err());
    }

    #[test]
    fn depolarize_endpoints() {
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(depolarize(&rho, 0.0).unwrap(), rho);
        let full = depolarize(&rho, 1.0).unwrap();
        assert!(full.op().sub(DensityMatrix::maximally_mixed(2).op()).max_abs_entry() < 1e-15);
        assert!(depolarize(&rho, 1.5).is_err());
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let h = HermitianOperator::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)],
        ))
        .unwrap();
        let (vals, vecs) = h.eigh();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        assert!(HermitianOperator::from_eigen(&vals, &vecs).sub(&h).max_abs_entry() < 1e-12);
    }
}
