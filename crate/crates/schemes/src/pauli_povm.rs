use fidelimax_core::{Complex64, Error, HermitianOperator, Pauli, PauliString, PovmSetting, Result};

/// How a Pauli observable is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliPovmMode {
    /// Projectors (I ± W)/2 onto the ±1 eigenspaces, in that order.
    Subspace,
    /// Rank-one projectors onto the canonical tensor-product eigenbasis.
    Eigenbasis,
}

impl std::str::FromStr for PauliPovmMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subspace" => Ok(Self::Subspace),
            "eigenbasis" => Ok(Self::Eigenbasis),
            _ => Err(Error::InvalidInput(format!("unknown POVM mode '{s}' (expected subspace or eigenbasis)"))),
        }
    }
}

/// Single-qubit eigenvectors (+1 first, then −1). Identity letters use the
/// computational basis.
fn letter_basis(p: Pauli) -> [[Complex64; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    match p {
        Pauli::I | Pauli::Z => [[one, zero], [zero, one]],
        Pauli::X => [[one * h, one * h], [one * h, -one * h]],
        Pauli::Y => [[one * h, Complex64::new(0.0, h)], [one * h, Complex64::new(0.0, -h)]],
    }
}

/// Eigenvalue of `w` (sign included) on canonical eigenvector `k`, where bit
/// q of `k` (qubit 0 most significant) selects the ±1 vector of letter q.
pub(crate) fn eigenvalue(w: &PauliString, k: usize) -> f64 {
    let n = w.n_qubits();
    let flips = w
        .letters()
        .iter()
        .enumerate()
        .filter(|(q, p)| **p != Pauli::I && (k >> (n - 1 - q)) & 1 == 1)
        .count();
    w.sign() * if flips % 2 == 0 { 1.0 } else { -1.0 }
}

/// Canonical eigenvector `k` of the letters of `w`.
fn eigenvector(w: &PauliString, k: usize) -> Vec<Complex64> {
    let n = w.n_qubits();
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for (q, p) in w.letters().iter().enumerate() {
        let b = letter_basis(*p)[(k >> (n - 1 - q)) & 1];
        v = v.iter().flat_map(|a| [a * b[0], a * b[1]]).collect();
    }
    v
}

/// POVM measuring the Pauli observable `w` (sign included).
pub fn pauli_povm(w: &PauliString, mode: PauliPovmMode, repetitions: u64) -> Result<PovmSetting> {
    if w.is_identity() {
        return Err(Error::InvalidInput("cannot build a POVM for the identity string".into()));
    }
    let d = 1usize << w.n_qubits();
    let effects = match mode {
        PauliPovmMode::Subspace => {
            let plus = HermitianOperator::identity(d).add(&w.matrix()).scale(0.5);
            let minus = HermitianOperator::identity(d).sub(&plus);
            vec![plus, minus]
        }
        PauliPovmMode::Eigenbasis => (0..d).map(|k| HermitianOperator::outer(&eigenvector(w, k))).collect(),
    };
    PovmSetting::new(w.to_string(), effects, repetitions)
}

/// Eigenvalue attached to each outcome of `pauli_povm(w, mode, _)`.
pub(crate) fn outcome_values(w: &PauliString, mode: PauliPovmMode) -> Vec<f64> {
    match mode {
        PauliPovmMode::Subspace => vec![1.0, -1.0],
        PauliPovmMode::Eigenbasis => (0..1usize << w.n_qubits()).map(|k| eigenvalue(w, k)).collect(),
    }
}
