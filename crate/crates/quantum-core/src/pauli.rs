//! Signed Pauli strings and stabilizer groups.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hermitian::{CMatrix, DensityMatrix, HermitianOperator};

/// Largest qubit count for which whole groups or Pauli sets are enumerated.
pub const MAX_ENUMERATION_QUBITS: usize = 12;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// (k, c) with a·b = i^k c.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

/// A tensor product of Pauli letters with a ±1 sign. Qubit 0 is the leftmost
/// letter and the most significant bit of a basis index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    negative: bool,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>, negative: bool) -> Self {
        Self { letters, negative }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n], false)
    }

    /// The `index`-th string in base-4 order (I=0, X=1, Y=2, Z=3, qubit 0
    /// most significant). Index 0 is the identity.
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut letters = vec![Pauli::I; n];
        for q in (0..n).rev() {
            letters[q] = Pauli::ALL[index % 4];
            index /= 4;
        }
        Self::new(letters, false)
    }

    /// All 4^n − 1 non-identity strings with sign +1, in base-4 order.
    pub fn all_nonidentity(n: usize) -> Result<Vec<Self>> {
        if n == 0 || n > MAX_ENUMERATION_QUBITS {
            return Err(Error::ResourceLimit(format!("cannot enumerate Pauli strings on {n} qubits")));
        }
        Ok((1..1usize << (2 * n)).map(|i| Self::from_index(n, i)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn with_sign(&self, negative: bool) -> Self {
        Self::new(self.letters.clone(), negative)
    }

    pub fn negated(&self) -> Self {
        self.with_sign(!self.negative)
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Letters without the sign, e.g. "XZ".
    pub fn unsigned_label(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Product self·other = i^k · result (k returned first).
    pub fn multiply(&self, other: &Self) -> (u8, Self) {
        assert_eq!(self.n_qubits(), other.n_qubits(), "qubit counts differ");
        let mut k = 0u8;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, c) = a.mul(b);
                k += p;
                c
            })
            .collect();
        if self.negative != other.negative {
            k += 2;
        }
        (k % 4, Self::new(letters, false))
    }

    fn flip_mask(&self) -> usize {
        let n = self.n_qubits();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (q, _)| m | 1 << (n - 1 - q))
    }

    /// The entry W[c ⊕ x, c] for input basis index `c`.
    fn column_phase(&self, c: usize) -> Complex64 {
        let n = self.n_qubits();
        let mut z = Complex64::new(self.sign(), 0.0);
        for (q, p) in self.letters.iter().enumerate() {
            let bit = (c >> (n - 1 - q)) & 1;
            match p {
                Pauli::Y => z *= if bit == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) },
                Pauli::Z if bit == 1 => z = -z,
                _ => {}
            }
        }
        z
    }

    /// Dense 2^n × 2^n matrix including the sign.
    pub fn matrix(&self) -> HermitianOperator {
        let d = 1usize << self.n_qubits();
        let x = self.flip_mask();
        let mut m = CMatrix::zeros(d, d);
        for c in 0..d {
            m[(c ^ x, c)] = self.column_phase(c);
        }
        HermitianOperator::symmetrized(m)
    }

    /// tr(W·state) in O(d) without forming W.
    pub fn expectation(&self, state: &HermitianOperator) -> f64 {
        let d = 1usize << self.n_qubits();
        debug_assert_eq!(state.dim(), d);
        let x = self.flip_mask();
        let m = state.matrix();
        (0..d).map(|c| (self.column_phase(c) * m[(c, c ^ x)]).re).sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        write!(f, "{}", self.unsigned_label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if body.is_empty() {
            return Err(invalid("empty Pauli string"));
        }
        let letters = body
            .chars()
            .map(|c| Pauli::from_char(c.to_ascii_uppercase()).ok_or_else(|| invalid(format!("bad Pauli letter '{c}' in '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(letters, negative))
    }
}

/// tr(W_i·state) for every non-identity Pauli string W_i in base-4 order.
pub fn pauli_expectations(state: &DensityMatrix, n: usize) -> Result<Vec<f64>> {
    if n == 0 || state.dim() != 1usize << n {
        return Err(invalid(format!("dimension {} is not 2^{n}", state.dim())));
    }
    Ok(PauliString::all_nonidentity(n)?
        .iter()
        .map(|w| w.expectation(state.op()))
        .collect())
}

/// Number of qubits if `d` is a power of two.
pub fn qubits_for_dim(d: usize) -> Result<usize> {
    if d >= 2 && d.is_power_of_two() {
        Ok(d.trailing_zeros() as usize)
    } else {
        Err(invalid(format!("dimension {d} is not a power of two")))
    }
}

/// An abelian group generated by n independent commuting Pauli strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerGroup {
    n_qubits: usize,
    generators: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let n = generators.first().map(PauliString::n_qubits).unwrap_or(0);
        if n == 0 {
            return Err(invalid("a stabilizer group needs at least one generator"));
        }
        if generators.iter().any(|g| g.n_qubits() != n) {
            return Err(invalid("generators act on differing qubit counts"));
        }
        if generators.len() != n {
            return Err(invalid(format!("{n} qubits need {n} generators, got {}", generators.len())));
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(invalid(format!("generators {a} and {b} do not commute")));
                }
            }
        }
        if symplectic_rank(&generators) != n {
            return Err(invalid("generators are not independent"));
        }
        Ok(Self { n_qubits: n, generators })
    }

    /// Generators X⊗…⊗X and Z_iZ_{i+1}; n = 2 gives the Bell state.
    pub fn ghz(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("GHZ group needs at least one qubit"));
        }
        if n == 1 {
            return Self::new(vec![PauliString::new(vec![Pauli::Z], false)]);
        }
        let mut gens = vec![PauliString::new(vec![Pauli::X; n], false)];
        for i in 0..n - 1 {
            let mut letters = vec![Pauli::I; n];
            letters[i] = Pauli::Z;
            letters[i + 1] = Pauli::Z;
            gens.push(PauliString::new(letters, false));
        }
        Self::new(gens)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// All 2^n signed elements; element `m` is the product of the generators
    /// selected by the bits of `m`, so the identity comes first.
    pub fn enumerate(&self) -> Result<Vec<PauliString>> {
        let n = self.n_qubits;
        if n > MAX_ENUMERATION_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "group enumeration limited to {MAX_ENUMERATION_QUBITS} qubits, got {n}"
            )));
        }
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..1usize << n {
            let mut acc = PauliString::identity(n);
            for (i, g) in self.generators.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    let (k, p) = acc.multiply(g);
                    // Commuting Hermitian factors give a real phase.
                    debug_assert!(k % 2 == 0);
                    acc = p.with_sign(k == 2);
                }
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// The stabilized pure state Π_g (I + g)/2.
    pub fn state(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let id = HermitianOperator::identity(d);
        let mut m = CMatrix::identity(d, d);
        for g in &self.generators {
            let proj = id.add(&g.matrix()).scale(0.5);
            m = m * proj.matrix();
        }
        DensityMatrix::new(HermitianOperator::symmetrized(m))
    }
}

/// Stabilizer state of a validated group.
pub fn stabilizer_state(group: &StabilizerGroup) -> Result<DensityMatrix> {
    group.state()
}

fn symplectic_rank(gens: &[PauliString]) -> usize {
    let n = gens[0].n_qubits();
    let mut rows: Vec<Vec<bool>> = gens
        .iter()
        .map(|g| {
            let mut v = Vec::with_capacity(2 * n);
            v.extend(g.letters.iter().map(|p| matches!(p, Pauli::X | Pauli::Y)));
            v.extend(g.letters.iter().map(|p| matches!(p, Pauli::Z | Pauli::Y)));
            v
        })
        .collect();
    let mut rank = 0;
    for col in 0..2 * n {
        if let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) {
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r][col] {
                    let pivot_row = rows[rank].clone();
                    for (a, b) in rows[r].iter_mut().zip(pivot_row) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_matrices() {
        assert_eq!(p("Z").matrix(), HermitianOperator::diagonal(&[1.0, -1.0]));
        let y = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert_eq!(p("Y").matrix().matrix(), &y);
    }

    #[test]
    fn signed_tensor_product() {
        let xx = p("-XX").matrix();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(xx.matrix(), &(-x.kronecker(&x)));
    }

    #[test]
    fn matrices_are_involutions_and_traceless() {
        for w in PauliString::all_nonidentity(2).unwrap() {
            let m = w.matrix();
            let sq = m.matrix() * m.matrix();
            assert!((sq - CMatrix::identity(4, 4)).iter().all(|z| z.norm() < 1e-15));
            assert_eq!(m.trace(), 0.0);
        }
    }

    #[test]
    fn products_follow_pauli_algebra() {
        assert_eq!(p("X").multiply(&p("Y")), (1, p("Z")));
        assert_eq!(p("XX").multiply(&p("ZZ")), (2, p("YY")));
        assert_eq!(p("-Z").multiply(&p("Z")), (2, p("I")));
    }

    #[test]
    fn bell_group() {
        let g = StabilizerGroup::new(vec![p("XX"), p("ZZ")]).unwrap();
        let elems = g.enumerate().unwrap();
        assert_eq!(elems, vec![p("II"), p("XX"), p("ZZ"), p("-YY")]);
        let rho = g.state().unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::from_pure(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]).unwrap();
        assert!(rho.op().sub(bell.op()).max_abs_entry() < 1e-14);
        for e in &elems {
            assert!((e.expectation(rho.op()) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_groups() {
        assert!(StabilizerGroup::new(vec![p("XI"), p("ZI")]).is_err());
        assert!(StabilizerGroup::new(vec![p("ZZ"), p("-ZZ")]).is_err());
        assert!(StabilizerGroup::new(vec![p("ZZ")]).is_err());
    }

    #[test]
    fn z_group() {
        let g = StabilizerGroup::new(vec![p("Z")]).unwrap();
        assert_eq!(g.enumerate().unwrap(), vec![p("I"), p("Z")]);
        assert_eq!(g.state().unwrap(), DensityMatrix::basis_state(2, 0).unwrap());
    }

    #[test]
    fn expectation_matches_dense_trace() {
        let rho = StabilizerGroup::ghz(3).unwrap().state().unwrap();
        for w in PauliString::all_nonidentity(3).unwrap() {
            let dense = w.matrix().inner(rho.op());
            assert!((dense - w.expectation(rho.op())).abs() < 1e-14);
        }
    }
}
