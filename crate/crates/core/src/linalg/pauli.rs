use core::fmt;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::SubsetMask;

use super::matrix::{pauli_matrix, tensor, ComplexMatrix, ZERO};
use super::TOL_HERM;

/// Largest register handled by the Pauli expansion (`4^n` coefficients).
pub const MAX_PAULI_QUBITS: usize = 8;

const LABELS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// A tensor product of single-qubit Paulis `σ_{o_1} ⊗ … ⊗ σ_{o_n}` with
/// `o_i ∈ {0 = I, 1 = X, 2 = Y, 3 = Z}`, indexed by `Σ o_i 4^{n-i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    n: u8,
    index: u32,
}

impl PauliString {
    pub fn new(ops: &[u8]) -> Result<Self> {
        if ops.is_empty() || ops.len() > MAX_PAULI_QUBITS {
            return Err(Error::input(format!("Pauli string length {} out of range", ops.len())));
        }
        if let Some(o) = ops.iter().find(|o| **o > 3) {
            return Err(Error::input(format!("Pauli operator index {o} out of range")));
        }
        let index = ops.iter().fold(0u32, |acc, o| acc * 4 + *o as u32);
        Ok(PauliString { n: ops.len() as u8, index })
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        debug_assert!(n <= MAX_PAULI_QUBITS && index < 1 << (2 * n));
        PauliString { n: n as u8, index: index as u32 }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::from_index(n, 0)
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    /// Operator on qubit `i` (1-based).
    pub fn op(self, i: usize) -> u8 {
        ((self.index >> (2 * (self.n() - i))) & 3) as u8
    }

    pub fn ops(self) -> Vec<u8> {
        (1..=self.n()).map(|i| self.op(i)).collect()
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(self) -> SubsetMask {
        (1..=self.n()).filter(|&i| self.op(i) != 0).fold(SubsetMask::EMPTY, |m, i| m.union(SubsetMask::singleton(i)))
    }

    pub fn weight(self) -> usize {
        self.support().len()
    }

    /// The same operator placed on `positions` of an `n`-qubit register.
    pub fn lift(self, positions: SubsetMask, n: usize) -> Result<PauliString> {
        if positions.len() != self.n() || !positions.is_subset_of(SubsetMask::full(n)) {
            return Err(Error::input(format!("cannot place a {}-qubit string on {positions}", self.n())));
        }
        let mut ops = vec![0u8; n];
        for (k, i) in positions.indices().enumerate() {
            ops[i - 1] = self.op(k + 1);
        }
        PauliString::new(&ops)
    }

    /// The factors on `positions`, if the support lies inside them.
    pub fn restrict(self, positions: SubsetMask) -> Option<PauliString> {
        if !self.support().is_subset_of(positions) || positions.is_empty() {
            return None;
        }
        let ops: Vec<u8> = positions.indices().map(|i| self.op(i)).collect();
        PauliString::new(&ops).ok()
    }

    /// `(x, z, y)`: index-space bit masks flipped by the string, masks
    /// picking up a `-1` phase, and the number of `Y` factors.
    fn masks(self) -> (usize, usize, u32) {
        let n = self.n();
        let (mut x, mut z, mut y) = (0usize, 0usize, 0u32);
        for i in 1..=n {
            let bit = 1usize << (n - i);
            match self.op(i) {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    y += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        (x, z, y)
    }

    /// Dense matrix of the string.
    pub fn matrix(self) -> ComplexMatrix {
        let mut m = pauli_matrix(self.op(1));
        for i in 2..=self.n() {
            m = tensor(&m, &pauli_matrix(self.op(i))).expect("Pauli strings stay within the dimension cap");
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n() {
            write!(f, "{}", LABELS[self.op(i) as usize])?;
        }
        Ok(())
    }
}

/// `S|j⟩ = phase(j) |j ⊕ x⟩`.
fn phase(j: usize, z: usize, y: u32) -> Complex64 {
    let base = match y % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    if (j & z).count_ones() % 2 == 1 {
        -base
    } else {
        base
    }
}

/// Real coefficients `c_S` with `M = Σ_S c_S S`; for a density matrix the
/// identity coefficient is `2^-n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients {
    n: usize,
    coeffs: Vec<f64>,
}

impl PauliCoefficients {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::Resource(format!("Pauli expansion supports 1..={MAX_PAULI_QUBITS} qubits, got {n}")));
        }
        Ok(PauliCoefficients { n, coeffs: vec![0.0; 1 << (2 * n)] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: PauliString) -> f64 {
        assert_eq!(s.n(), self.n, "Pauli string length mismatch");
        self.coeffs[s.index()]
    }

    pub fn set(&mut self, s: PauliString, value: f64) {
        assert_eq!(s.n(), self.n, "Pauli string length mismatch");
        self.coeffs[s.index()] = value;
    }

    /// Coefficient of the string with the given operator list.
    pub fn get_ops(&self, ops: &[u8]) -> Result<f64> {
        let s = PauliString::new(ops)?;
        if s.n() != self.n {
            return Err(Error::input(format!("expected {} operators, got {}", self.n, ops.len())));
        }
        Ok(self.get(s))
    }

    pub fn identity(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        let n = self.n;
        self.coeffs.iter().enumerate().map(move |(i, c)| (PauliString::from_index(n, i), *c))
    }

    /// Coefficients of the reduction to `keep`: `2^{n-|keep|} c_S` for every
    /// `S` supported inside `keep`.
    pub fn reduce(&self, keep: SubsetMask) -> Result<PauliCoefficients> {
        if keep.is_empty() || !keep.is_subset_of(SubsetMask::full(self.n)) {
            return Err(Error::input(format!("cannot reduce {} qubits to {keep}", self.n)));
        }
        let mut out = PauliCoefficients::zeros(keep.len())?;
        let factor = (1u64 << (self.n - keep.len())) as f64;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let s = PauliString::from_index(keep.len(), i).lift(keep, self.n)?;
            *c = factor * self.get(s);
        }
        Ok(out)
    }
}

/// Pauli coefficients `tr(M S) / 2^n` of a Hermitian matrix.
pub fn pauli_expand(m: &ComplexMatrix) -> Result<PauliCoefficients> {
    let herm = m.hermiticity_error();
    if herm > TOL_HERM {
        return Err(Error::input(format!("matrix is not Hermitian (max |M - M†| = {herm:e})")));
    }
    let n = m.qubits();
    let mut out = PauliCoefficients::zeros(n)?;
    let d = m.dim();
    let scale = 1.0 / d as f64;
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        let (x, z, y) = PauliString::from_index(n, idx).masks();
        let mut s = ZERO;
        for j in 0..d {
            s += m[(j, j ^ x)] * phase(j, z, y);
        }
        *c = s.re * scale;
    }
    Ok(out)
}

/// `Σ_S c_S S`.
pub fn pauli_assemble(p: &PauliCoefficients) -> ComplexMatrix {
    let n = p.n;
    let d = 1usize << n;
    let mut out = ComplexMatrix::zeros(d);
    for (idx, c) in p.coeffs.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let (x, z, y) = PauliString::from_index(n, idx).masks();
        for j in 0..d {
            out[(j ^ x, j)] += phase(j, z, y) * *c;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;

    #[test]
    fn string_indexing() {
        let s = PauliString::new(&[3, 0, 2]).unwrap();
        assert_eq!(s.index(), 3 * 16 + 2);
        assert_eq!(s.ops(), vec![3, 0, 2]);
        assert_eq!(s.support(), SubsetMask::from_indices(&[1, 3]).unwrap());
        assert_eq!(format!("{s}"), "ZIY");
        assert!(PauliString::new(&[4]).is_err());
    }

    #[test]
    fn string_matrix_matches_masks() {
        for idx in 0..64 {
            let s = PauliString::from_index(3, idx);
            let mut single = PauliCoefficients::zeros(3).unwrap();
            single.set(s, 1.0);
            assert!(pauli_assemble(&single).max_abs_diff(&s.matrix()) < 1e-15, "{s}");
        }
    }

    #[test]
    fn maximally_mixed_expansion() {
        let p = pauli_expand(&ComplexMatrix::identity(8).scale(0.125)).unwrap();
        assert_eq!(p.identity(), 0.125);
        assert!(p.as_slice()[1..].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn ghz_zz_coefficient() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = Complex64::new(h, 0.0);
        amps[7] = Complex64::new(h, 0.0);
        let rho = StateVector::new(amps).unwrap().projector();
        let p = pauli_expand(&rho).unwrap();
        let zz1 = PauliString::new(&[3, 3, 0]).unwrap();
        // Oracle: tr(ρ · Z⊗Z⊗I) / 8 by direct multiplication.
        let direct = rho.matmul(&zz1.matrix()).trace().re / 8.0;
        assert!((p.get(zz1) - direct).abs() < 1e-15);
        assert!((p.get(zz1) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(pauli_expand(&m).is_err());
    }

    #[test]
    fn lift_and_restrict() {
        let s = PauliString::new(&[1, 3]).unwrap();
        let keep = SubsetMask::from_indices(&[1, 3]).unwrap();
        let l = s.lift(keep, 3).unwrap();
        assert_eq!(l.ops(), vec![1, 0, 3]);
        assert_eq!(l.restrict(keep), Some(s));
        assert_eq!(l.restrict(SubsetMask::from_indices(&[1, 2]).unwrap()), None);
    }
}
