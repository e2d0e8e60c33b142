use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{embed, hermitian_eigen, partial_trace, ComplexMatrix, DensityMatrix, StateVector, TOL_PSD};
use crate::SubsetMask;

use super::TOL_EQ;

fn pair(i: usize, j: usize) -> SubsetMask {
    SubsetMask::singleton(i).union(SubsetMask::singleton(j))
}

/// Two-qubit states `ρ₁₂, ρ₁₃, ρ₂₃` on three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedFamily3 {
    rho12: DensityMatrix,
    rho13: DensityMatrix,
    rho23: DensityMatrix,
}

impl ReducedFamily3 {
    /// Checks only that each member is a two-qubit state; equimarginality
    /// is reported by [`check_q_equimarginal`].
    pub fn new(rho12: DensityMatrix, rho13: DensityMatrix, rho23: DensityMatrix) -> Result<Self> {
        for (name, r) in [("rho12", &rho12), ("rho13", &rho13), ("rho23", &rho23)] {
            if r.qubits() != 2 {
                return Err(Error::input(format!("{name} must be a two-qubit state, got {} qubits", r.qubits())));
            }
        }
        Ok(ReducedFamily3 { rho12, rho13, rho23 })
    }

    /// The two-qubit reductions of a three-qubit state.
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        if rho.qubits() != 3 {
            return Err(Error::input("expected a three-qubit state"));
        }
        ReducedFamily3::new(
            partial_trace(rho, pair(1, 2))?,
            partial_trace(rho, pair(1, 3))?,
            partial_trace(rho, pair(2, 3))?,
        )
    }

    pub fn rho12(&self) -> &DensityMatrix {
        &self.rho12
    }

    pub fn rho13(&self) -> &DensityMatrix {
        &self.rho13
    }

    pub fn rho23(&self) -> &DensityMatrix {
        &self.rho23
    }

    /// Members with their subsets, in the order `{1,2}, {1,3}, {2,3}`.
    pub fn members(&self) -> [(SubsetMask, &DensityMatrix); 3] {
        [(pair(1, 2), &self.rho12), (pair(1, 3), &self.rho13), (pair(2, 3), &self.rho23)]
    }

    /// One-qubit states read off `ρ₁₂` (qubits 1, 2) and `ρ₁₃` (qubit 3).
    pub fn single_qubit_states(&self) -> Result<[DensityMatrix; 3]> {
        let first = SubsetMask::singleton(1);
        let second = SubsetMask::singleton(2);
        Ok([
            partial_trace(&self.rho12, first)?,
            partial_trace(&self.rho12, second)?,
            partial_trace(&self.rho13, second)?,
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equimarginality {
    pub equimarginal: bool,
    pub max_deviation: f64,
}

/// Compares the one-qubit reductions shared by each pair of members.
pub fn check_q_equimarginal(f: &ReducedFamily3) -> Equimarginality {
    let one = SubsetMask::singleton(1);
    let two = SubsetMask::singleton(2);
    let tr = |r: &DensityMatrix, k: SubsetMask| partial_trace(r, k).expect("two-qubit member");
    let dev = [
        tr(&f.rho12, one).matrix().max_abs_diff(tr(&f.rho13, one).matrix()),
        tr(&f.rho12, two).matrix().max_abs_diff(tr(&f.rho23, one).matrix()),
        tr(&f.rho13, two).matrix().max_abs_diff(tr(&f.rho23, two).matrix()),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Equimarginality { equimarginal: dev <= TOL_EQ, max_deviation: dev }
}

/// `Δ = 1 - ρ₁ - ρ₂ - ρ₃ + ρ₁₂ + ρ₁₃ + ρ₂₃` as an 8×8 operator.
pub fn delta_operator(f: &ReducedFamily3) -> Result<ComplexMatrix> {
    let eq = check_q_equimarginal(f);
    if !eq.equimarginal {
        return Err(Error::QuantumNotEquimarginal(eq.max_deviation));
    }
    let mut delta = ComplexMatrix::identity(8);
    for (i, r) in f.single_qubit_states()?.iter().enumerate() {
        delta -= &embed(r.matrix(), SubsetMask::singleton(i + 1), 3)?;
    }
    for (s, r) in f.members() {
        delta += &embed(r.matrix(), s, 3)?;
    }
    Ok(delta)
}

/// Spectrum range of `Δ` and, on failure, an eigenvector outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumVerdict {
    pub passes: bool,
    pub min_eig: f64,
    pub max_eig: f64,
    pub witness: Option<StateVector>,
    /// `⟨w|Δ|w⟩` for the witness.
    pub witness_value: Option<f64>,
}

/// Whether `0 ≤ ⟨Ψ|Δ|Ψ⟩ ≤ 1` for every normalized `Ψ`, up to `TOL_PSD`.
pub fn check_bell_wigner(f: &ReducedFamily3) -> Result<QuantumVerdict> {
    let delta = delta_operator(f)?;
    let e = hermitian_eigen(&delta)?;
    let (min_eig, max_eig) = (e.min(), e.max());
    let low = min_eig < -TOL_PSD;
    let high = max_eig > 1.0 + TOL_PSD;
    let (witness, witness_value) = if low || high {
        let k = if low { 0 } else { e.values.len() - 1 };
        let w = StateVector::new(e.vector(k))?;
        let value = delta.expectation(w.amplitudes());
        (Some(w), Some(value))
    } else {
        (None, None)
    };
    Ok(QuantumVerdict { passes: !(low || high), min_eig, max_eig, witness, witness_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_complex::Complex64;

    fn mixed2() -> DensityMatrix {
        DensityMatrix::maximally_mixed(2).unwrap()
    }

    #[test]
    fn maximally_mixed_family() {
        let f = ReducedFamily3::new(mixed2(), mixed2(), mixed2()).unwrap();
        assert!(check_q_equimarginal(&f).equimarginal);
        let d = delta_operator(&f).unwrap();
        assert!(d.max_abs_diff(&ComplexMatrix::identity(8).scale(0.25)) < 1e-15);
        let v = check_bell_wigner(&f).unwrap();
        assert!(v.passes && v.witness.is_none());
        assert!((v.min_eig - 0.25).abs() < 1e-12 && (v.max_eig - 0.25).abs() < 1e-12);
    }

    #[test]
    fn non_equimarginal_pair() {
        let zero = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        let f = ReducedFamily3::new(zero, mixed2(), mixed2()).unwrap();
        let eq = check_q_equimarginal(&f);
        assert!(!eq.equimarginal);
        assert!((eq.max_deviation - 0.5).abs() < 1e-15);
        assert!(matches!(delta_operator(&f), Err(Error::QuantumNotEquimarginal(_))));
    }

    #[test]
    fn ghz_reductions_pass() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = Complex64::new(h, 0.0);
        amps[7] = Complex64::new(h, 0.0);
        let rho = DensityMatrix::from_pure(&StateVector::new(amps).unwrap()).unwrap();
        let v = check_bell_wigner(&ReducedFamily3::from_state(&rho).unwrap()).unwrap();
        assert!(v.passes);
        assert!(v.min_eig >= -1e-12 && v.max_eig <= 1.0 + 1e-12);
    }

    #[test]
    fn anticorrelated_family_fails() {
        // Each pair perfectly anticorrelated in the Z basis: diag(0, 1/2, 1/2, 0).
        let anti = || DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.5, 0.0]).unwrap()).unwrap();
        let f = ReducedFamily3::new(anti(), anti(), anti()).unwrap();
        let v = check_bell_wigner(&f).unwrap();
        assert!(!v.passes);
        assert!((v.min_eig + 0.5).abs() < 1e-12);
        let w = v.witness.unwrap();
        assert!((v.witness_value.unwrap() - v.min_eig).abs() < 1e-9);
        // |000⟩ and |111⟩ span the -1/2 eigenspace.
        let a = w.amplitudes();
        assert!((a[0].norm_sqr() + a[7].norm_sqr() - 1.0).abs() < 1e-9);
    }
}
