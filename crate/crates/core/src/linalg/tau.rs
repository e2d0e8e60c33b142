use alloc::vec;

use crate::error::{Error, Result};

use super::matrix::{ComplexMatrix, ZERO};
use super::pauli::{pauli_assemble, pauli_expand};
use super::state::{DensityMatrix, StateVector};

/// The three-qubit universal NOT:
/// `τ Σ c_{αβγ} |αβγ⟩ = Σ (-1)^{α+β+γ} c*_{αβγ} |ᾱβ̄γ̄⟩`.
///
/// Antiunitary, squares to `-1`, and maps every state to an orthogonal one.
pub fn universal_not(psi: &StateVector) -> Result<StateVector> {
    if psi.qubits() != 3 {
        return Err(Error::input("the universal NOT is defined on three qubits"));
    }
    let mut out = vec![ZERO; 8];
    for (i, c) in psi.amplitudes().iter().enumerate() {
        let sign = if i.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[i ^ 0b111] = c.conj() * sign;
    }
    StateVector::new(out)
}

/// `τ⁻¹ ρ τ`: every Pauli coefficient of odd weight changes sign.
pub fn conjugate_by_tau(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.qubits() != 3 {
        return Err(Error::input("conjugation by the universal NOT needs a three-qubit state"));
    }
    let p = pauli_expand(rho.matrix())?;
    let mut flipped = p.clone();
    for (s, c) in p.iter() {
        if s.weight() % 2 == 1 {
            flipped.set(s, -c);
        }
    }
    Ok(pauli_assemble(&flipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PauliCoefficients, PauliString};
    use num_complex::Complex64;

    fn amp(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_state() -> StateVector {
        let amps = vec![
            amp(0.1, 0.3),
            amp(-0.2, 0.1),
            amp(0.4, 0.0),
            amp(0.0, -0.25),
            amp(0.15, 0.2),
            amp(-0.3, -0.1),
            amp(0.05, 0.35),
            amp(0.2, -0.2),
        ];
        StateVector::normalized(amps).unwrap()
    }

    #[test]
    fn basis_images() {
        let t0 = universal_not(&StateVector::basis(3, 0).unwrap()).unwrap();
        assert_eq!(t0, StateVector::basis(3, 7).unwrap());
        let t7 = universal_not(&StateVector::basis(3, 7).unwrap()).unwrap();
        assert_eq!(t7.amplitudes()[0], amp(-1.0, 0.0));
    }

    #[test]
    fn squares_to_minus_one_and_orthogonal() {
        let psi = sample_state();
        let t = universal_not(&psi).unwrap();
        let tt = universal_not(&t).unwrap();
        for (a, b) in tt.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a + b).norm() < 1e-15);
        }
        assert!(t.inner(&psi).norm() < 1e-15);
    }

    #[test]
    fn wrong_size_rejected() {
        assert!(universal_not(&StateVector::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn conjugation_matches_pure_state_action() {
        // For a pure state τ⁻¹|ψ⟩⟨ψ|τ = |τψ⟩⟨τψ|.
        let psi = sample_state();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let t = universal_not(&psi).unwrap();
        assert!(conjugate_by_tau(&rho).unwrap().max_abs_diff(&t.projector()) < 1e-14);
    }

    #[test]
    fn single_term_sign_flip() {
        let mut p = PauliCoefficients::zeros(3).unwrap();
        p.set(PauliString::identity(3), 0.125);
        let z1 = PauliString::new(&[3, 0, 0]).unwrap();
        p.set(z1, 0.05);
        let rho = DensityMatrix::new(pauli_assemble(&p)).unwrap();
        let mut q = p.clone();
        q.set(z1, -0.05);
        assert!(conjugate_by_tau(&rho).unwrap().max_abs_diff(&pauli_assemble(&q)) < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(conjugate_by_tau(&mixed).unwrap().max_abs_diff(mixed.matrix()) < 1e-15);
    }
}
