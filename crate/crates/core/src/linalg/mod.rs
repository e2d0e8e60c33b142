//! Dense complex linear algebra for small multi-qubit operators.
//!
//! Qubit 1 is the most significant bit of a computational-basis index, so
//! `tensor(A, B)` puts `A` on the lower-numbered qubits.

mod eigen;
mod matrix;
mod pauli;
mod state;
mod tau;

pub use eigen::{hermitian_eigen, Eigen, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{pauli_matrix, tensor, ComplexMatrix};
pub use pauli::{pauli_assemble, pauli_expand, PauliCoefficients, PauliString, MAX_PAULI_QUBITS};
pub use state::{embed, partial_trace, partial_trace_matrix, DensityMatrix, StateVector};
pub use tau::{conjugate_by_tau, universal_not};

#[cfg(test)]
pub(crate) use matrix::ONE;

/// Largest entry of `|M - M†|` accepted as Hermitian.
pub const TOL_HERM: f64 = 1e-12;
/// Tolerance on the trace of a density matrix.
pub const TOL_TRACE: f64 = 1e-12;
/// Most negative eigenvalue accepted as positive semidefinite.
pub const TOL_PSD: f64 = 1e-9;
/// Bound on `‖M - VΛV†‖_max` after an eigendecomposition.
pub const EIGEN_RESIDUAL: f64 = 1e-10;
/// Largest matrix dimension handled (12 qubits).
pub const MAX_DIM: usize = 1 << 12;

use crate::SubsetMask;

/// Index-space bit mask of the qubits in `a` for a `k`-qubit register.
pub(crate) fn index_mask(a: SubsetMask, k: usize) -> u32 {
    a.indices().fold(0, |m, i| m | 1 << (k - i))
}
