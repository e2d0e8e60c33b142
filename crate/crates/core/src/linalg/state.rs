use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::subset::{deposit_bits, extract_bits};
use crate::SubsetMask;

use super::eigen::{hermitian_eigen, Eigen};
use super::matrix::{ComplexMatrix, ONE, ZERO};
use super::{index_mask, MAX_DIM, TOL_HERM, TOL_PSD, TOL_TRACE};

/// Amplitudes of a pure state on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes without normalizing them.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let d = amplitudes.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(Error::input(format!("state vector length {d} is not a power of two")));
        }
        if d > MAX_DIM {
            return Err(Error::Resource(format!("state vector length {d} exceeds {MAX_DIM}")));
        }
        Ok(StateVector { qubits: d.trailing_zeros() as usize, amplitudes })
    }

    /// Wraps and normalizes; the zero vector is rejected.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = StateVector::new(amplitudes)?;
        s.normalize()?;
        Ok(s)
    }

    /// `|index⟩` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let d = 1usize.checked_shl(qubits as u32).filter(|d| *d <= MAX_DIM);
        let Some(d) = d else {
            return Err(Error::Resource(format!("{qubits} qubits exceed the dimension cap")));
        };
        if index >= d {
            return Err(Error::input(format!("basis index {index} out of range for {qubits} qubits")));
        }
        let mut amplitudes = vec![ZERO; d];
        amplitudes[index] = ONE;
        Ok(StateVector { qubits, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    pub fn is_normalized(&self) -> bool {
        (self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() <= 1e-12
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::input("cannot normalize a zero or non-finite vector"));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(())
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_error();
        if herm > TOL_HERM {
            return Err(Error::input(format!("density matrix is not Hermitian (max |M - M†| = {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::input(format!("density matrix trace is {} + {}i, expected 1", tr.re, tr.im)));
        }
        let min = hermitian_eigen(&matrix)?.min();
        if min < -TOL_PSD {
            return Err(Error::input(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    pub(crate) fn unchecked(matrix: ComplexMatrix) -> Self {
        DensityMatrix { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        if !psi.is_normalized() {
            return Err(Error::input("pure state is not normalized"));
        }
        Ok(DensityMatrix { matrix: psi.projector() })
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        let d = 1usize.checked_shl(qubits as u32).filter(|d| *d <= MAX_DIM && qubits > 0);
        let Some(d) = d else {
            return Err(Error::input(format!("unsupported qubit count {qubits}")));
        };
        Ok(DensityMatrix { matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64) })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.matrix.qubits()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so tr(ρ²) = Σ |ρ_rc|².
        self.matrix.data().iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn eigen(&self) -> Result<Eigen> {
        hermitian_eigen(&self.matrix)
    }
}

fn check_subset(a: SubsetMask, k: usize, what: &str) -> Result<()> {
    if a.is_empty() {
        return Err(Error::input(format!("{what} must be nonempty")));
    }
    if !a.is_subset_of(SubsetMask::full(k)) {
        return Err(Error::input(format!("{what} {a} is not a subset of qubits 1..{k}")));
    }
    Ok(())
}

/// Traces out every qubit not in `keep`. The kept qubits stay in ascending
/// order, the first one most significant.
pub fn partial_trace_matrix(m: &ComplexMatrix, keep: SubsetMask) -> Result<ComplexMatrix> {
    let k = m.qubits();
    check_subset(keep, k, "kept subsystem")?;
    let kmask = index_mask(keep, k);
    let tmask = ((1u32 << k) - 1) & !kmask;
    let dk = 1usize << keep.len();
    let dt = 1usize << (k - keep.len());
    let mut out = ComplexMatrix::zeros(dk);
    for r in 0..dk {
        let rb = deposit_bits(r, kmask);
        for c in 0..dk {
            let cb = deposit_bits(c, kmask);
            let mut s = ZERO;
            for t in 0..dt {
                let tb = deposit_bits(t, tmask);
                s += m[((rb | tb) as usize, (cb | tb) as usize)];
            }
            out[(r, c)] = s;
        }
    }
    Ok(out)
}

/// Reduced state on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: SubsetMask) -> Result<DensityMatrix> {
    partial_trace_matrix(&rho.matrix, keep).map(DensityMatrix::unchecked)
}

/// The `2^n`-dimensional operator acting as `op` on the qubits in
/// `positions` (in ascending order) and as the identity elsewhere.
pub fn embed(op: &ComplexMatrix, positions: SubsetMask, n: usize) -> Result<ComplexMatrix> {
    if n == 0 || (1usize << n.min(31)) > MAX_DIM {
        return Err(Error::Resource(format!("{n} qubits exceed the dimension cap")));
    }
    check_subset(positions, n, "embedding positions")?;
    if positions.len() != op.qubits() {
        return Err(Error::input(format!(
            "operator on {} qubits cannot be placed on positions {positions}",
            op.qubits()
        )));
    }
    let pmask = index_mask(positions, n);
    let rest = ((1u32 << n) - 1) & !pmask;
    let d = 1usize << n;
    let mut out = ComplexMatrix::zeros(d);
    for r in 0..d {
        let ri = extract_bits(r as u32, pmask);
        for c in 0..d {
            if (r as u32 ^ c as u32) & rest == 0 {
                out[(r, c)] = op[(ri, extract_bits(c as u32, pmask))];
            }
        }
    }
    Ok(out)
}
