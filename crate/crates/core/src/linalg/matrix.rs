use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub, SubAssign};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::MAX_DIM;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major, with power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        debug_assert!(dim.is_power_of_two());
        ComplexMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// From a row-major buffer of `dim * dim` entries.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::input(format!("matrix dimension {dim} is not a power of two")));
        }
        if dim > MAX_DIM {
            return Err(Error::Resource(format!("matrix dimension {dim} exceeds {MAX_DIM}")));
        }
        if data.len() != dim * dim {
            return Err(Error::input(format!("{dim}x{dim} matrix needs {} entries, got {}", dim * dim, data.len())));
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::input(format!("matrix is not square: row of length {} in {dim} rows", r.len())));
        }
        ComplexMatrix::from_vec(dim, rows.concat())
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut data = vec![ZERO; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            data[i * dim + i] = Complex64::new(*d, 0.0);
        }
        ComplexMatrix::from_vec(dim, data)
    }

    pub(crate) fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &[Complex64]) -> Self {
        ComplexMatrix::from_fn(psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `log2(dim)`.
    pub fn qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim).map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `Re ⟨ψ|M|ψ⟩`.
    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let mpsi = self.apply(psi);
        psi.iter().zip(&mpsi).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `M - M†`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim;
        let mut e: f64 = 0.0;
        for r in 0..d {
            for c in r..d {
                e = e.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        e
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v.norm_sqr()).sum::<f64>())
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix::from_fn(self.dim, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a += b);
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a -= b);
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a.dim.checked_mul(b.dim).filter(|d| *d <= MAX_DIM);
    let Some(dim) = dim else {
        return Err(Error::Resource(format!(
            "tensor product of {}x{} and {}x{} exceeds dimension {MAX_DIM}",
            a.dim, a.dim, b.dim, b.dim
        )));
    };
    let mut out = ComplexMatrix::zeros(dim);
    for ar in 0..a.dim {
        for ac in 0..a.dim {
            let av = a[(ar, ac)];
            if av == ZERO {
                continue;
            }
            for br in 0..b.dim {
                for bc in 0..b.dim {
                    out[(ar * b.dim + br, ac * b.dim + bc)] = av * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

/// Single-qubit Pauli matrices `[I, X, Y, Z]`.
pub fn pauli_matrix(op: u8) -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let rows: [[Complex64; 2]; 2] = match op {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -i], [i, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index {op} out of range"),
    };
    ComplexMatrix { dim: 2, data: rows.concat() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn z_tensor_z_is_diagonal() {
        let z = pauli_matrix(3);
        let zz = tensor(&z, &z).unwrap();
        assert_eq!(zz, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]).unwrap());
    }

    #[test]
    fn tensor_trace_is_multiplicative() {
        let a = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.3, 0.0), Complex64::new(0.1, 0.2)],
            vec![Complex64::new(0.1, -0.2), Complex64::new(0.7, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_real_diagonal(&[0.25, 0.25, 0.4, 0.1]).unwrap();
        let t = tensor(&a, &b).unwrap();
        assert!((t.trace() - a.trace() * b.trace()).norm() < 1e-15);
    }

    #[test]
    fn tensor_dimension_cap() {
        let big = ComplexMatrix::identity(128);
        assert!(matches!(tensor(&big, &big), Err(Error::Resource(_))));
    }

    #[test]
    fn shape_validation() {
        assert!(ComplexMatrix::from_vec(3, vec![ZERO; 9]).is_err());
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ZERO], vec![ONE]]).is_err());
    }

    #[test]
    fn pauli_algebra() {
        // XY = iZ
        let xy = pauli_matrix(1).matmul(&pauli_matrix(2));
        let iz = ComplexMatrix::from_fn(2, |r, c| pauli_matrix(3)[(r, c)] * Complex64::new(0.0, 1.0));
        assert!(xy.max_abs_diff(&iz) < 1e-15);
    }
}
