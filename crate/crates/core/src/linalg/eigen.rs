use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;
use super::TOL_HERM;

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius mass at which iteration stops, relative to
/// `max(1, ‖M‖_F)`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.values.len();
        let mut out = ComplexMatrix::zeros(d);
        for (k, lam) in self.values.iter().enumerate() {
            for r in 0..d {
                let vr = self.vectors[(r, k)] * *lam;
                for c in 0..d {
                    out[(r, c)] += vr * self.vectors[(c, k)].conj();
                }
            }
        }
        out
    }
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    libm::sqrt(s)
}

/// Cyclic complex Jacobi eigendecomposition of a Hermitian matrix.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary
/// and then applies the real symmetric Jacobi rotation to the `(p, q)` plane.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<Eigen> {
    let herm = m.hermiticity_error();
    if herm > TOL_HERM {
        return Err(Error::input(format!("matrix is not Hermitian (max |M - M†| = {herm:e})")));
    }
    let d = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    while off_diagonal_mass(&a) >= threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps (off-diagonal mass {:e})",
                off_diagonal_mass(&a)
            )));
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors, sweeps })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() { 0.0 } else { theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0)) };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    // J acts on the (p, q) plane: J = diag(1, conj(phase)) · [[c, s], [-s, c]].
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let d = a.dim();
    // A ← A J
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J† A
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    // V ← V J
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_matrix, ONE};
    use alloc::vec;

    fn check_decomposition(m: &ComplexMatrix) -> Eigen {
        let e = hermitian_eigen(m).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.reconstruct().max_abs_diff(m) < 1e-10);
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(m.dim())) < 1e-10);
        assert!((e.values.iter().sum::<f64>() - m.trace().re).abs() < 1e-10);
        e
    }

    #[test]
    fn diagonal_input() {
        let e = check_decomposition(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap());
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn pauli_x() {
        let e = check_decomposition(&pauli_matrix(1));
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        // (|0⟩ - |1⟩)/√2 up to phase.
        let v0 = e.vector(0);
        assert!(((v0[0] + v0[1]).norm()) < 1e-12);
        assert!((v0[0].norm() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian() {
        let i = Complex64::new(0.0, 1.0);
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(2.0, 0.0), i * 0.5 + 0.3, Complex64::new(0.0, -0.1), Complex64::new(0.2, 0.0)],
            vec![-i * 0.5 + 0.3, Complex64::new(-1.0, 0.0), Complex64::new(0.4, 0.4), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.1), Complex64::new(0.4, -0.4), Complex64::new(0.5, 0.0), i],
            vec![Complex64::new(0.2, 0.0), Complex64::new(0.0, 0.0), -i, Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        check_decomposition(&m);
    }

    #[test]
    fn degenerate_spectrum() {
        check_decomposition(&ComplexMatrix::identity(8).scale(0.125));
        let y = pauli_matrix(2);
        check_decomposition(&crate::linalg::tensor(&y, &y).unwrap());
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![Complex64::new(0.0, 0.0), ONE]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::InvalidInput(_))));
    }
}
