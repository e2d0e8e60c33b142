use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{tensor, ComplexMatrix, DensityMatrix, StateVector};

/// Largest register for which random states are drawn.
pub const MAX_SAMPLE_QUBITS: usize = 8;

fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn check_qubits(n: usize) -> Result<usize> {
    if n == 0 || n > MAX_SAMPLE_QUBITS {
        return Err(Error::input(format!("qubit count must be in 1..={MAX_SAMPLE_QUBITS}, got {n}")));
    }
    Ok(1 << n)
}

/// Normalized vector of `len` independent complex Gaussians.
pub fn sample_gaussian_amplitudes(len: usize, seed: u64) -> Result<Vec<Complex64>> {
    if len == 0 {
        return Err(Error::input("cannot sample an empty vector"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..len).map(|_| gaussian(&mut rng)).collect();
    let norm = libm::sqrt(v.iter().map(|a| a.norm_sqr()).sum::<f64>());
    v.iter_mut().for_each(|a| *a /= norm);
    Ok(v)
}

/// Haar-random pure state on `n` qubits.
pub fn sample_pure_state(n: usize, seed: u64) -> Result<StateVector> {
    let d = check_qubits(n)?;
    StateVector::new(sample_gaussian_amplitudes(d, seed)?)
}

/// `GG† / tr(GG†)` for a `2^n × rank` matrix `G` of standard complex
/// Gaussians drawn from ChaCha8 seeded with `seed`.
pub fn sample_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = check_qubits(n)?;
    if rank == 0 || rank > d {
        return Err(Error::input(format!("rank must be in 1..={d}, got {rank}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<Complex64> = (0..d * rank).map(|_| gaussian(&mut rng)).collect();
    let mut m = ComplexMatrix::zeros(d);
    for r in 0..d {
        for c in r..d {
            let v: Complex64 = (0..rank).map(|k| g[r * rank + k] * g[c * rank + k].conj()).sum();
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
    }
    let tr = m.trace().re;
    Ok(DensityMatrix::unchecked(m.scale(1.0 / tr)))
}

/// Uniform mixture of `terms` random pure product states on `n` qubits.
pub fn sample_product_mixture(n: usize, terms: usize, seed: u64) -> Result<DensityMatrix> {
    let d = check_qubits(n)?;
    if terms == 0 {
        return Err(Error::input("a mixture needs at least one term"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = ComplexMatrix::zeros(d);
    for _ in 0..terms {
        let mut prod: Option<ComplexMatrix> = None;
        for _ in 0..n {
            let mut q = [gaussian(&mut rng), gaussian(&mut rng)];
            let norm = libm::sqrt(q[0].norm_sqr() + q[1].norm_sqr());
            q.iter_mut().for_each(|a| *a /= norm);
            let p = ComplexMatrix::outer(&q);
            prod = Some(match prod {
                None => p,
                Some(acc) => tensor(&acc, &p)?,
            });
        }
        m += &prod.expect("n >= 1");
    }
    Ok(DensityMatrix::unchecked(m.scale(1.0 / terms as f64)))
}
