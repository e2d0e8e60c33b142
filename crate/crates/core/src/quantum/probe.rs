use alloc::boxed::Box;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, partial_trace_matrix, pauli_assemble, pauli_expand, ComplexMatrix, DensityMatrix,
    PauliCoefficients, PauliString,
};

use super::{check_bell_wigner, ReducedFamily3, DEFAULT_PROBE_ITERATIONS, TOL_PROBE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Perturbs the starting three-body coefficients; `None` starts from zero.
    pub seed: Option<u64>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { max_iter: DEFAULT_PROBE_ITERATIONS, tol: TOL_PROBE, seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeStatus {
    Reconstructed,
    Undetermined,
}

impl ProbeStatus {
    pub fn name(self) -> &'static str {
        match self {
            ProbeStatus::Reconstructed => "reconstructed",
            ProbeStatus::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub status: ProbeStatus,
    pub iterations: usize,
    /// Larger of the PSD violation of the affine iterate and the reduction
    /// mismatch of the candidate.
    pub residual: f64,
    /// Present when `status` is `Reconstructed`.
    pub candidate: Option<DensityMatrix>,
}

/// Target coefficients of every Pauli string of weight at most two, read
/// from the reductions (shared one-body terms are averaged).
fn target_coefficients(f: &ReducedFamily3) -> Result<PauliCoefficients> {
    let mut sum = PauliCoefficients::zeros(3)?;
    let mut count = [0u32; 64];
    for (s, r) in f.members() {
        let p = pauli_expand(r.matrix())?;
        for (reduced, c) in p.iter() {
            let full = reduced.lift(s, 3)?;
            sum.set(full, sum.get(full) + c / 2.0);
            count[full.index()] += 1;
        }
    }
    for (idx, k) in count.iter().enumerate() {
        let s = PauliString::from_index(3, idx);
        if *k > 0 {
            sum.set(s, sum.get(s) / *k as f64);
        }
    }
    sum.set(PauliString::identity(3), 0.125);
    Ok(sum)
}

/// Projection onto the Hermitian matrices whose two-qubit reductions match
/// the targets: keep the 27 weight-three coefficients, overwrite the rest.
fn project_affine(m: &ComplexMatrix, targets: &PauliCoefficients) -> Result<ComplexMatrix> {
    let mut p = pauli_expand(&m.hermitian_part())?;
    for (s, c) in targets.iter() {
        if s.weight() < 3 {
            p.set(s, c);
        }
    }
    Ok(pauli_assemble(&p))
}

/// Eigenvalue clipping.
fn project_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut e = hermitian_eigen(&m.hermitian_part())?;
    e.values.iter_mut().for_each(|v| *v = v.max(0.0));
    Ok(e.reconstruct())
}

fn reduction_mismatch(m: &ComplexMatrix, f: &ReducedFamily3) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (s, r) in f.members() {
        worst = worst.max(partial_trace_matrix(m, s)?.max_abs_diff(r.matrix()));
    }
    Ok(worst)
}

/// One-sided numerical search for a three-qubit state with the given
/// two-qubit reductions: Dykstra alternating projections between the affine
/// reduction constraints and the PSD cone.
///
/// Families failing the Bell-Wigner check are refused. Non-convergence
/// yields `Undetermined`, never a verdict of incompatibility.
pub fn probe_sufficiency(f: &ReducedFamily3, opts: &ProbeOptions) -> Result<ProbeReport> {
    let verdict = check_bell_wigner(f)?;
    if !verdict.passes {
        return Err(Error::HypothesisRefused(Box::new(verdict)));
    }
    let targets = target_coefficients(f)?;
    let mut start = targets.clone();
    if let Some(seed) = opts.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for idx in 0..64 {
            let s = PauliString::from_index(3, idx);
            if s.weight() == 3 {
                let g: f64 = StandardNormal.sample(&mut rng);
                start.set(s, 0.01 * g);
            }
        }
    }

    let zero = ComplexMatrix::zeros(8);
    let mut x = pauli_assemble(&start);
    let (mut p, mut q) = (zero.clone(), zero);
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let y = project_affine(&(&x + &p), &targets)?;
        p = &(&x + &p) - &y;
        let violation = (-hermitian_eigen(&y)?.min()).max(0.0);
        let next = project_psd(&(&y + &q))?;
        q = &(&y + &q) - &next;
        x = next;

        let tr = x.trace().re;
        if tr <= 0.0 {
            continue;
        }
        let candidate = x.scale(1.0 / tr);
        residual = violation.max(reduction_mismatch(&candidate, f)?);
        if residual < opts.tol {
            return Ok(ProbeReport {
                status: ProbeStatus::Reconstructed,
                iterations: iter,
                residual,
                candidate: Some(DensityMatrix::unchecked(candidate)),
            });
        }
    }
    Ok(ProbeReport { status: ProbeStatus::Undetermined, iterations: opts.max_iter, residual, candidate: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, TOL_PSD};
    use crate::quantum::sample_density;

    #[test]
    fn maximally_mixed_in_one_step() {
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        let f = ReducedFamily3::new(m.clone(), m.clone(), m).unwrap();
        let r = probe_sufficiency(&f, &ProbeOptions::default()).unwrap();
        assert_eq!(r.status, ProbeStatus::Reconstructed);
        assert!(r.iterations <= 2);
        let c = r.candidate.unwrap();
        assert!(c.matrix().max_abs_diff(&ComplexMatrix::identity(8).scale(0.125)) < 1e-12);
    }

    #[test]
    fn reductions_of_random_state() {
        let rho = sample_density(3, 8, 42).unwrap();
        let f = ReducedFamily3::from_state(&rho).unwrap();
        let r = probe_sufficiency(&f, &ProbeOptions::default()).unwrap();
        assert_eq!(r.status, ProbeStatus::Reconstructed, "residual {}", r.residual);
        let c = r.candidate.unwrap();
        assert!(reduction_mismatch(c.matrix(), &f).unwrap() < 1e-7);
        assert!(c.eigen().unwrap().min() >= -TOL_PSD);
    }

    #[test]
    fn refuses_failing_family() {
        let anti = || DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.5, 0.0]).unwrap()).unwrap();
        let f = ReducedFamily3::new(anti(), anti(), anti()).unwrap();
        assert!(matches!(probe_sufficiency(&f, &ProbeOptions::default()), Err(Error::HypothesisRefused(_))));
    }
}
