use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    embed, hermitian_eigen, partial_trace, partial_trace_matrix, tensor, ComplexMatrix, DensityMatrix, StateVector,
    MAX_DIM,
};
use crate::SubsetMask;

use super::TOL_EQ;

/// Positions of the members of `inner` within the ordered members of `outer`.
fn relative(inner: SubsetMask, outer: SubsetMask) -> SubsetMask {
    outer
        .indices()
        .enumerate()
        .filter(|(_, i)| inner.contains(*i))
        .fold(SubsetMask::EMPTY, |m, (k, _)| m.union(SubsetMask::singleton(k + 1)))
}

/// Largest entrywise disagreement between the reductions of any two stored
/// states to their common qubits.
pub fn check_family_equimarginal(family: &BTreeMap<SubsetMask, DensityMatrix>) -> Result<f64> {
    let entries: Vec<_> = family.iter().collect();
    let mut dev: f64 = 0.0;
    for (k, (a, ra)) in entries.iter().enumerate() {
        for (b, rb) in &entries[k + 1..] {
            let common = a.intersection(**b);
            if common.is_empty() {
                continue;
            }
            let pa = partial_trace(ra, relative(common, **a))?;
            let pb = partial_trace(rb, relative(common, **b))?;
            dev = dev.max(pa.matrix().max_abs_diff(pb.matrix()));
        }
    }
    Ok(dev)
}

/// The operator `Δ_A` and its eigenvalue range.
#[derive(Debug, Clone)]
pub struct GenDelta {
    pub operator: ComplexMatrix,
    pub min_eig: f64,
    pub max_eig: f64,
}

/// `Δ_A = Σ_{B ⊂ N, A ∪ B = N} (-1)^{|A ∩ B|} ρ_B` for odd `|A|`, each
/// `ρ_B` embedded into the `n`-qubit register (`ρ_∅ = 1`).
///
/// A state missing from `family` is obtained by partial trace of a stored
/// superset. No verdict is attached: for `n > 3` the range `[0, 1]` is not
/// a necessary condition for compatibility.
pub fn gen_delta(family: &BTreeMap<SubsetMask, DensityMatrix>, a: SubsetMask, n: usize) -> Result<GenDelta> {
    if n == 0 || (1usize << n.min(31)) > MAX_DIM {
        return Err(Error::Resource(format!("{n} qubits exceed the dimension cap")));
    }
    let full = SubsetMask::full(n);
    if a.is_empty() || !a.is_subset_of(full) || a.len().is_multiple_of(2) {
        return Err(Error::input(format!("A = {a} must be a subset of 1..{n} with an odd number of elements")));
    }
    for (s, r) in family {
        if s.is_empty() || !s.is_strict_subset_of(full) || s.len() != r.qubits() {
            return Err(Error::input(format!("family entry {s} does not fit a proper subset of {n} qubits")));
        }
    }
    let dev = check_family_equimarginal(family)?;
    if dev > TOL_EQ {
        return Err(Error::QuantumNotEquimarginal(dev));
    }

    let complement = a.complement(n);
    let mut delta = ComplexMatrix::zeros(1 << n);
    for b in SubsetMask::all(n) {
        if b == full || !complement.is_subset_of(b) {
            continue;
        }
        let term = if b.is_empty() {
            ComplexMatrix::identity(1 << n)
        } else {
            let rho = match family.get(&b) {
                Some(r) => r.matrix().clone(),
                None => {
                    let (sup, r) = family
                        .iter()
                        .find(|(s, _)| b.is_subset_of(**s))
                        .ok_or_else(|| Error::input(format!("no state given for {b} or any superset")))?;
                    partial_trace_matrix(r.matrix(), relative(b, *sup))?
                }
            };
            embed(&rho, b, n)?
        };
        if a.intersection(b).len().is_multiple_of(2) {
            delta += &term;
        } else {
            delta -= &term;
        }
    }
    let e = hermitian_eigen(&delta)?;
    Ok(GenDelta { min_eig: e.min(), max_eig: e.max(), operator: delta })
}

/// The four-qubit state `(|0000⟩ + |1100⟩)/√2` whose `Δ₁` has a negative
/// eigenvalue.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub state: StateVector,
    pub delta1: ComplexMatrix,
    pub min_eig: f64,
    pub eigenvector: StateVector,
    /// `|⟨v|(|0011⟩ + |1111⟩)/√2⟩|²` for the computed eigenvector `v`.
    pub overlap: f64,
    /// `‖Δ₁ - [½(1⊗1 - 2P₊)⊗P₁⊗P₁ + P₊⊗P₀⊗P₀]‖_max`.
    pub closed_form_residual: f64,
}

/// `Δ₁ = ρ₁ - ρ₁₂ - ρ₁₃ - ρ₁₄ + ρ₁₂₃ + ρ₁₂₄ + ρ₁₃₄`, i.e. [`gen_delta`] with
/// `A = {2, 3, 4}`, for `(|0000⟩ + |1100⟩)/√2`.
pub fn counterexample_n4() -> Result<Counterexample> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let mut amps = vec![zero; 16];
    amps[0b0000] = Complex64::new(h, 0.0);
    amps[0b1100] = Complex64::new(h, 0.0);
    let state = StateVector::new(amps)?;
    let rho = DensityMatrix::from_pure(&state)?;

    let mut family = BTreeMap::new();
    for b in SubsetMask::all(4).filter(|b| b.len() == 3) {
        family.insert(b, partial_trace(&rho, b)?);
    }
    let a = SubsetMask::from_indices(&[2, 3, 4])?;
    let d = gen_delta(&family, a, 4)?;
    let e = hermitian_eigen(&d.operator)?;
    let eigenvector = StateVector::new(e.vector(0))?;

    let mut target = vec![zero; 16];
    target[0b0011] = Complex64::new(h, 0.0);
    target[0b1111] = Complex64::new(h, 0.0);
    let overlap = eigenvector.inner(&StateVector::new(target)?).norm_sqr();

    let p_plus = StateVector::new(vec![Complex64::new(h, 0.0), zero, zero, Complex64::new(h, 0.0)])?.projector();
    let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0])?;
    let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0])?;
    let left = (&ComplexMatrix::identity(4) - &p_plus.scale(2.0)).scale(0.5);
    let closed = &tensor(&tensor(&left, &p1)?, &p1)? + &tensor(&tensor(&p_plus, &p0)?, &p0)?;
    let closed_form_residual = d.operator.max_abs_diff(&closed);

    Ok(Counterexample { state, delta1: d.operator, min_eig: e.min(), eigenvector, overlap, closed_form_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{delta_operator, ReducedFamily3};

    #[test]
    fn relative_positions() {
        let outer = SubsetMask::from_indices(&[2, 4, 5]).unwrap();
        let inner = SubsetMask::from_indices(&[2, 5]).unwrap();
        assert_eq!(relative(inner, outer), SubsetMask::from_indices(&[1, 3]).unwrap());
    }

    #[test]
    fn counterexample_values() {
        let c = counterexample_n4().unwrap();
        assert!((c.min_eig + 0.5).abs() < 1e-9);
        assert!(c.overlap >= 1.0 - 1e-9);
        assert!(c.closed_form_residual < 1e-12);
    }

    #[test]
    fn n3_full_subset_matches_delta_operator() {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[1] = Complex64::new(h, 0.0);
        amps[6] = Complex64::new(0.0, h);
        let rho = DensityMatrix::from_pure(&StateVector::new(amps).unwrap()).unwrap();
        let f = ReducedFamily3::from_state(&rho).unwrap();
        let family: BTreeMap<_, _> = f.members().into_iter().map(|(s, r)| (s, r.clone())).collect();
        let g = gen_delta(&family, SubsetMask::full(3), 3).unwrap();
        assert!(g.operator.max_abs_diff(&delta_operator(&f).unwrap()) < 1e-15);
    }

    #[test]
    fn argument_validation() {
        let family = BTreeMap::new();
        assert!(gen_delta(&family, SubsetMask::from_indices(&[1, 2]).unwrap(), 3).is_err());
        // Missing ρ_B for B ⊇ {2, 3}.
        assert!(matches!(gen_delta(&family, SubsetMask::singleton(1), 3), Err(Error::InvalidInput(_))));
    }
}
