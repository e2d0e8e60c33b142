//! Property tests for the linear-algebra kernel and the three-qubit
//! operator identities.

use std::collections::BTreeMap;

use compat_core::linalg::{
    conjugate_by_tau, embed, hermitian_eigen, partial_trace, partial_trace_matrix, pauli_assemble, pauli_expand,
    tensor, universal_not, ComplexMatrix, DensityMatrix, PauliString, StateVector,
};
use compat_core::quantum::{
    check_bell_wigner, delta_operator, gen_delta, sample_density, sample_product_mixture, sample_pure_state,
    ReducedFamily3,
};
use compat_core::SubsetMask;
use num_complex::Complex64;
use proptest::prelude::*;

fn set(ix: &[usize]) -> SubsetMask {
    SubsetMask::from_indices(ix).unwrap()
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    let d = 1usize << n;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
        let raw: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexMatrix::from_vec(d, raw).unwrap().hermitian_part()
    })
}

fn any_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=4).prop_flat_map(hermitian)
}

/// Tensor-product oracle for a Pauli string, independent of the
/// mask-and-phase formula used by the expansion.
fn string_by_tensor(s: PauliString) -> ComplexMatrix {
    let mut m = compat_core::linalg::pauli_matrix(s.op(1));
    for i in 2..=s.n() {
        m = tensor(&m, &compat_core::linalg::pauli_matrix(s.op(i))).unwrap();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_round_trip(m in any_hermitian()) {
        let p = pauli_expand(&m).unwrap();
        prop_assert!(pauli_assemble(&p).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn pauli_coefficient_is_normalized_trace(m in hermitian(2), idx in 0usize..16) {
        let s = PauliString::from_index(2, idx);
        let direct = m.matmul(&string_by_tensor(s)).trace();
        prop_assert!((pauli_expand(&m).unwrap().get(s) - direct.re / 4.0).abs() < 1e-12);
        prop_assert!(direct.im.abs() < 1e-12);
    }

    #[test]
    fn eigen_decomposition(m in any_hermitian()) {
        let e = hermitian_eigen(&m).unwrap();
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-10);
        let gram = e.vectors.adjoint().matmul(&e.vectors);
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(m.dim())) < 1e-10);
        prop_assert!((e.values.iter().sum::<f64>() - m.trace().re).abs() < 1e-10);
    }

    #[test]
    fn embed_then_trace(seed in any::<u64>(), which in 0usize..7) {
        let subsets = [set(&[1]), set(&[2]), set(&[3]), set(&[1, 2]), set(&[1, 3]), set(&[2, 3]), set(&[2, 4])];
        let a = subsets[which];
        let rho = sample_density(a.len(), 1 << a.len(), seed).unwrap();
        let n = 4;
        let e = embed(rho.matrix(), a, n).unwrap();
        prop_assert!((e.trace().re - (1u32 << (n - a.len())) as f64).abs() < 1e-12);
        let back = partial_trace_matrix(&e, a).unwrap().scale(1.0 / (1u32 << (n - a.len())) as f64);
        prop_assert!(back.max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn reduction_doubles_coefficients(seed in any::<u64>(), rank in 1usize..=8) {
        let rho = sample_density(3, rank, seed).unwrap();
        let full = pauli_expand(rho.matrix()).unwrap();
        for keep in [set(&[1, 2]), set(&[1, 3]), set(&[2, 3])] {
            let reduced = pauli_expand(partial_trace(&rho, keep).unwrap().matrix()).unwrap();
            for (s, c) in reduced.iter() {
                let lifted = s.lift(keep, 3).unwrap();
                prop_assert!((c - 2.0 * full.get(lifted)).abs() < 1e-12, "{} on {}", s, keep);
            }
        }
    }

    #[test]
    fn tau_is_antiunitary(s1 in any::<u64>(), s2 in any::<u64>()) {
        let phi = sample_pure_state(3, s1).unwrap();
        let psi = sample_pure_state(3, s2).unwrap();
        let tphi = universal_not(&phi).unwrap();
        let tpsi = universal_not(&psi).unwrap();
        prop_assert!((tphi.inner(&tpsi) - phi.inner(&psi).conj()).norm() < 1e-12);
        prop_assert!(tpsi.inner(&psi).norm() < 1e-12);
        let tt = universal_not(&tpsi).unwrap();
        for (a, b) in tt.amplitudes().iter().zip(psi.amplitudes()) {
            prop_assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_equals_rho_plus_tau_conjugate(seed in any::<u64>(), rank in 1usize..=8, psi_seed in any::<u64>()) {
        let rho = sample_density(3, rank, seed).unwrap();
        let f = ReducedFamily3::from_state(&rho).unwrap();
        let delta = delta_operator(&f).unwrap();
        let rhs = rho.matrix() + &conjugate_by_tau(&rho).unwrap();
        prop_assert!(delta.max_abs_diff(&rhs) < 1e-10);

        let psi = sample_pure_state(3, psi_seed).unwrap();
        let tpsi = universal_not(&psi).unwrap();
        let lhs = delta.expectation(psi.amplitudes());
        let split = rho.matrix().expectation(psi.amplitudes()) + rho.matrix().expectation(tpsi.amplitudes());
        prop_assert!((lhs - split).abs() < 1e-10);
    }

    #[test]
    fn reductions_pass_bell_wigner(seed in any::<u64>(), rank in 1usize..=8) {
        let rho = sample_density(3, rank, seed).unwrap();
        let v = check_bell_wigner(&ReducedFamily3::from_state(&rho).unwrap()).unwrap();
        prop_assert!(v.passes, "spectrum [{}, {}]", v.min_eig, v.max_eig);
    }

    #[test]
    fn gen_delta_matches_delta_operator(seed in any::<u64>()) {
        let rho = sample_density(3, 8, seed).unwrap();
        let f = ReducedFamily3::from_state(&rho).unwrap();
        let family: BTreeMap<_, _> = f.members().into_iter().map(|(s, r)| (s, r.clone())).collect();
        let g = gen_delta(&family, SubsetMask::full(3), 3).unwrap();
        prop_assert!(g.operator.max_abs_diff(&delta_operator(&f).unwrap()) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn separable_states_satisfy_four_qubit_ranges(seed in any::<u64>()) {
        let rho = sample_product_mixture(4, 50, seed).unwrap();
        let mut family = BTreeMap::new();
        for b in SubsetMask::all(4).filter(|b| b.len() == 3) {
            family.insert(b, partial_trace(&rho, b).unwrap());
        }
        for i in 1..=4 {
            let a = SubsetMask::full(4).difference(SubsetMask::singleton(i));
            let g = gen_delta(&family, a, 4).unwrap();
            prop_assert!(g.min_eig >= -1e-9 && g.max_eig <= 1.0 + 1e-9, "Δ_{}: [{}, {}]", i, g.min_eig, g.max_eig);
        }
    }
}

#[test]
fn ghz_pair_reduction_matches_index_contraction() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(h, 0.0);
    amps[7] = Complex64::new(h, 0.0);
    let rho = DensityMatrix::from_pure(&StateVector::new(amps.clone()).unwrap()).unwrap();
    // (ρ₁₂)_{ab,a'b'} = Σ_c ψ_{abc} ψ*_{a'b'c}
    let mut oracle = ComplexMatrix::zeros(4);
    for r in 0..4 {
        for c in 0..4 {
            for t in 0..2 {
                oracle[(r, c)] += amps[2 * r + t] * amps[2 * c + t].conj();
            }
        }
    }
    assert!(partial_trace(&rho, set(&[1, 2])).unwrap().matrix().max_abs_diff(&oracle) < 1e-15);
}
