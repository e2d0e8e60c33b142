//! Three-qubit Bell-Wigner operator checks and their multipartite analogues.
//!
//! Reduced states are embedded into the full register by acting as the
//! identity on the remaining qubits, so `ρ₂` on three qubits is `1⊗ρ₂⊗1`.

mod family;
mod general;
mod probe;
mod sample;

pub use family::{
    check_bell_wigner, check_q_equimarginal, delta_operator, Equimarginality, QuantumVerdict, ReducedFamily3,
};
pub use general::{check_family_equimarginal, counterexample_n4, gen_delta, Counterexample, GenDelta};
pub use probe::{probe_sufficiency, ProbeOptions, ProbeReport, ProbeStatus};
pub use sample::{
    sample_density, sample_gaussian_amplitudes, sample_product_mixture, sample_pure_state, MAX_SAMPLE_QUBITS,
};

/// Entrywise tolerance for overlapping reductions to count as equal.
pub const TOL_EQ: f64 = 1e-9;
/// Default tolerance of the sufficiency probe.
pub const TOL_PROBE: f64 = 1e-7;
/// Default iteration cap of the sufficiency probe.
pub const DEFAULT_PROBE_ITERATIONS: usize = 5000;
