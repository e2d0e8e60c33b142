//! Deciding whether given marginals fit together.
//!
//! Given probability distributions on subsets of binary variables, or
//! reduced density matrices of qubit subsystems, decide whether they can be
//! the marginals of a single joint state.
//!
//! * [`classical`]: exact-rational marginal families, the odd-subset
//!   inequality conditions and joint reconstruction.
//! * [`lp`]: an independent exact linear-programming feasibility oracle.
//! * [`linalg`]: dense complex kernel for multi-qubit operators.
//! * [`quantum`]: three-qubit Bell-Wigner operator checks, the generalized
//!   `Δ_A` operators, random states and the alternating-projection probe.
//! * [`spectra`]: one-party spectral criteria (polygon, Higuchi, Bravyi,
//!   Han-Zhang-Guo, Coleman).
//!
//! Conventions used throughout: variable/qubit indices are 1-based, a
//! [`SubsetMask`] stores element `i` at bit `i - 1`, and in matrix index
//! space qubit 1 is the most significant bit.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classical;
mod error;
pub mod instances;
pub mod linalg;
pub mod lp;
pub mod quantum;
mod rational;
pub mod spectra;
mod subset;

pub use error::{Error, Result};
pub use rational::{rat, Rational};
pub use subset::{Outcome, SubsetMask, MAX_VARS};
