//! Marginal families of binary variables with exact rational arithmetic.
//!
//! A family stores tables `P_A` for proper subsets `A ⊂ N = {1, …, n}`.
//! The odd-subset conditions ([`check_theorem2`]) and the equivalent
//! `Q`-function conditions ([`check_theorem3`]) decide compatibility once
//! all proper-subset marginals are known; [`reconstruct_joint`] then picks
//! the top parity coefficient and returns a joint distribution.
//!
//! Witnesses are the first violation in a fixed iteration order: subsets by
//! mask value, outcomes by [`Outcome::bits`].

use core::fmt;

use num_traits::Signed;

use crate::rational::{pow2_inv, Rational};
use crate::subset::{Outcome, SubsetMask};

mod conditions;
mod sigma;
mod table;

pub use conditions::{
    check_theorem2, check_theorem3, check_wigner, decide, delta3, q_function, reconstruct_joint, Reconstruction,
};
pub use sigma::{coefficients_from_family, SigmaCoefficients};
pub use table::{check_equimarginal, marginalize, JointTable, MarginalFamily, MarginalTable, MAX_CLASSICAL_VARS};

/// Two stored tables whose marginals on `common` differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquimarginalWitness {
    pub first: SubsetMask,
    pub second: SubsetMask,
    pub common: SubsetMask,
}

impl fmt::Display for EquimarginalWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tables on {} and {} disagree on {}", self.first, self.second, self.common)
    }
}

/// Which inequality a [`Witness`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `P_ac(x_a, x_c) + P_bc(x_b, x̄_c) - P_ab(x_a, x_b) ≥ 0`, subset `{a, b}`.
    Wigner,
    /// The odd-subset sum for subset `A`, required in `[0, 1]`.
    OddSubsetSum,
    /// `Q(x)` in `[-2^-n, 1 - 2^-n]`; the witness subset is empty.
    QRange,
    /// `Q(x) + Q(x ⊕ A)` in `[0, 2]`.
    QPairSum,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::Wigner => "wigner",
            Inequality::OddSubsetSum => "odd_subset_sum",
            Inequality::QRange => "q_range",
            Inequality::QPairSum => "q_pair_sum",
        }
    }

    pub fn is_satisfied(self, value: &Rational, n: usize) -> bool {
        let one = Rational::from_integer(1.into());
        match self {
            Inequality::Wigner => !value.is_negative(),
            Inequality::OddSubsetSum => !value.is_negative() && *value <= one,
            Inequality::QRange => {
                let eps = pow2_inv(n);
                *value >= -eps.clone() && *value <= one - eps
            }
            Inequality::QPairSum => !value.is_negative() && *value <= Rational::from_integer(2.into()),
        }
    }
}

/// A violated inequality: which one, the subset and outcome it was
/// instantiated at, and the offending value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub inequality: Inequality,
    pub subset: SubsetMask,
    pub outcome: Outcome,
    pub value: Rational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at A={}, x={}: value {}", self.inequality.name(), self.subset, self.outcome, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalVerdict {
    pub compatible: bool,
    pub witness: Option<Witness>,
    pub certificate: Option<JointTable>,
}

impl ClassicalVerdict {
    pub(crate) fn pass() -> Self {
        ClassicalVerdict { compatible: true, witness: None, certificate: None }
    }

    pub(crate) fn fail(w: Witness) -> Self {
        ClassicalVerdict { compatible: false, witness: Some(w), certificate: None }
    }
}
