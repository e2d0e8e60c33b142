use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{pow2, pow2_inv, Rational};
use crate::subset::{deposit_bits, Outcome, SubsetMask};

use super::table::{check_equimarginal, MarginalFamily, MarginalTable};

/// Coefficients `c_A` of the parity expansion `P = Σ_A c_A σ_A`, restricted
/// to the subsets a family determines. `c_∅ = 2^-n` always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaCoefficients {
    n: usize,
    coeffs: BTreeMap<SubsetMask, Rational>,
}

impl SigmaCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: SubsetMask) -> Option<&Rational> {
        self.coeffs.get(&a)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SubsetMask, &Rational)> {
        self.coeffs.iter().map(|(a, c)| (*a, c))
    }

    /// Rebuilds `P_A = 2^{n-|A|} Σ_{B⊆A} c_B σ_B` from the coefficients.
    pub fn marginal(&self, a: SubsetMask) -> Result<MarginalTable> {
        let coeffs = a
            .subsets()
            .map(|b| {
                self.coeffs
                    .get(&b)
                    .map(|c| (b, c))
                    .ok_or_else(|| Error::input(format!("coefficient for {b} is not available")))
            })
            .collect::<Result<alloc::vec::Vec<_>>>()?;
        let scale = pow2(self.n - a.len());
        let mut values = vec![Rational::zero(); 1 << a.len()];
        for (idx, v) in values.iter_mut().enumerate() {
            let x = Outcome::from_raw(self.n, deposit_bits(idx, a.bits()));
            let mut s = Rational::zero();
            for (b, c) in &coeffs {
                if x.sigma_unchecked(*b) > 0 {
                    s += *c;
                } else {
                    s -= *c;
                }
            }
            *v = s * &scale;
        }
        Ok(MarginalTable::new_unchecked(self.n, a, values))
    }
}

/// Inverts the marginal expansion:
/// `c_B σ_B = Σ_{D⊆B} (-1)^{|B|-|D|} 2^{-(n-|D|)} P_D`, evaluated at the
/// all-zeros outcome where every `σ_B` is `+1`.
pub fn coefficients_from_family(f: &MarginalFamily) -> Result<SigmaCoefficients> {
    check_equimarginal(f).map_err(Error::NotEquimarginal)?;
    let n = f.n();
    let zero = Outcome::from_raw(n, 0);
    let mut coeffs = BTreeMap::new();
    for b in f.derivable_subsets() {
        let mut c = Rational::zero();
        for d in b.subsets() {
            let term = f.derived(d)?.eval(zero) * pow2_inv(n - d.len());
            if (b.len() - d.len()) % 2 == 0 {
                c += term;
            } else {
                c -= term;
            }
        }
        coeffs.insert(b, c);
    }
    Ok(SigmaCoefficients { n, coeffs })
}
