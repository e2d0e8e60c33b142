//! Random classical test instances.
//!
//! A family is drawn by taking a random joint distribution with small
//! integer weights, moving one or a few of its proper parity coefficients by
//! random rationals and rebuilding the maximal marginals. Unperturbed
//! families are always compatible; perturbed ones sometimes are not. Any draw
//! with a negative marginal entry is rejected and redrawn.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::classical::{JointTable, MarginalFamily, MarginalTable, MAX_CLASSICAL_VARS};
use crate::error::{Error, Result};
use crate::rational::{pow2, pow2_inv, Rational};
use crate::subset::{deposit_bits, Outcome, SubsetMask};

/// Shape of the random draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceConfig {
    /// Joint weights are drawn uniformly from `0..=max_weight`.
    pub max_weight: u32,
    /// Probability that the family is perturbed at all.
    pub perturb_probability: f64,
    /// At most this many proper coefficients are moved.
    pub max_perturbed: usize,
    /// Each move is `k / (denominator · 2^n)` with `1 ≤ |k| ≤ max_step`.
    pub max_step: i64,
    pub denominator: i64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig { max_weight: 3, perturb_probability: 0.7, max_perturbed: 2, max_step: 3, denominator: 4 }
    }
}

/// Joint distribution proportional to independent integer weights (not all
/// zero).
pub fn random_joint<R: Rng>(n: usize, max_weight: u32, rng: &mut R) -> Result<JointTable> {
    if n == 0 || n > MAX_CLASSICAL_VARS {
        return Err(Error::input(format!("variable count must be in 1..={MAX_CLASSICAL_VARS}, got {n}")));
    }
    if max_weight == 0 {
        return Err(Error::input("max_weight must be positive"));
    }
    loop {
        let w: Vec<u32> = (0..1usize << n).map(|_| rng.random_range(0..=max_weight)).collect();
        let total: u32 = w.iter().sum();
        if total == 0 {
            continue;
        }
        let values = w.iter().map(|x| Rational::new(BigInt::from(*x), BigInt::from(total))).collect();
        return JointTable::new(n, values);
    }
}

/// `c_B = 2^-n Σ_x P(x) σ_B(x)` for every `B ⊆ N`.
pub fn parity_coefficients(p: &JointTable) -> BTreeMap<SubsetMask, Rational> {
    let n = p.n();
    let scale = pow2_inv(n);
    SubsetMask::all(n)
        .map(|b| {
            let mut s = Rational::zero();
            for x in Outcome::all(n) {
                let v = p.eval(x);
                if x.sigma_unchecked(b) > 0 {
                    s += v;
                } else {
                    s -= v;
                }
            }
            (b, s * &scale)
        })
        .collect()
}

/// `P_A(x) = 2^{n-|A|} Σ_{B⊆A} c_B σ_B(x)`, or `None` if some entry is
/// negative.
fn marginal_from_coefficients(n: usize, a: SubsetMask, c: &BTreeMap<SubsetMask, Rational>) -> Option<MarginalTable> {
    let factor = pow2(n - a.len());
    let mut values = Vec::with_capacity(1 << a.len());
    for r in 0..1usize << a.len() {
        let x = Outcome::from_raw(n, deposit_bits(r, a.bits()));
        let mut s = Rational::zero();
        for b in a.subsets() {
            if x.sigma_unchecked(b) > 0 {
                s += &c[&b];
            } else {
                s -= &c[&b];
            }
        }
        let v = s * &factor;
        if v.is_negative() {
            return None;
        }
        values.push(v);
    }
    Some(MarginalTable::new(n, a, values).expect("entries sum to one by construction"))
}

/// A random family of all `(n-1)`-variable marginals.
///
/// Returns the family and whether any coefficient was moved (a move can
/// still leave the family compatible).
pub fn random_family<R: Rng>(n: usize, cfg: &InstanceConfig, rng: &mut R) -> Result<(MarginalFamily, bool)> {
    if !(2..=MAX_CLASSICAL_VARS).contains(&n) {
        return Err(Error::input(format!("variable count must be in 2..={MAX_CLASSICAL_VARS}, got {n}")));
    }
    if cfg.denominator <= 0 {
        return Err(Error::input("denominator must be positive"));
    }
    let full = SubsetMask::full(n);
    loop {
        let joint = random_joint(n, cfg.max_weight, rng)?;
        let mut c = parity_coefficients(&joint);
        let perturbed = cfg.max_perturbed > 0 && cfg.max_step > 0 && rng.random_bool(cfg.perturb_probability);
        if perturbed {
            let proper: Vec<SubsetMask> = SubsetMask::all(n).filter(|b| !b.is_empty() && *b != full).collect();
            for _ in 0..rng.random_range(1..=cfg.max_perturbed) {
                let b = proper[rng.random_range(0..proper.len())];
                let mut k = rng.random_range(1..=cfg.max_step);
                if rng.random_bool(0.5) {
                    k = -k;
                }
                let step = Rational::new(BigInt::from(k), BigInt::from(cfg.denominator)) * pow2_inv(n);
                *c.get_mut(&b).expect("all subsets present") += step;
            }
        }
        let mut tables = Vec::with_capacity(n);
        for i in 1..=n {
            match marginal_from_coefficients(n, full.difference(SubsetMask::singleton(i)), &c) {
                Some(t) => tables.push(t),
                None => break,
            }
        }
        if tables.len() == n {
            return Ok((MarginalFamily::from_tables(n, tables)?, perturbed));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::check_equimarginal;
    use crate::classical::coefficients_from_family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unperturbed_family_matches_joint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = InstanceConfig { perturb_probability: 0.0, ..InstanceConfig::default() };
        let (f, perturbed) = random_family(4, &cfg, &mut rng).unwrap();
        assert!(!perturbed);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn families_are_equimarginal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=5 {
            for _ in 0..20 {
                let (f, _) = random_family(n, &InstanceConfig::default(), &mut rng).unwrap();
                assert!(check_equimarginal(&f).is_ok());
            }
        }
    }

    #[test]
    fn coefficients_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let joint = random_joint(3, 5, &mut rng).unwrap();
        let c = parity_coefficients(&joint);
        assert_eq!(c[&SubsetMask::EMPTY], pow2_inv(3));
        let f = MarginalFamily::maximal_from_joint(&joint).unwrap();
        let from_family = coefficients_from_family(&f).unwrap();
        for (b, v) in from_family.iter() {
            assert_eq!(v, &c[&b], "coefficient of {b}");
        }
    }
}
