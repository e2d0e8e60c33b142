use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::{deposit_bits, extract_bits, Outcome, SubsetMask, MAX_VARS};

use super::EquimarginalWitness;

/// Upper bound on `n` for anything that materializes all `2^n` outcomes.
pub const MAX_CLASSICAL_VARS: usize = 20;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_CLASSICAL_VARS {
        return Err(Error::input(format!("number of variables must be in 1..={MAX_CLASSICAL_VARS}, got {n}")));
    }
    Ok(())
}

fn check_distribution(values: &[Rational], what: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| v.is_negative()) {
        return Err(Error::input(format!("{what} has negative entry {v}")));
    }
    let total: Rational = values.iter().sum();
    if !total.is_one() {
        return Err(Error::input(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

/// Probability table `P_A` on the variables of `subset`, viewed as a
/// function on all `n` variables that is constant outside `subset`.
///
/// `values` is indexed by the packed restriction: the `k`-th smallest member
/// of `subset` is bit `k` of the index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalTable {
    n: usize,
    subset: SubsetMask,
    values: Vec<Rational>,
}

impl MarginalTable {
    pub fn new(n: usize, subset: SubsetMask, values: Vec<Rational>) -> Result<Self> {
        check_n(n)?;
        if subset.max_index() > n {
            return Err(Error::input(format!("subset {subset} not inside 1..={n}")));
        }
        if values.len() != 1 << subset.len() {
            return Err(Error::input(format!(
                "table on {subset} needs {} entries, got {}",
                1usize << subset.len(),
                values.len()
            )));
        }
        check_distribution(&values, &format!("table on {subset}"))?;
        Ok(MarginalTable { n, subset, values })
    }

    pub(crate) fn new_unchecked(n: usize, subset: SubsetMask, values: Vec<Rational>) -> Self {
        MarginalTable { n, subset, values }
    }

    /// `P_∅ ≡ 1`.
    pub fn constant_one(n: usize) -> Self {
        MarginalTable { n, subset: SubsetMask::EMPTY, values: vec![Rational::one()] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subset(&self) -> SubsetMask {
        self.subset
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Value at a packed restriction index.
    pub fn get(&self, restriction: usize) -> &Rational {
        &self.values[restriction]
    }

    /// `P_A(x)`; only the bits of `x` inside the subset matter.
    pub fn eval(&self, x: Outcome) -> &Rational {
        &self.values[extract_bits(x.bits(), self.subset.bits())]
    }

    /// Sums out the variables of `self.subset() \ sub`.
    pub fn marginalize_to(&self, sub: SubsetMask) -> Result<MarginalTable> {
        if !sub.is_subset_of(self.subset) {
            return Err(Error::input(format!("{sub} is not a subset of {}", self.subset)));
        }
        let mut values = vec![Rational::zero(); 1 << sub.len()];
        for (idx, v) in self.values.iter().enumerate() {
            let x = deposit_bits(idx, self.subset.bits());
            values[extract_bits(x, sub.bits())] += v;
        }
        Ok(MarginalTable { n: self.n, subset: sub, values })
    }
}

/// A probability distribution on all `2^n` outcomes, indexed by
/// [`Outcome::bits`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    n: usize,
    values: Vec<Rational>,
}

impl JointTable {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_n(n)?;
        if values.len() != 1 << n {
            return Err(Error::input(format!("joint table on {n} variables needs {} entries", 1usize << n)));
        }
        check_distribution(&values, "joint table")?;
        Ok(JointTable { n, values })
    }

    /// Builds a table from `(outcome, probability)` pairs; unlisted outcomes are 0.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (Outcome, Rational)>) -> Result<Self> {
        check_n(n)?;
        let mut values = vec![Rational::zero(); 1 << n];
        for (x, p) in entries {
            if x.n() != n {
                return Err(Error::input(format!("outcome {x} has the wrong length")));
            }
            values[x.bits() as usize] = p;
        }
        JointTable::new(n, values)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_n(n)?;
        let p = crate::rational::pow2_inv(n);
        Ok(JointTable { n, values: vec![p; 1 << n] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn eval(&self, x: Outcome) -> &Rational {
        &self.values[x.bits() as usize]
    }

    /// `P_A = Σ_{x_i, i∉A} P`. `A` must be a proper subset.
    pub fn marginalize(&self, a: SubsetMask) -> Result<MarginalTable> {
        let full = SubsetMask::full(self.n);
        if !a.is_strict_subset_of(full) {
            return Err(Error::input(format!("marginal subset {a} must be a proper subset of {full}")));
        }
        let mut values = vec![Rational::zero(); 1 << a.len()];
        for (x, v) in self.values.iter().enumerate() {
            values[extract_bits(x as u32, a.bits())] += v;
        }
        Ok(MarginalTable::new_unchecked(self.n, a, values))
    }
}

/// Free-function form of [`JointTable::marginalize`].
pub fn marginalize(p: &JointTable, a: SubsetMask) -> Result<MarginalTable> {
    p.marginalize(a)
}

/// A classical problem instance: tables `P_A` for some proper subsets
/// `A ⊂ {1, …, n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalFamily {
    n: usize,
    tables: BTreeMap<SubsetMask, MarginalTable>,
}

impl MarginalFamily {
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(MarginalFamily { n, tables: BTreeMap::new() })
    }

    pub fn from_tables(n: usize, tables: impl IntoIterator<Item = MarginalTable>) -> Result<Self> {
        let mut fam = MarginalFamily::new(n)?;
        for t in tables {
            fam.insert(t)?;
        }
        Ok(fam)
    }

    /// Marginals of `p` on the given subsets.
    pub fn from_joint(p: &JointTable, subsets: impl IntoIterator<Item = SubsetMask>) -> Result<Self> {
        let mut fam = MarginalFamily::new(p.n())?;
        for a in subsets {
            fam.insert(p.marginalize(a)?)?;
        }
        Ok(fam)
    }

    /// The `n` marginals of `p` on subsets of size `n - 1`.
    pub fn maximal_from_joint(p: &JointTable) -> Result<Self> {
        let n = p.n();
        MarginalFamily::from_joint(p, (1..=n).map(|i| SubsetMask::singleton(i).complement(n)))
    }

    pub fn insert(&mut self, table: MarginalTable) -> Result<()> {
        let full = SubsetMask::full(self.n);
        let a = table.subset();
        if table.n() != self.n {
            return Err(Error::input(format!("table on {a} declares n = {}, family has n = {}", table.n(), self.n)));
        }
        if a.is_empty() {
            return Err(Error::input("the empty-subset marginal is implicit and cannot be stored"));
        }
        if !a.is_strict_subset_of(full) {
            return Err(Error::input(format!("stored subset {a} must be a proper subset of {full}")));
        }
        if self.tables.contains_key(&a) {
            return Err(Error::input(format!("duplicate table for {a}")));
        }
        self.tables.insert(a, table);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn get(&self, a: SubsetMask) -> Option<&MarginalTable> {
        self.tables.get(&a)
    }

    /// Stored tables by ascending subset mask.
    pub fn tables(&self) -> impl Iterator<Item = &MarginalTable> {
        self.tables.values()
    }

    pub fn subsets(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        self.tables.keys().copied()
    }

    /// `P_B`, either stored, `P_∅ ≡ 1`, or summed down from the first stored
    /// superset. Only meaningful for equimarginal families.
    pub fn derived(&self, b: SubsetMask) -> Result<MarginalTable> {
        if b.is_empty() {
            return Ok(MarginalTable::constant_one(self.n));
        }
        if let Some(t) = self.tables.get(&b) {
            return Ok(t.clone());
        }
        match self.tables.iter().find(|(a, _)| b.is_subset_of(**a)) {
            Some((_, t)) => t.marginalize_to(b),
            None => Err(Error::input(format!("no stored table determines the marginal on {b}"))),
        }
    }

    /// Every subset that is contained in some stored subset, including `∅`.
    pub fn derivable_subsets(&self) -> Vec<SubsetMask> {
        let mut out: Vec<SubsetMask> = SubsetMask::all(self.n)
            .filter(|b| b.is_empty() || self.tables.keys().any(|a| b.is_subset_of(*a)))
            .collect();
        out.sort();
        out
    }
}

/// Checks that every pair of stored tables agrees on the marginal of their
/// common variables. Agreement on `A ∩ B` implies agreement on all of its
/// subsets.
pub fn check_equimarginal(f: &MarginalFamily) -> core::result::Result<(), EquimarginalWitness> {
    let tables: Vec<&MarginalTable> = f.tables().collect();
    for (i, ta) in tables.iter().enumerate() {
        for tb in &tables[i + 1..] {
            let common = ta.subset().intersection(tb.subset());
            if common.is_empty() {
                continue;
            }
            let ma = ta.marginalize_to(common).expect("intersection is a subset");
            let mb = tb.marginalize_to(common).expect("intersection is a subset");
            if ma != mb {
                return Err(EquimarginalWitness { first: ta.subset(), second: tb.subset(), common });
            }
        }
    }
    Ok(())
}

/// All marginals `P_B` for `B ⊂ N`, indexed by mask. Requires that every
/// proper subset is determined by the family, i.e. all `n` maximal proper
/// subsets are stored (or covered).
pub(crate) struct ProperMarginals {
    n: usize,
    tables: Vec<MarginalTable>,
}

impl ProperMarginals {
    pub(crate) fn new(f: &MarginalFamily) -> Result<Self> {
        let n = f.n();
        if n > MAX_VARS.min(16) {
            return Err(Error::Resource(format!("{n} variables is too many for the odd-subset conditions")));
        }
        check_equimarginal(f).map_err(Error::NotEquimarginal)?;
        let full = SubsetMask::full(n);
        for i in 1..=n {
            let maximal = SubsetMask::singleton(i).complement(n);
            if !maximal.is_empty() && !f.subsets().any(|a| maximal.is_subset_of(a)) {
                return Err(Error::input(format!(
                    "family does not determine the marginal on {maximal}; all proper-subset marginals are required"
                )));
            }
        }
        let tables = SubsetMask::all(n).filter(|b| *b != full).map(|b| f.derived(b)).collect::<Result<Vec<_>>>()?;
        Ok(ProperMarginals { n, tables })
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    /// `P_B(x)` for `B ⊂ N`.
    pub(crate) fn eval(&self, b: SubsetMask, x: Outcome) -> &Rational {
        self.tables[b.bits() as usize].eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn mask(ix: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(ix).unwrap()
    }

    fn ghz_joint() -> JointTable {
        JointTable::from_entries(
            3,
            [
                (Outcome::from_values(&[0, 0, 0]).unwrap(), rat(1, 2)),
                (Outcome::from_values(&[1, 1, 1]).unwrap(), rat(1, 2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn marginalize_uniform() {
        let p = JointTable::uniform(3).unwrap();
        let m = p.marginalize(mask(&[1, 2])).unwrap();
        assert!(m.values().iter().all(|v| *v == rat(1, 4)));
    }

    #[test]
    fn marginalize_correlated_pair() {
        // Summing over x_3 by hand: 00 -> P(000) + P(001) = 1/2, 11 -> 1/2.
        let m = ghz_joint().marginalize(mask(&[1, 2])).unwrap();
        let at = |v: &[u8]| m.eval(Outcome::from_values(&[v[0], v[1], 0]).unwrap()).clone();
        assert_eq!(at(&[0, 0]), rat(1, 2));
        assert_eq!(at(&[1, 1]), rat(1, 2));
        assert_eq!(at(&[0, 1]), rat(0, 1));
        assert_eq!(at(&[1, 0]), rat(0, 1));
    }

    #[test]
    fn marginalize_deterministic() {
        let p = JointTable::from_entries(3, [(Outcome::from_values(&[0, 0, 0]).unwrap(), rat(1, 1))]).unwrap();
        let m = p.marginalize(mask(&[2])).unwrap();
        assert_eq!(m.values(), &[rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn marginalize_full_set_is_rejected() {
        let p = JointTable::uniform(2).unwrap();
        assert!(p.marginalize(mask(&[1, 2])).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(MarginalTable::new(2, mask(&[1]), vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(MarginalTable::new(2, mask(&[1]), vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(MarginalTable::new(2, mask(&[1]), vec![rat(1, 1)]).is_err());
        assert!(MarginalTable::new(2, mask(&[3]), vec![rat(1, 2), rat(1, 2)]).is_err());
    }

    #[test]
    fn family_rejects_full_and_empty_subsets() {
        let mut f = MarginalFamily::new(2).unwrap();
        let full = MarginalTable::new(2, mask(&[1, 2]), vec![rat(1, 4); 4]).unwrap();
        assert!(f.insert(full).is_err());
        assert!(f.insert(MarginalTable::constant_one(2)).is_err());
    }

    #[test]
    fn equimarginal_uniform_pairs() {
        let f = MarginalFamily::maximal_from_joint(&JointTable::uniform(3).unwrap()).unwrap();
        assert!(check_equimarginal(&f).is_ok());
    }

    #[test]
    fn equimarginal_single_table_is_vacuous() {
        let f = MarginalFamily::from_joint(&ghz_joint(), [mask(&[1, 2])]).unwrap();
        assert!(check_equimarginal(&f).is_ok());
    }

    #[test]
    fn equimarginal_detects_disagreeing_singleton() {
        // P_12 uniform gives P_1 = (1/2, 1/2); P_13 below gives P_1 = (3/4, 1/4).
        let p12 = MarginalTable::new(3, mask(&[1, 2]), vec![rat(1, 4); 4]).unwrap();
        let p13 = MarginalTable::new(3, mask(&[1, 3]), vec![rat(3, 8), rat(1, 8), rat(3, 8), rat(1, 8)]).unwrap();
        assert_eq!(p13.marginalize_to(mask(&[1])).unwrap().values(), &[rat(3, 4), rat(1, 4)]);
        let f = MarginalFamily::from_tables(3, [p12, p13]).unwrap();
        let w = check_equimarginal(&f).unwrap_err();
        assert_eq!(w.common, mask(&[1]));
        assert_eq!((w.first, w.second), (mask(&[1, 2]), mask(&[1, 3])));
    }

    #[test]
    fn derived_marginals() {
        let f = MarginalFamily::maximal_from_joint(&ghz_joint()).unwrap();
        assert_eq!(f.derived(SubsetMask::EMPTY).unwrap().values(), &[rat(1, 1)]);
        assert_eq!(f.derived(mask(&[2])).unwrap().values(), &[rat(1, 2), rat(1, 2)]);
        let single = MarginalFamily::from_joint(&ghz_joint(), [mask(&[1, 2])]).unwrap();
        assert!(single.derived(mask(&[3])).is_err());
        assert_eq!(single.derivable_subsets(), [SubsetMask::EMPTY, mask(&[1]), mask(&[2]), mask(&[1, 2])]);
    }
}
