use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{pow2_inv, Rational};
use crate::subset::{Outcome, SubsetMask};

use super::table::{check_equimarginal, JointTable, MarginalFamily, ProperMarginals};
use super::{ClassicalVerdict, Inequality, Witness};

fn pairwise_tables(f: &MarginalFamily) -> Result<()> {
    if f.n() != 3 {
        return Err(Error::input(format!("pairwise checks need n = 3, got {}", f.n())));
    }
    let pairs = [0b011, 0b101, 0b110].map(SubsetMask::from_bits);
    if f.len() != 3 || pairs.iter().any(|p| f.get(*p).is_none()) {
        return Err(Error::input("pairwise checks need exactly the tables on {1,2}, {1,3} and {2,3}"));
    }
    check_equimarginal(f).map_err(Error::NotEquimarginal)
}

/// For the pair `{a, b}` (a < b) with third variable `c`:
/// `P_ac(x_a, x_c) + P_bc(x_b, 1 - x_c) - P_ab(x_a, x_b)`, which must be `≥ 0`.
fn wigner_slack(f: &MarginalFamily, ab: SubsetMask, x: Outcome) -> Rational {
    let c = ab.complement(3);
    let mut ind = ab.indices();
    let (a, b) = (ind.next().unwrap(), ind.next().unwrap());
    let ac = SubsetMask::singleton(a).union(c);
    let bc = SubsetMask::singleton(b).union(c);
    let lhs = f.get(ab).expect("pair table").eval(x);
    let r1 = f.get(ac).expect("pair table").eval(x);
    let r2 = f.get(bc).expect("pair table").eval(x.flip_unchecked(c));
    r1 + r2 - lhs
}

/// Evaluates every inequality `P_ab(x, y) ≤ P_ac(x, z) + P_bc(y, z̄)` over
/// the three choices of the pair `{a, b}` and all arguments. Choosing the
/// other order of `a`, `b` gives the same set with `z` and `z̄` swapped.
pub fn check_wigner(f: &MarginalFamily) -> Result<ClassicalVerdict> {
    pairwise_tables(f)?;
    for ab in [0b011, 0b101, 0b110].map(SubsetMask::from_bits) {
        for x in Outcome::all(3) {
            let slack = wigner_slack(f, ab, x);
            if slack.is_negative() {
                return Ok(ClassicalVerdict::fail(Witness {
                    inequality: Inequality::Wigner,
                    subset: ab,
                    outcome: x,
                    value: slack,
                }));
            }
        }
    }
    Ok(ClassicalVerdict::pass())
}

/// `Δ(x) = 1 - P_1 - P_2 - P_3 + P_12 + P_13 + P_23` for a pairwise family.
pub fn delta3(f: &MarginalFamily, x: Outcome) -> Result<Rational> {
    pairwise_tables(f)?;
    if x.n() != 3 {
        return Err(Error::input(format!("outcome {x} must have 3 variables")));
    }
    let mut d = Rational::one();
    for i in 1..=3 {
        d -= f.derived(SubsetMask::singleton(i))?.eval(x);
    }
    for t in f.tables() {
        d += t.eval(x);
    }
    Ok(d)
}

/// `Σ_{B: A∪B=N, B⊂N} (-1)^{|A∩B|} P_B(x)`, including `P_∅ ≡ 1` when `A = N`.
fn odd_subset_sum(pm: &ProperMarginals, a: SubsetMask, x: Outcome) -> Rational {
    let n = pm.n();
    let full = SubsetMask::full(n);
    let rest = full.difference(a);
    let mut s = Rational::zero();
    // B = (N \ A) ∪ E for E ⊂ A.
    for e in a.subsets().filter(|e| *e != a) {
        let b = rest.union(e);
        let v = pm.eval(b, x);
        if e.len() % 2 == 0 {
            s += v;
        } else {
            s -= v;
        }
    }
    s
}

fn odd_subsets(n: usize) -> impl Iterator<Item = SubsetMask> {
    SubsetMask::all(n).filter(|a| a.len() % 2 == 1)
}

/// Odd-subset conditions: for every odd `A ⊆ N` and every `x`,
/// `0 ≤ Σ_{B: A∪B=N, B⊂N} (-1)^{|A∩B|} P_B(x) ≤ 1`. Together with
/// equimarginality these are necessary and sufficient.
pub fn check_theorem2(f: &MarginalFamily) -> Result<ClassicalVerdict> {
    let pm = ProperMarginals::new(f)?;
    Ok(theorem2_on(&pm))
}

fn theorem2_on(pm: &ProperMarginals) -> ClassicalVerdict {
    let n = pm.n();
    for a in odd_subsets(n) {
        for x in Outcome::all(n) {
            let s = odd_subset_sum(pm, a, x);
            if !Inequality::OddSubsetSum.is_satisfied(&s, n) {
                return ClassicalVerdict::fail(Witness {
                    inequality: Inequality::OddSubsetSum,
                    subset: a,
                    outcome: x,
                    value: s,
                });
            }
        }
    }
    ClassicalVerdict::pass()
}

fn q_on(pm: &ProperMarginals, x: Outcome) -> Rational {
    let n = pm.n();
    let full = SubsetMask::full(n);
    let mut q = Rational::zero();
    for b in SubsetMask::all(n).filter(|b| *b != full) {
        let k = n - b.len();
        let term = pm.eval(b, x) * pow2_inv(k);
        if (k - 1).is_multiple_of(2) {
            q += term;
        } else {
            q -= term;
        }
    }
    q
}

/// `Q(x) = Σ_{B⊂N} (-1)^{n-|B|-1} 2^{-(n-|B|)} P_B(x)`: the joint
/// distribution with its top parity coefficient `c_N` removed.
pub fn q_function(f: &MarginalFamily, x: Outcome) -> Result<Rational> {
    let pm = ProperMarginals::new(f)?;
    if x.n() != f.n() {
        return Err(Error::input(format!("outcome {x} must have {} variables", f.n())));
    }
    Ok(q_on(&pm, x))
}

fn q_table(pm: &ProperMarginals) -> Vec<Rational> {
    Outcome::all(pm.n()).map(|x| q_on(pm, x)).collect()
}

/// `-2^-n ≤ Q(x) ≤ 1 - 2^-n` for all `x`, and `0 ≤ Q(x) + Q(x ⊕ A) ≤ 2` for
/// every nonempty odd `A ⊆ N` (including `A = N`).
pub fn check_theorem3(f: &MarginalFamily) -> Result<ClassicalVerdict> {
    let pm = ProperMarginals::new(f)?;
    let n = pm.n();
    let q = q_table(&pm);
    for x in Outcome::all(n) {
        let v = &q[x.bits() as usize];
        if !Inequality::QRange.is_satisfied(v, n) {
            return Ok(ClassicalVerdict::fail(Witness {
                inequality: Inequality::QRange,
                subset: SubsetMask::EMPTY,
                outcome: x,
                value: v.clone(),
            }));
        }
    }
    for a in odd_subsets(n) {
        for x in Outcome::all(n) {
            let s = &q[x.bits() as usize] + &q[x.flip_unchecked(a).bits() as usize];
            if !Inequality::QPairSum.is_satisfied(&s, n) {
                return Ok(ClassicalVerdict::fail(Witness {
                    inequality: Inequality::QPairSum,
                    subset: a,
                    outcome: x,
                    value: s,
                }));
            }
        }
    }
    Ok(ClassicalVerdict::pass())
}

/// A joint distribution rebuilt from its proper marginals, with the feasible
/// interval for the top coefficient `c_N` it was chosen from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction {
    pub joint: JointTable,
    pub lower: Rational,
    pub upper: Rational,
    /// The chosen `c_N`, the midpoint of `[lower, upper]`.
    pub top_coefficient: Rational,
}

/// Builds `P = Q + c_N σ_N` with `c_N` the midpoint of the interval that
/// keeps every `P(x)` in `[0, 1]`. Refuses (with the odd-subset witness)
/// when the family is incompatible.
pub fn reconstruct_joint(f: &MarginalFamily) -> Result<Reconstruction> {
    let pm = ProperMarginals::new(f)?;
    if let Some(w) = theorem2_on(&pm).witness {
        return Err(Error::Incompatible(w));
    }
    let n = pm.n();
    let full = SubsetMask::full(n);
    let q = q_table(&pm);
    let one = Rational::one();
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for x in Outcome::all(n) {
        let qx = &q[x.bits() as usize];
        let (lo, hi) = if x.sigma_unchecked(full) > 0 { (-qx, &one - qx) } else { (qx - &one, qx.clone()) };
        if lower.as_ref().is_none_or(|l| lo > *l) {
            lower = Some(lo);
        }
        if upper.as_ref().is_none_or(|u| hi < *u) {
            upper = Some(hi);
        }
    }
    let (lower, upper) = (lower.expect("nonempty"), upper.expect("nonempty"));
    if lower > upper {
        return Err(Error::Numeric(format!("empty interval [{lower}, {upper}] for the top coefficient")));
    }
    let top = (&lower + &upper) / Rational::from_integer(BigInt::from(2));
    let values = Outcome::all(n)
        .map(|x| {
            let qx = &q[x.bits() as usize];
            if x.sigma_unchecked(full) > 0 {
                qx + &top
            } else {
                qx - &top
            }
        })
        .collect();
    let joint = JointTable::new(n, values)?;
    Ok(Reconstruction { joint, lower, upper, top_coefficient: top })
}

/// Runs the odd-subset check and attaches a reconstructed joint when it
/// passes.
pub fn decide(f: &MarginalFamily) -> Result<ClassicalVerdict> {
    match reconstruct_joint(f) {
        Ok(r) => Ok(ClassicalVerdict { compatible: true, witness: None, certificate: Some(r.joint) }),
        Err(Error::Incompatible(w)) => Ok(ClassicalVerdict::fail(w)),
        Err(e) => Err(e),
    }
}

impl Witness {
    /// Recomputes the witnessed quantity from the family.
    pub fn reevaluate(&self, f: &MarginalFamily) -> Result<Rational> {
        match self.inequality {
            Inequality::Wigner => {
                pairwise_tables(f)?;
                Ok(wigner_slack(f, self.subset, self.outcome))
            }
            Inequality::OddSubsetSum => Ok(odd_subset_sum(&ProperMarginals::new(f)?, self.subset, self.outcome)),
            Inequality::QRange => q_function(f, self.outcome),
            Inequality::QPairSum => {
                let pm = ProperMarginals::new(f)?;
                Ok(q_on(&pm, self.outcome) + q_on(&pm, self.outcome.flip_unchecked(self.subset)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::MarginalTable;
    use crate::rational::rat;

    fn mask(ix: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(ix).unwrap()
    }

    fn x(v: &[u8]) -> Outcome {
        Outcome::from_values(v).unwrap()
    }

    fn uniform3() -> MarginalFamily {
        MarginalFamily::maximal_from_joint(&JointTable::uniform(3).unwrap()).unwrap()
    }

    fn ghz_joint() -> JointTable {
        JointTable::from_entries(3, [(x(&[0, 0, 0]), rat(1, 2)), (x(&[1, 1, 1]), rat(1, 2))]).unwrap()
    }

    fn ghz3() -> MarginalFamily {
        MarginalFamily::maximal_from_joint(&ghz_joint()).unwrap()
    }

    /// Each pair perfectly anticorrelated: P_ab(01) = P_ab(10) = 1/2.
    fn anticorrelated() -> MarginalFamily {
        // Packed index: bit 0 = smaller member, so 01 (x_a=0, x_b=1) is index 2.
        let t = |a| MarginalTable::new(3, a, alloc::vec![rat(0, 1), rat(1, 2), rat(1, 2), rat(0, 1)]).unwrap();
        MarginalFamily::from_tables(3, [t(mask(&[1, 2])), t(mask(&[1, 3])), t(mask(&[2, 3]))]).unwrap()
    }

    #[test]
    fn wigner_examples() {
        assert!(check_wigner(&uniform3()).unwrap().compatible);
        assert!(check_wigner(&ghz3()).unwrap().compatible);
        let v = check_wigner(&anticorrelated()).unwrap();
        assert!(!v.compatible);
        let w = v.witness.unwrap();
        assert!(w.value.is_negative());
        assert_eq!(w.reevaluate(&anticorrelated()).unwrap(), w.value);
    }

    #[test]
    fn wigner_rejects_wrong_structure() {
        let f = MarginalFamily::from_joint(&ghz_joint(), [mask(&[1, 2])]).unwrap();
        assert!(matches!(check_wigner(&f), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn delta3_examples() {
        for o in Outcome::all(3) {
            assert_eq!(delta3(&uniform3(), o).unwrap(), rat(1, 4));
        }
        assert_eq!(delta3(&ghz3(), x(&[0, 0, 0])).unwrap(), rat(1, 1));
        assert_eq!(delta3(&anticorrelated(), x(&[0, 0, 0])).unwrap(), rat(-1, 2));
    }

    #[test]
    fn delta3_is_pair_of_antipodal_probabilities() {
        let p = JointTable::new(3, [3, 1, 4, 1, 5, 9, 2, 6].iter().map(|k| rat(*k, 31)).collect()).unwrap();
        let f = MarginalFamily::maximal_from_joint(&p).unwrap();
        for o in Outcome::all(3) {
            assert_eq!(delta3(&f, o).unwrap(), p.eval(o) + p.eval(o.flip(SubsetMask::full(3)).unwrap()));
        }
    }

    #[test]
    fn theorem2_full_set_sum_is_delta() {
        let p = JointTable::new(3, [3, 1, 4, 1, 5, 9, 2, 6].iter().map(|k| rat(*k, 31)).collect()).unwrap();
        let f = MarginalFamily::maximal_from_joint(&p).unwrap();
        let pm = ProperMarginals::new(&f).unwrap();
        for o in Outcome::all(3) {
            assert_eq!(odd_subset_sum(&pm, SubsetMask::full(3), o), delta3(&f, o).unwrap());
            // A = {1}: only B = {2,3} contributes.
            assert_eq!(odd_subset_sum(&pm, mask(&[1]), o), *f.get(mask(&[2, 3])).unwrap().eval(o));
        }
    }

    #[test]
    fn theorem2_examples() {
        assert!(check_theorem2(&uniform3()).unwrap().compatible);
        assert!(check_theorem2(&ghz3()).unwrap().compatible);
        let v = check_theorem2(&anticorrelated()).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.inequality, Inequality::OddSubsetSum);
        assert_eq!(w.subset, mask(&[1, 2, 3]));
        assert_eq!(w.outcome, x(&[0, 0, 0]));
        assert_eq!(w.value, rat(-1, 2));
        assert_eq!(w.reevaluate(&anticorrelated()).unwrap(), rat(-1, 2));
    }

    #[test]
    fn theorem2_requires_all_maximal_subsets() {
        let f = MarginalFamily::from_joint(&ghz_joint(), [mask(&[1, 2]), mask(&[1, 3])]).unwrap();
        assert!(matches!(check_theorem2(&f), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn q_function_examples() {
        for o in Outcome::all(3) {
            assert_eq!(q_function(&uniform3(), o).unwrap(), rat(1, 8));
        }
        assert_eq!(q_function(&ghz3(), x(&[0, 0, 0])).unwrap(), rat(1, 2));
    }

    #[test]
    fn q_function_three_variable_expansion() {
        let p = JointTable::new(3, [3, 1, 4, 1, 5, 9, 2, 6].iter().map(|k| rat(*k, 31)).collect()).unwrap();
        let f = MarginalFamily::maximal_from_joint(&p).unwrap();
        for o in Outcome::all(3) {
            let singles: Rational = (1..=3).map(|i| f.derived(SubsetMask::singleton(i)).unwrap().eval(o).clone()).sum();
            let pairs: Rational = f.tables().map(|t| t.eval(o).clone()).sum();
            let expected = rat(1, 8) - singles / rat(4, 1) + pairs / rat(2, 1);
            assert_eq!(q_function(&f, o).unwrap(), expected);
        }
    }

    #[test]
    fn theorem3_examples() {
        assert!(check_theorem3(&uniform3()).unwrap().compatible);
        assert!(check_theorem3(&ghz3()).unwrap().compatible);
        let v = check_theorem3(&anticorrelated()).unwrap();
        let w = v.witness.expect("incompatible");
        assert_eq!(w.reevaluate(&anticorrelated()).unwrap(), w.value);
        assert!(!w.inequality.is_satisfied(&w.value, 3));
    }

    #[test]
    fn reconstruct_uniform() {
        let r = reconstruct_joint(&uniform3()).unwrap();
        assert_eq!(r.lower, rat(-1, 8));
        assert_eq!(r.upper, rat(1, 8));
        assert_eq!(r.top_coefficient, rat(0, 1));
        assert_eq!(r.joint, JointTable::uniform(3).unwrap());
    }

    #[test]
    fn reconstruct_correlated_collapses_interval() {
        let r = reconstruct_joint(&ghz3()).unwrap();
        assert_eq!((r.lower.clone(), r.upper.clone()), (rat(0, 1), rat(0, 1)));
        assert_eq!(r.joint, ghz_joint());
    }

    #[test]
    fn reconstruct_refuses_incompatible() {
        match reconstruct_joint(&anticorrelated()) {
            Err(Error::Incompatible(w)) => {
                assert_eq!(w.subset, mask(&[1, 2, 3]));
                assert_eq!(w.value, rat(-1, 2));
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn single_variable_instance() {
        // n = 1: the only proper subset is ∅, so the family is empty and the
        // reconstruction is the uniform distribution.
        let f = MarginalFamily::new(1).unwrap();
        assert!(check_theorem2(&f).unwrap().compatible);
        assert!(check_theorem3(&f).unwrap().compatible);
        assert_eq!(reconstruct_joint(&f).unwrap().joint, JointTable::uniform(1).unwrap());
    }

    #[test]
    fn decide_attaches_certificate() {
        let v = decide(&ghz3()).unwrap();
        assert_eq!(v.certificate, Some(ghz_joint()));
        let v = decide(&anticorrelated()).unwrap();
        assert!(!v.compatible && v.certificate.is_none() && v.witness.is_some());
    }
}
