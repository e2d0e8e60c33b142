use core::fmt;

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest number of binary variables (or qubits) a mask can address.
pub const MAX_VARS: usize = 24;

/// A subset of `{1, …, n}` stored as a bit mask; element `i` is bit `i - 1`.
///
/// The derived ordering is by mask value, which is the iteration order used
/// whenever a first violated inequality is reported.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub fn from_bits(bits: u32) -> Self {
        SubsetMask(bits)
    }

    /// The whole index set `{1, …, n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VARS);
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    /// Builds a mask from 1-based indices. Duplicates and indices outside
    /// `1..=MAX_VARS` are rejected.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > MAX_VARS {
                return Err(Error::input(alloc::format!("index {i} out of range")));
            }
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return Err(Error::input(alloc::format!("duplicate index {i}")));
            }
            bits |= b;
        }
        Ok(SubsetMask(bits))
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!((1..=MAX_VARS).contains(&i));
        SubsetMask(1 << (i - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_VARS).contains(&i) && self.0 & (1 << (i - 1)) != 0
    }

    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    /// Proper subset.
    pub fn is_strict_subset_of(self, other: SubsetMask) -> bool {
        self.is_subset_of(other) && self != other
    }

    pub fn union(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 | other.0)
    }

    pub fn intersection(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & other.0)
    }

    pub fn difference(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    /// Complement within `{1, …, n}`.
    pub fn complement(self, n: usize) -> Self {
        SubsetMask::full(n).difference(self)
    }

    /// Largest index in the set, or 0 when empty.
    pub fn max_index(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// Member indices, ascending.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |b| bits & (1 << b) != 0).map(|b| b + 1)
    }

    /// All subsets of `self`, by ascending mask value (includes `∅` and `self`).
    pub fn subsets(self) -> impl Iterator<Item = SubsetMask> {
        let full = self.0;
        let mut next = Some(0u32);
        core::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
            Some(SubsetMask(cur))
        })
    }

    /// All subsets of `{1, …, n}` by ascending mask value.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..(1u32 << n)).map(SubsetMask)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.indices().collect()
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// An assignment `x = (x_1, …, x_n)` of binary values.
///
/// Stored with the same layout as [`SubsetMask`]: `x_i` is bit `i - 1`.
/// This makes `σ_A(x)` a parity of `A ∩ x` and a bit flip an xor.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome {
    bits: u32,
    n: u8,
}

impl Outcome {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::input(alloc::format!("{n} variables exceeds the limit of {MAX_VARS}")));
        }
        if n < 32 && bits >> n != 0 {
            return Err(Error::input(alloc::format!("outcome bits {bits:#b} do not fit in {n} variables")));
        }
        Ok(Outcome { bits, n: n as u8 })
    }

    /// From `[x_1, …, x_n]`, each entry 0 or 1.
    pub fn from_values(values: &[u8]) -> Result<Self> {
        let mut bits = 0;
        for (k, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 => bits |= 1 << k,
                _ => return Err(Error::input(alloc::format!("outcome entry {v} is not binary"))),
            }
        }
        Outcome::new(values.len(), bits)
    }

    pub(crate) fn from_raw(n: usize, bits: u32) -> Self {
        Outcome { bits, n: n as u8 }
    }

    /// All `2^n` outcomes by ascending internal value.
    pub fn all(n: usize) -> impl Iterator<Item = Outcome> {
        (0..(1u32 << n)).map(move |b| Outcome::from_raw(n, b))
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// `x_i` for 1-based `i`.
    pub fn get(self, i: usize) -> u8 {
        ((self.bits >> (i - 1)) & 1) as u8
    }

    pub fn values(self) -> Vec<u8> {
        (1..=self.n()).map(|i| self.get(i)).collect()
    }

    /// `σ_A(x) = ∏_{i∈A} (-1)^{x_i}`; `+1` for `A = ∅`.
    pub fn sigma(self, a: SubsetMask) -> Result<i8> {
        if a.max_index() > self.n() {
            return Err(Error::input(alloc::format!("subset {a} not inside 1..={}", self.n)));
        }
        Ok(self.sigma_unchecked(a))
    }

    pub(crate) fn sigma_unchecked(self, a: SubsetMask) -> i8 {
        if (self.bits & a.bits()).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Complements every `x_i` with `i ∈ A`.
    pub fn flip(self, a: SubsetMask) -> Result<Self> {
        if a.max_index() > self.n() {
            return Err(Error::input(alloc::format!("subset {a} not inside 1..={}", self.n)));
        }
        Ok(self.flip_unchecked(a))
    }

    pub(crate) fn flip_unchecked(self, a: SubsetMask) -> Self {
        Outcome { bits: self.bits ^ a.bits(), n: self.n }
    }
}

impl fmt::Debug for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Written as the bitstring `x_1 x_2 … x_n`.
impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n() {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

/// Packs the bits of `x` selected by `a` into a dense index: the `k`-th
/// smallest member of `a` becomes bit `k`.
pub(crate) fn extract_bits(x: u32, a: u32) -> usize {
    let mut out = 0usize;
    let mut k = 0;
    let mut m = a;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if x & low != 0 {
            out |= 1 << k;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

/// Inverse of [`extract_bits`]: scatters the low bits of `idx` onto the
/// members of `a`.
pub(crate) fn deposit_bits(idx: usize, a: u32) -> u32 {
    let mut out = 0u32;
    let mut k = 0;
    let mut m = a;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if idx & (1 << k) != 0 {
            out |= low;
        }
        k += 1;
        m &= m - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(ix: &[usize]) -> SubsetMask {
        SubsetMask::from_indices(ix).unwrap()
    }

    fn x(v: &[u8]) -> Outcome {
        Outcome::from_values(v).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(x(&[0, 1, 1]).sigma(SubsetMask::EMPTY).unwrap(), 1);
        assert_eq!(x(&[1, 1, 1]).sigma(mask(&[1, 2, 3])).unwrap(), -1);
        assert_eq!(x(&[1, 0, 1]).sigma(mask(&[1, 3])).unwrap(), 1);
    }

    #[test]
    fn sigma_rejects_out_of_range_subset() {
        assert!(x(&[0, 1]).sigma(mask(&[3])).is_err());
    }

    #[test]
    fn flip_examples() {
        assert_eq!(x(&[0, 1]).flip(mask(&[1])).unwrap(), x(&[1, 1]));
        assert_eq!(x(&[0, 1]).flip(SubsetMask::EMPTY).unwrap(), x(&[0, 1]));
        assert_eq!(x(&[0, 0, 0]).flip(mask(&[1, 2, 3])).unwrap(), x(&[1, 1, 1]));
    }

    #[test]
    fn flip_is_an_involution() {
        for a in SubsetMask::all(4) {
            for o in Outcome::all(4) {
                assert_eq!(o.flip(a).unwrap().flip(a).unwrap(), o);
            }
        }
    }

    #[test]
    fn mask_construction_errors() {
        assert!(SubsetMask::from_indices(&[0]).is_err());
        assert!(SubsetMask::from_indices(&[2, 2]).is_err());
        assert!(Outcome::from_values(&[0, 2]).is_err());
    }

    #[test]
    fn subsets_enumeration() {
        let a = mask(&[1, 3]);
        let subs: Vec<_> = a.subsets().collect();
        assert_eq!(subs, [SubsetMask::EMPTY, mask(&[1]), mask(&[3]), a]);
        assert_eq!(SubsetMask::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn bit_packing_round_trip() {
        let a = 0b1011_0100;
        for idx in 0..16 {
            let x = deposit_bits(idx, a);
            assert_eq!(x & !a, 0);
            assert_eq!(extract_bits(x, a), idx);
        }
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", mask(&[1, 3])), "{1,3}");
        assert_eq!(alloc::format!("{}", x(&[1, 0, 1, 1])), "1011");
    }
}
