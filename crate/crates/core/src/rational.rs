use num_bigint::BigInt;
use num_rational::BigRational;

/// Exact rational number used by the classical side.
pub type Rational = BigRational;

/// Shorthand for `p / q` as a [`Rational`]. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `2^-k` exactly.
pub(crate) fn pow2_inv(k: usize) -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(1) << k)
}

/// `2^k` exactly.
pub(crate) fn pow2(k: usize) -> Rational {
    Rational::from_integer(BigInt::from(1) << k)
}
