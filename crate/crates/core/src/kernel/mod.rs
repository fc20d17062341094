//! Exact arithmetic: rationals, polynomials, the rational-function field and multi-indices.

mod multi_index;
mod poly;
mod ratfunc;

pub use multi_index::{binomial, MultiIndex};
pub use poly::{cmp_exp, gcd, Exp, Poly};
pub use ratfunc::RatFunc;

/// Arbitrary-precision rational number.
pub type Rat = num::BigRational;

/// Builds a rational from an integer.
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

pub fn normalize(num: Poly, den: Poly) -> crate::Result<RatFunc> {
    RatFunc::normalize(num, den)
}

pub fn derive(i: usize, f: &RatFunc) -> RatFunc {
    f.derive(i)
}

pub fn class_of(mu: &MultiIndex) -> crate::Result<usize> {
    mu.class()
}
