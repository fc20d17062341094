use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::{One, Zero};

use super::poly::{gcd, Poly};
use super::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Repr {
    Const(Rat),
    Frac(Box<(Poly, Poly)>),
}

/// Element of the rational-function field Q(x^1, ..., x^n).
///
/// Constants carry no context and combine with values of any `n`;
/// non-constant values always carry their own `n`.
#[derive(Clone, Debug)]
pub struct RatFunc {
    repr: Repr,
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Const(a), Repr::Const(b)) => a == b,
            (Repr::Frac(a), Repr::Frac(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for RatFunc {}

impl Hash for RatFunc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.repr {
            Repr::Const(c) => {
                0u8.hash(state);
                c.hash(state)
            }
            Repr::Frac(b) => {
                1u8.hash(state);
                b.hash(state)
            }
        }
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            repr: Repr::Const(Rat::zero()),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            repr: Repr::Const(Rat::one()),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc {
            repr: Repr::Const(c),
        }
    }

    pub fn int(v: i64) -> Self {
        RatFunc::constant(Rat::from_integer(v.into()))
    }

    pub fn frac(p: i64, q: i64) -> Self {
        RatFunc::constant(Rat::new(p.into(), q.into()))
    }

    /// The coordinate function x^i in `n` variables.
    pub fn var(n: usize, i: usize) -> Self {
        RatFunc::from_poly(Poly::var(n, i))
    }

    pub fn from_poly(p: Poly) -> Self {
        match p.as_constant() {
            Some(c) => RatFunc::constant(c),
            None => {
                let n = p.nvars();
                RatFunc {
                    repr: Repr::Frac(Box::new((p, Poly::one(n)))),
                }
            }
        }
    }

    /// Canonical representative of `num / den`.
    pub fn normalize(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Malformed("zero denominator".into()));
        }
        if num.nvars() != den.nvars() {
            return Err(Error::ContextMismatch("numerator and denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = den.as_constant() {
            return RatFunc::from_poly(num.scale(&c.recip()));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        let lc = den.leading_coeff();
        let (num, den) = if lc.is_one() {
            (num, den)
        } else {
            let r = lc.recip();
            (num.scale(&r), den.scale(&r))
        };
        if den.is_one() {
            return RatFunc::from_poly(num);
        }
        RatFunc {
            repr: Repr::Frac(Box::new((num, den))),
        }
    }

    /// Context size, or `None` for constants.
    pub fn nvars(&self) -> Option<usize> {
        match &self.repr {
            Repr::Const(_) => None,
            Repr::Frac(b) => Some(b.0.nvars()),
        }
    }

    pub fn num(&self, n: usize) -> Poly {
        match &self.repr {
            Repr::Const(c) => Poly::constant(n, c.clone()),
            Repr::Frac(b) => b.0.clone(),
        }
    }

    pub fn den(&self, n: usize) -> Poly {
        match &self.repr {
            Repr::Const(_) => Poly::one(n),
            Repr::Frac(b) => b.1.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.repr, Repr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.repr, Repr::Const(c) if c.is_one())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match &self.repr {
            Repr::Const(c) => Some(c),
            Repr::Frac(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.repr, Repr::Const(_))
    }

    pub fn is_polynomial(&self) -> bool {
        match &self.repr {
            Repr::Const(_) => true,
            Repr::Frac(b) => b.1.is_one(),
        }
    }

    fn ctx(a: &RatFunc, b: &RatFunc) -> usize {
        match (a.nvars(), b.nvars()) {
            (Some(x), Some(y)) => {
                assert_eq!(x, y, "rational functions from different contexts");
                x
            }
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => 0,
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        match (&self.repr, &other.repr) {
            (Repr::Const(a), Repr::Const(b)) => RatFunc::constant(a + b),
            (Repr::Const(c), Repr::Frac(f)) | (Repr::Frac(f), Repr::Const(c)) => {
                if c.is_zero() {
                    return RatFunc {
                        repr: Repr::Frac(f.clone()),
                    };
                }
                let num = f.0.add(&f.1.scale(c));
                Self::from_parts_reduced(num, f.1.clone())
            }
            (Repr::Frac(a), Repr::Frac(b)) => {
                Self::ctx(self, other);
                if a.1 == b.1 {
                    return Self::normalized(a.0.add(&b.0), a.1.clone());
                }
                if a.1.is_one() {
                    return Self::from_parts_reduced(b.0.add(&a.0.mul(&b.1)), b.1.clone());
                }
                if b.1.is_one() {
                    return Self::from_parts_reduced(a.0.add(&b.0.mul(&a.1)), a.1.clone());
                }
                Self::normalized(a.0.mul(&b.1).add(&b.0.mul(&a.1)), a.1.mul(&b.1))
            }
        }
    }

    /// Builds `num/den` when the pair is already coprime with monic `den`.
    fn from_parts_reduced(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.is_one() {
            return RatFunc::from_poly(num);
        }
        RatFunc {
            repr: Repr::Frac(Box::new((num, den))),
        }
    }

    pub fn neg(&self) -> RatFunc {
        match &self.repr {
            Repr::Const(c) => RatFunc::constant(-c),
            Repr::Frac(b) => RatFunc {
                repr: Repr::Frac(Box::new((b.0.neg(), b.1.clone()))),
            },
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        match &self.repr {
            Repr::Const(a) => RatFunc::constant(a * c),
            Repr::Frac(b) => RatFunc {
                repr: Repr::Frac(Box::new((b.0.scale(c), b.1.clone()))),
            },
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        match (&self.repr, &other.repr) {
            (Repr::Const(a), Repr::Const(b)) => RatFunc::constant(a * b),
            (Repr::Const(c), _) => other.scale(c),
            (_, Repr::Const(c)) => self.scale(c),
            (Repr::Frac(a), Repr::Frac(b)) => {
                if a.1.is_one() && b.1.is_one() {
                    return RatFunc::from_poly(a.0.mul(&b.0));
                }
                let g1 = gcd(&a.0, &b.1);
                let g2 = gcd(&b.0, &a.1);
                let an = a.0.div_exact(&g1).expect("gcd divides");
                let bd = b.1.div_exact(&g1).expect("gcd divides");
                let bn = b.0.div_exact(&g2).expect("gcd divides");
                let ad = a.1.div_exact(&g2).expect("gcd divides");
                let num = an.mul(&bn);
                let den = ad.mul(&bd);
                let lc = den.leading_coeff();
                let r = lc.recip();
                Self::from_parts_reduced(num.scale(&r), den.scale(&r))
            }
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        match &self.repr {
            Repr::Const(c) => {
                if c.is_zero() {
                    Err(Error::Malformed("inverse of zero".into()))
                } else {
                    Ok(RatFunc::constant(c.recip()))
                }
            }
            Repr::Frac(b) => {
                let lc = b.0.leading_coeff().recip();
                Ok(Self::from_parts_reduced(b.1.scale(&lc), b.0.scale(&lc)))
            }
        }
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.inv()?))
    }

    /// Partial derivative with respect to x^i (1-based).
    pub fn derive(&self, i: usize) -> RatFunc {
        match &self.repr {
            Repr::Const(_) => RatFunc::zero(),
            Repr::Frac(b) => {
                let (p, q) = (&b.0, &b.1);
                if q.is_one() {
                    return RatFunc::from_poly(p.derive(i));
                }
                let num = p.derive(i).mul(q).sub(&p.mul(&q.derive(i)));
                Self::normalized(num, q.mul(q))
            }
        }
    }

    /// Value at a rational point; `None` at a pole.
    pub fn eval(&self, x: &[Rat]) -> Option<Rat> {
        match &self.repr {
            Repr::Const(c) => Some(c.clone()),
            Repr::Frac(b) => {
                let d = b.1.eval(x);
                if d.is_zero() {
                    None
                } else {
                    Some(b.0.eval(x) / d)
                }
            }
        }
    }

    /// Substitutes every variable by a polynomial in the same context.
    pub fn substitute(&self, images: &[Poly]) -> RatFunc {
        match &self.repr {
            Repr::Const(_) => self.clone(),
            Repr::Frac(b) => Self::normalized(b.0.substitute(images), b.1.substitute(images)),
        }
    }

    /// Embeds into a context with more variables.
    pub fn extend(&self, n2: usize) -> RatFunc {
        match &self.repr {
            Repr::Const(_) => self.clone(),
            Repr::Frac(b) => RatFunc {
                repr: Repr::Frac(Box::new((b.0.extend(n2), b.1.extend(n2)))),
            },
        }
    }

    /// Total degree of numerator plus denominator, a crude size measure.
    pub fn weight(&self) -> u32 {
        match &self.repr {
            Repr::Const(_) => 0,
            Repr::Frac(b) => b.0.total_degree() + b.1.total_degree(),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Const(c) => {
                if c.denom().is_one() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "{}/{}", c.numer(), c.denom())
                }
            }
            Repr::Frac(b) => {
                if b.1.is_one() {
                    write!(f, "{}", b.0)
                } else {
                    let l = b.0.terms().iter().fold(num::BigInt::one(), |acc, (_, c)| {
                        num::Integer::lcm(&acc, c.denom())
                    });
                    let s = Rat::from_integer(l);
                    let (p, q) = (b.0.scale(&s), b.1.scale(&s));
                    if p.terms().len() > 1 {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                    let qs = q.to_string();
                    if qs.contains([' ', '*']) {
                        write!(f, "/({qs})")
                    } else {
                        write!(f, "/{qs}")
                    }
                }
            }
        }
    }
}

impl From<Rat> for RatFunc {
    fn from(c: Rat) -> Self {
        RatFunc::constant(c)
    }
}

impl From<i64> for RatFunc {
    fn from(v: i64) -> Self {
        RatFunc::int(v)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::add(self, rhs)
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::sub(self, rhs)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::mul(self, rhs)
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::div(self, rhs).expect("division by zero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(self)
    }
}
