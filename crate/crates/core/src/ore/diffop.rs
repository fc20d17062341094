use std::collections::BTreeMap;
use std::fmt;

use num::Signed;

use crate::kernel::{rat, MultiIndex, RatFunc};

/// Scalar operator Σ a^μ d_μ with coefficients standing to the left.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOp {
    n: usize,
    terms: BTreeMap<MultiIndex, RatFunc>,
}

/// Applies ∂^μ to a coefficient.
pub fn derive_multi(f: &RatFunc, mu: &MultiIndex) -> RatFunc {
    let mut g = f.clone();
    for a in mu.axes() {
        if g.is_zero() {
            break;
        }
        g = g.derive(a);
    }
    g
}

impl DiffOp {
    pub fn zero(n: usize) -> Self {
        DiffOp {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::coeff(n, RatFunc::one())
    }

    /// Multiplication operator by `f`.
    pub fn coeff(n: usize, f: RatFunc) -> Self {
        Self::term(MultiIndex::zero(n), f)
    }

    /// d_μ for the listed 1-based axes.
    pub fn d(n: usize, axes: &[usize]) -> Self {
        Self::term(MultiIndex::from_axes(n, axes), RatFunc::one())
    }

    pub fn term(mu: MultiIndex, f: RatFunc) -> Self {
        let n = mu.n();
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(mu, f);
        }
        DiffOp { n, terms }
    }

    pub fn from_terms(n: usize, it: impl IntoIterator<Item = (MultiIndex, RatFunc)>) -> Self {
        let mut op = DiffOp::zero(n);
        for (mu, f) in it {
            op.add_term(mu, &f);
        }
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &RatFunc)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mu: &MultiIndex) -> RatFunc {
        self.terms.get(mu).cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest |μ| present; 0 for the zero operator.
    pub fn order(&self) -> usize {
        self.terms.keys().map(|m| m.order()).max().unwrap_or(0)
    }

    /// Leading term under the term order on multi-indices.
    pub fn leading(&self) -> Option<(&MultiIndex, &RatFunc)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, mu: MultiIndex, f: &RatFunc) {
        assert_eq!(mu.n(), self.n, "operator context mismatch");
        if f.is_zero() {
            return;
        }
        let entry = self.terms.entry(mu);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(f.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(f);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.n, other.n, "operator context mismatch");
        let mut out = self.clone();
        for (mu, f) in &other.terms {
            out.add_term(mu.clone(), f);
        }
        out
    }

    pub fn neg(&self) -> DiffOp {
        DiffOp {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, f)| (m.clone(), f.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.neg())
    }

    /// Left multiplication by a coefficient, f·P.
    pub fn scale(&self, f: &RatFunc) -> DiffOp {
        if f.is_zero() {
            return DiffOp::zero(self.n);
        }
        let mut out = DiffOp::zero(self.n);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &f.mul(a));
        }
        out
    }

    /// Normal form of d_μ ∘ a, via Σ_ν binom(μ,ν) (∂^{μ−ν} a) d_ν.
    pub fn leibniz(mu: &MultiIndex, a: &RatFunc) -> DiffOp {
        let n = mu.n();
        let mut out = DiffOp::zero(n);
        if a.is_zero() {
            return out;
        }
        if a.is_constant() {
            out.add_term(mu.clone(), a);
            return out;
        }
        for nu in mu.divisors() {
            let rest = mu.minus(&nu).expect("divisor");
            let c = derive_multi(a, &rest);
            if c.is_zero() {
                continue;
            }
            let b = mu.binom(&nu);
            out.add_term(nu, &c.scale(&rat(b as i64)));
        }
        out
    }

    /// Composition self ∘ other in normal form.
    pub fn mul(&self, other: &DiffOp) -> DiffOp {
        assert_eq!(self.n, other.n, "operator context mismatch");
        let mut out = DiffOp::zero(self.n);
        for (mu, a) in &self.terms {
            for (nu, b) in &other.terms {
                for (lam, c) in &Self::leibniz(mu, b).terms {
                    out.add_term(lam.plus(nu), &a.mul(c));
                }
            }
        }
        out
    }

    /// Formal adjoint Σ (−1)^{|μ|} d_μ ∘ a^μ.
    pub fn adjoint(&self) -> DiffOp {
        let mut out = DiffOp::zero(self.n);
        for (mu, a) in &self.terms {
            let sign = if mu.order() % 2 == 0 { 1 } else { -1 };
            for (nu, c) in &Self::leibniz(mu, a).terms {
                out.add_term(nu.clone(), &c.scale(&rat(sign)));
            }
        }
        out
    }

    /// Action on a function: Σ a^μ ∂^μ f.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut s = RatFunc::zero();
        for (mu, a) in &self.terms {
            s = s.add(&a.mul(&derive_multi(f, mu)));
        }
        s
    }

    /// Order-q part evaluated at a covector, Σ_{|μ|=q} a^μ χ^μ.
    pub fn symbol_at(&self, q: usize, chi: &[RatFunc]) -> RatFunc {
        let mut s = RatFunc::zero();
        for (mu, a) in &self.terms {
            if mu.order() != q {
                continue;
            }
            let mut t = a.clone();
            for (i, &e) in mu.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&chi[i]);
                }
            }
            s = s.add(&t);
        }
        s
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc) -> DiffOp {
        let mut out = DiffOp::zero(self.n);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &f(a));
        }
        out
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (mu, a)) in self.terms.iter().rev().enumerate() {
            let s = a.to_string();
            let (neg, body) = match a.as_rat() {
                Some(c) if c.is_negative() => (true, (-c.clone()).to_string()),
                Some(_) => (false, s.clone()),
                None => match s.strip_prefix('-') {
                    Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                    _ => (false, s.clone()),
                },
            };
            let compound = !a.is_constant() && (body.contains(' ') || body.contains('/'));
            let body = if compound { format!("({body})") } else { body };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            if mu.is_zero() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "d{mu}")?;
            } else {
                write!(f, "{body}*d{mu}")?;
            }
        }
        Ok(())
    }
}
