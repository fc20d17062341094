use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num::{One, Signed, Zero};

use super::Rat;

/// Exponent vector of a monomial.
pub type Exp = Vec<u16>;

/// Degree-reverse-lexicographic comparison with x_n > ... > x_1.
pub fn cmp_exp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

/// Sparse multivariate polynomial over Q in `n` variables.
///
/// Terms are kept sorted with the leading monomial first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    n: usize,
    terms: Vec<(Exp, Rat)>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: Vec::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rat::one())
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        if c.is_zero() {
            return Self::zero(n);
        }
        Poly {
            n,
            terms: vec![(vec![0; n], c)],
        }
    }

    /// The variable x^i, with `i` counted from 1.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "variable index {i} out of range 1..={n}");
        let mut e = vec![0; n];
        e[i - 1] = 1;
        Poly {
            n,
            terms: vec![(e, Rat::one())],
        }
    }

    pub fn monomial(exp: Exp, c: Rat) -> Self {
        let n = exp.len();
        if c.is_zero() {
            return Self::zero(n);
        }
        Poly {
            n,
            terms: vec![(exp, c)],
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exp, Rat)>) -> Self {
        let mut acc: HashMap<Exp, Rat> = HashMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent length mismatch");
            *acc.entry(e).or_insert_with(Rat::zero) += c;
        }
        let mut terms: Vec<(Exp, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| cmp_exp(&b.0, &a.0));
        Poly { n, terms }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Exp, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.terms[0].1.is_one()
    }

    /// Constant value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.is_zero() {
            Some(Rat::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading_coeff(&self) -> Rat {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(e, _)| e.iter().map(|&x| x as u32).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    fn check(&self, other: &Poly) {
        assert_eq!(self.n, other.n, "polynomials from different contexts");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match cmp_exp(&self.terms[i].0, &other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly {
            n: self.n,
            terms: out,
        }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.n);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut acc: HashMap<Exp, Rat> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exp = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        let mut terms: Vec<(Exp, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| cmp_exp(&b.0, &a.0));
        Poly { n: self.n, terms }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to x^i (1-based).
    pub fn derive(&self, i: usize) -> Poly {
        assert!(i >= 1 && i <= self.n, "axis {i} out of range");
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i - 1] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                let k = e2[i - 1];
                e2[i - 1] -= 1;
                (e2, c * Rat::from_integer(k.into()))
            })
            .collect::<Vec<_>>();
        Poly::from_terms(self.n, terms)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&lc.recip())
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        self.check(d);
        assert!(!d.is_zero(), "division by zero polynomial");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (de, dc) = &d.terms[0];
        let mut r = self.clone();
        let mut q: Vec<(Exp, Rat)> = Vec::new();
        while !r.is_zero() {
            let (re, rc) = &r.terms[0];
            if re.iter().zip(de).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exp = re.iter().zip(de).map(|(a, b)| a - b).collect();
            let c = rc / dc;
            r = r.sub(&d.mul(&Poly::monomial(e.clone(), c.clone())));
            q.push((e, c));
        }
        Some(Poly::from_terms(self.n, q))
    }

    /// Embeds into a context with `n2 >= n` variables, the new ones appended last.
    pub fn extend(&self, n2: usize) -> Poly {
        assert!(n2 >= self.n);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                e2.resize(n2, 0);
                (e2, c.clone())
            })
            .collect::<Vec<_>>();
        Poly::from_terms(n2, terms)
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            s += t;
        }
        s
    }

    /// Substitutes x^i := images[i-1] for every variable.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.n);
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(self.n, c.clone());
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&img.pow(k as u32));
                }
            }
            out = out.add(&t);
        }
        out
    }

    fn degree_in(&self, v: usize) -> u16 {
        self.terms.iter().map(|(e, _)| e[v]).max().unwrap_or(0)
    }

    fn max_var(&self) -> Option<usize> {
        (0..self.n)
            .rev()
            .find(|&v| self.terms.iter().any(|(e, _)| e[v] > 0))
    }

    /// Coefficients as a polynomial in the 0-based variable `v`.
    fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Exp, Rat)>> = vec![Vec::new(); d + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[v] as usize;
            e2[v] = 0;
            buckets[k].push((e2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|t| Poly::from_terms(self.n, t))
            .collect()
    }

    fn from_coeffs_in(n: usize, v: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, p) in coeffs.iter().enumerate() {
            for (e, c) in &p.terms {
                let mut e2 = e.clone();
                e2[v] += k as u16;
                terms.push((e2, c.clone()));
            }
        }
        Poly::from_terms(n, terms)
    }

    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.n);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, v: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }
}

fn prem_in(f: &Poly, g: &Poly, v: usize) -> Poly {
    let n = f.n;
    let gc = g.coeffs_in(v);
    let dg = gc.len() - 1;
    let lg = gc[dg].clone();
    let mut r = f.coeffs_in(v);
    while r.len() > dg && !r.iter().all(|c| c.is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - dg;
        let mut next: Vec<Poly> = r.iter().map(|c| c.mul(&lg)).collect();
        for (k, gk) in gc.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&gk.mul(&lr));
        }
        while next.len() > 1 && next.last().unwrap().is_zero() {
            next.pop();
        }
        if next.len() == 1 && next[0].is_zero() {
            return Poly::zero(n);
        }
        r = next;
    }
    Poly::from_coeffs_in(n, v, &r)
}

/// Dense coefficients, lowest degree first, of `p` with every variable
/// except `v` replaced by `pt`.
fn specialize(p: &Poly, v: usize, pt: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); p.degree_in(v) as usize + 1];
    for (e, c) in &p.terms {
        let mut t = c.clone();
        for (j, &k) in e.iter().enumerate() {
            if j != v && k > 0 {
                t *= num::pow(pt[j].clone(), k as usize);
            }
        }
        out[e[v] as usize] += t;
    }
    out
}

fn trim(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<Rat>, mut b: Vec<Rat>) -> usize {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !(b.len() == 1 && b[0].is_zero()) {
        let lb = b.last().unwrap().clone();
        while a.len() >= b.len() && !(a.len() == 1 && a[0].is_zero()) {
            let shift = a.len() - b.len();
            let f = a.last().unwrap() / &lb;
            for (k, bk) in b.iter().enumerate() {
                a[k + shift] -= &f * bk;
            }
            a.pop();
            if a.is_empty() {
                a.push(Rat::zero());
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() - 1
}

/// Sufficient test for a constant gcd: for each variable shared by both,
/// the univariate gcd at a point keeping both leading coefficients nonzero
/// bounds the degree of the true gcd in that variable.
fn coprime_by_specialization(a: &Poly, b: &Poly) -> bool {
    let n = a.n;
    let pt: Vec<Rat> = (0..n)
        .map(|j| Rat::from_integer((2 * j as i64 + 3).into()))
        .collect();
    for v in 0..n {
        let (da, db) = (a.degree_in(v), b.degree_in(v));
        if da == 0 || db == 0 {
            continue;
        }
        let sa = specialize(a, v, &pt);
        let sb = specialize(b, v, &pt);
        if sa[da as usize].is_zero() || sb[db as usize].is_zero() {
            return false;
        }
        if univariate_gcd_degree(sa, sb) > 0 {
            return false;
        }
    }
    true
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    a.check(b);
    let n = a.n;
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    let v = match (a.max_var(), b.max_var()) {
        (Some(x), Some(y)) => x.max(y),
        _ => return Poly::one(n),
    };
    if coprime_by_specialization(a, b) {
        return Poly::one(n);
    }
    let da = a.degree_in(v);
    let db = b.degree_in(v);
    if da == 0 {
        return gcd(a, &b.content_in(v));
    }
    if db == 0 {
        return gcd(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let c = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    while !g.is_zero() {
        if g.degree_in(v) == 0 {
            f = Poly::one(n);
            break;
        }
        let r = prem_in(&f, &g, v);
        f = g;
        g = r.primitive_in(v).monic();
    }
    c.mul(&f.primitive_in(v)).monic()
}

fn write_rat(f: &mut fmt::Formatter<'_>, c: &Rat) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let is_const = e.iter().all(|&k| k == 0);
            let mut first = true;
            if is_const || !a.is_one() {
                write_rat(f, &a)?;
                first = false;
            }
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "x{}", i + 1)?;
                if k > 1 {
                    write!(f, "^{k}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn c(n: usize, v: i64) -> Poly {
        Poly::constant(n, Rat::from_integer(v.into()))
    }

    #[test]
    fn order_is_degrevlex_with_last_variable_largest() {
        assert_eq!(cmp_exp(&[0, 1], &[1, 0]), Ordering::Greater);
        assert_eq!(cmp_exp(&[2, 0], &[0, 1]), Ordering::Greater);
        assert_eq!(cmp_exp(&[1, 1, 0], &[0, 0, 2]), Ordering::Less);
    }

    #[test]
    fn gcd_cancels_common_factor() {
        let n = 2;
        let f = x(n, 1).mul(&x(n, 1)).sub(&c(n, 1));
        let g = x(n, 1).sub(&c(n, 1));
        assert_eq!(gcd(&f, &g), g);
        let a = x(n, 1)
            .mul(&x(n, 2))
            .add(&c(n, 3))
            .mul(&x(n, 2).sub(&x(n, 1)));
        let b = x(n, 1)
            .mul(&x(n, 2))
            .add(&c(n, 3))
            .mul(&x(n, 2).add(&c(n, 2)));
        assert_eq!(gcd(&a, &b), x(n, 1).mul(&x(n, 2)).add(&c(n, 3)));
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let n = 3;
        let a = x(n, 1).add(&x(n, 3));
        let b = x(n, 2).mul(&x(n, 3)).add(&c(n, 1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn exact_division() {
        let n = 2;
        let a = x(n, 1).add(&x(n, 2));
        let b = x(n, 1).sub(&c(n, 2));
        assert_eq!(a.mul(&b).div_exact(&b), Some(a.clone()));
        assert_eq!(a.div_exact(&b), None);
    }

    #[test]
    fn display() {
        let n = 2;
        let p = x(n, 2)
            .mul(&x(n, 2))
            .scale(&Rat::new(3.into(), 2.into()))
            .sub(&x(n, 1))
            .add(&c(n, 1));
        assert_eq!(p.to_string(), "3/2*x2^2 - x1 + 1");
    }
}
