use std::collections::HashMap;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{MultiIndex, Poly, Rat, RatFunc};
use crate::linalg::{Key, SVec};

use super::key::{decode, jet_key};

/// Linear change of independent variables x = A·x′.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordChange {
    a: Vec<Vec<Rat>>,
    inv: Vec<Vec<Rat>>,
}

/// Inverse of a square rational matrix, if it exists.
pub fn invert(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in 0..2 * n {
                    let t = &m[c][j] * &f;
                    m[r][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl CoordChange {
    pub fn identity(n: usize) -> Self {
        let a: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        CoordChange { inv: a.clone(), a }
    }

    /// New coordinate j is old coordinate `p[j]` (1-based entries).
    pub fn permutation(p: &[usize]) -> Self {
        let n = p.len();
        let mut a = vec![vec![Rat::zero(); n]; n];
        for (j, &i) in p.iter().enumerate() {
            a[i - 1][j] = Rat::one();
        }
        Self::from_matrix(a).expect("permutation matrices are invertible")
    }

    pub fn from_matrix(a: Vec<Vec<Rat>>) -> Result<Self> {
        let inv =
            invert(&a).ok_or_else(|| Error::Malformed("singular coordinate change".into()))?;
        Ok(CoordChange { a, inv })
    }

    pub fn matrix(&self) -> &[Vec<Rat>] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.a.len())
    }

    /// c(x) rewritten as c(A·x′).
    pub fn transform_coeff(&self, c: &RatFunc) -> RatFunc {
        if c.is_constant() {
            return c.clone();
        }
        let n = self.n();
        let images: Vec<Poly> = (0..n)
            .map(|i| {
                let mut p = Poly::zero(n);
                for j in 0..n {
                    p = p.add(&Poly::var(n, j + 1).scale(&self.a[i][j]));
                }
                p
            })
            .collect();
        c.substitute(&images)
    }

    /// d_μ in the old coordinates as a combination of new derivatives.
    fn expand(&self, mu: &MultiIndex) -> Vec<(MultiIndex, Rat)> {
        let n = self.n();
        let mut p = Poly::one(n);
        for (i, &e) in mu.0.iter().enumerate() {
            let mut lin = Poly::zero(n);
            for j in 0..n {
                lin = lin.add(&Poly::var(n, j + 1).scale(&self.inv[j][i]));
            }
            p = p.mul(&lin.pow(e as u32));
        }
        p.terms()
            .iter()
            .map(|(e, c)| (MultiIndex(e.clone()), c.clone()))
            .collect()
    }

    /// Rewrites jet forms in the new coordinates. With `coeffs` false the
    /// coefficients are left as they are, which suffices for rank and
    /// leader computations.
    pub fn transform_forms(&self, forms: &[SVec], coeffs: bool) -> Vec<SVec> {
        let n = self.n();
        let mut cache: HashMap<MultiIndex, Vec<(MultiIndex, Rat)>> = HashMap::new();
        forms
            .iter()
            .map(|v| {
                let mut out: Vec<(Key, RatFunc)> = Vec::new();
                for (key, c) in v.entries() {
                    let (k, mu) = decode(*key, n);
                    let c2 = if coeffs {
                        self.transform_coeff(c)
                    } else {
                        c.clone()
                    };
                    let exp = cache.entry(mu.clone()).or_insert_with(|| self.expand(&mu));
                    for (nu, r) in exp.iter() {
                        out.push((jet_key(k, nu), c2.scale(r)));
                    }
                }
                SVec::from_unsorted(out)
            })
            .collect()
    }
}
