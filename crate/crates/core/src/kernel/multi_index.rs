use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Multi-index μ = (μ_1, ..., μ_n) labelling a derivative d_μ.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(pub Vec<u16>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index 1_i (1-based axis).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[i - 1] = 1;
        m
    }

    /// Builds μ from a list of 1-based axes, so `[1, 2, 2]` is d_122.
    pub fn from_axes(n: usize, axes: &[usize]) -> Self {
        let mut m = Self::zero(n);
        for &a in axes {
            assert!(a >= 1 && a <= n, "axis {a} out of range 1..={n}");
            m.0[a - 1] += 1;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, i: usize) -> u16 {
        self.0[i - 1]
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn plus_unit(&self, i: usize) -> MultiIndex {
        let mut m = self.clone();
        m.0[i - 1] += 1;
        m
    }

    pub fn minus(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.0.iter().zip(&other.0).any(|(a, b)| a < b) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Least axis with a nonzero entry.
    pub fn class(&self) -> Result<usize> {
        self.0
            .iter()
            .position(|&e| e != 0)
            .map(|p| p + 1)
            .ok_or(Error::NoClass)
    }

    /// Axes listed with repetition in increasing order, e.g. d_122 gives `[1, 2, 2]`.
    pub fn axes(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.order());
        for (i, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                v.push(i + 1);
            }
        }
        v
    }

    /// Product of binomials binom(μ_i, ν_i).
    pub fn binom(&self, nu: &MultiIndex) -> u64 {
        self.0
            .iter()
            .zip(&nu.0)
            .map(|(&m, &v)| binomial(m as u64, v as u64))
            .product()
    }

    /// μ! = Π μ_i!.
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>())
            .product()
    }

    /// All sub-indices ν ≤ μ.
    pub fn divisors(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(self.n())];
        for i in 0..self.n() {
            let mut next = Vec::new();
            for m in &out {
                for k in 0..=self.0[i] {
                    let mut m2 = m.clone();
                    m2.0[i] = k;
                    next.push(m2);
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of length exactly `q`, in decreasing term order.
    pub fn all_of_order(n: usize, q: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u16; n];
        fn rec(i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if i + 1 == n {
                cur[i] = left as u16;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for k in 0..=left {
                cur[i] = k as u16;
                rec(i + 1, left - k, cur, out);
            }
        }
        if n == 0 {
            if q == 0 {
                out.push(MultiIndex(Vec::new()));
            }
            return out;
        }
        rec(0, q, &mut cur, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    /// All multi-indices of length at most `q`, in decreasing term order.
    pub fn all_up_to(n: usize, q: usize) -> Vec<MultiIndex> {
        (0..=q)
            .rev()
            .flat_map(|k| Self::all_of_order(n, k))
            .collect()
    }
}

/// Term order: higher length first, then degree-reverse-lexicographic
/// (smaller entries on low axes are larger), so d_nn > ... > d_11.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        super::poly::cmp_exp(&self.0, &other.0)
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axes = self.axes();
        if axes.is_empty() {
            return Ok(());
        }
        let sep = if self.n() > 9 { "," } else { "" };
        let parts: Vec<String> = axes.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

/// binom(n, k) for small arguments.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}
