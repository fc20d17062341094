//! Sparse vectors over K and incremental row echelon forms with tracked tags.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};

use crate::kernel::RatFunc;

/// Column key; larger keys are more significant.
pub type Key = u128;

/// Sparse vector with entries sorted by decreasing key and no zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SVec(Vec<(Key, RatFunc)>);

impl SVec {
    pub fn new() -> Self {
        SVec(Vec::new())
    }

    pub fn unit(k: Key) -> Self {
        SVec(vec![(k, RatFunc::one())])
    }

    /// Sorts and merges duplicate keys.
    pub fn from_unsorted(mut v: Vec<(Key, RatFunc)>) -> Self {
        v.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Key, RatFunc)> = Vec::with_capacity(v.len());
        for (k, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == k => last.1 = last.1.add(&c),
                _ => out.push((k, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        SVec(out)
    }

    /// Wraps entries already sorted by decreasing key.
    pub fn from_sorted(v: Vec<(Key, RatFunc)>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0].0 > w[1].0));
        SVec(v.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    pub fn entries(&self) -> &[(Key, RatFunc)] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<(Key, RatFunc)> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<&(Key, RatFunc)> {
        self.0.first()
    }

    pub fn lead_key(&self) -> Option<Key> {
        self.0.first().map(|e| e.0)
    }

    pub fn get(&self, k: Key) -> RatFunc {
        match self.0.binary_search_by(|e| k.cmp(&e.0)) {
            Ok(i) => self.0[i].1.clone(),
            Err(_) => RatFunc::zero(),
        }
    }

    pub fn scale(&self, c: &RatFunc) -> SVec {
        if c.is_zero() {
            return SVec::new();
        }
        if c.is_one() {
            return self.clone();
        }
        SVec(
            self.0
                .iter()
                .map(|(k, a)| (*k, a.mul(c)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        )
    }

    pub fn neg(&self) -> SVec {
        SVec(self.0.iter().map(|(k, a)| (*k, a.neg())).collect())
    }

    /// self + c·other.
    pub fn axpy(&self, c: &RatFunc, other: &SVec) -> SVec {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let take_a = j >= other.0.len() || (i < self.0.len() && self.0[i].0 > other.0[j].0);
            let take_b = i >= self.0.len() || (j < other.0.len() && other.0[j].0 > self.0[i].0);
            if take_a {
                out.push(self.0[i].clone());
                i += 1;
            } else if take_b {
                let v = other.0[j].1.mul(c);
                if !v.is_zero() {
                    out.push((other.0[j].0, v));
                }
                j += 1;
            } else {
                let v = self.0[i].1.add(&other.0[j].1.mul(c));
                if !v.is_zero() {
                    out.push((self.0[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SVec(out)
    }

    pub fn add(&self, other: &SVec) -> SVec {
        self.axpy(&RatFunc::one(), other)
    }

    pub fn sub(&self, other: &SVec) -> SVec {
        self.axpy(&RatFunc::int(-1), other)
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> SVec {
        match self.0.first() {
            None => SVec::new(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero lead")),
        }
    }

    /// Applies a coefficient map, dropping zeros.
    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc) -> SVec {
        SVec(
            self.0
                .iter()
                .map(|(k, a)| (*k, f(a)))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        )
    }

    /// Keeps the entries whose key satisfies `pred`.
    pub fn filter(&self, pred: impl Fn(Key) -> bool) -> SVec {
        SVec(self.0.iter().filter(|(k, _)| pred(*k)).cloned().collect())
    }

    /// Re-keys every entry with an order-preserving map.
    pub fn rekey_monotone(&self, f: impl Fn(Key) -> Key) -> SVec {
        SVec(self.0.iter().map(|(k, a)| (f(*k), a.clone())).collect())
    }

    /// Re-keys every entry with an arbitrary map, merging collisions.
    pub fn rekey(&self, f: impl Fn(Key) -> Key) -> SVec {
        SVec::from_unsorted(self.0.iter().map(|(k, a)| (f(*k), a.clone())).collect())
    }
}

#[derive(Clone, Debug)]
struct Row {
    v: SVec,
    tag: SVec,
}

/// Outcome of inserting a vector into an echelon form.
#[derive(Clone, Debug)]
pub enum Inserted {
    /// New pivot at the given key.
    Pivot(Key),
    /// The vector was dependent; carries its reduced tag.
    Dependent(SVec),
}

/// Row echelon form with monic rows and distinct leading keys.
///
/// Every row carries a tag vector that undergoes the same linear
/// operations, so tags record how each row was produced.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: HashMap<Key, usize>,
}

fn accumulate(acc: &mut BTreeMap<Reverse<Key>, RatFunc>, c: &RatFunc, v: &[(Key, RatFunc)]) {
    for (k, a) in v {
        let t = a.mul(c);
        match acc.entry(Reverse(*k)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if !t.is_zero() {
                    e.insert(t);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&t);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }
}

fn to_map(v: &SVec) -> BTreeMap<Reverse<Key>, RatFunc> {
    v.0.iter().map(|(k, c)| (Reverse(*k), c.clone())).collect()
}

fn from_map(m: BTreeMap<Reverse<Key>, RatFunc>) -> SVec {
    SVec(m.into_iter().map(|(k, c)| (k.0, c)).collect())
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_pivot(&self, k: Key) -> bool {
        self.pivots.contains_key(&k)
    }

    pub fn pivot_keys(&self) -> impl Iterator<Item = Key> + '_ {
        self.rows.iter().map(|r| r.v.0[0].0)
    }

    /// Rows in insertion order as (vector, tag).
    pub fn rows(&self) -> impl Iterator<Item = (&SVec, &SVec)> {
        self.rows.iter().map(|r| (&r.v, &r.tag))
    }

    pub fn row_by_pivot(&self, k: Key) -> Option<(&SVec, &SVec)> {
        self.pivots
            .get(&k)
            .map(|&i| (&self.rows[i].v, &self.rows[i].tag))
    }

    /// Reduces `v` (and its tag alongside). With `full`, every pivot column is
    /// eliminated; otherwise only the leading entries.
    ///
    /// The returned tag satisfies `v_out = v_in − Σ c_i row_i` with
    /// `tag_out = tag_in − Σ c_i tag_i`.
    pub fn reduce(&self, v: &SVec, tag: &SVec, full: bool) -> (SVec, SVec) {
        let mut acc = to_map(v);
        let mut tacc = to_map(tag);
        let mut out: Vec<(Key, RatFunc)> = Vec::new();
        while let Some((k, c)) = acc.pop_first() {
            if let Some(&ri) = self.pivots.get(&k.0) {
                let row = &self.rows[ri];
                let neg = c.neg();
                accumulate(&mut acc, &neg, &row.v.0[1..]);
                if !row.tag.is_zero() {
                    accumulate(&mut tacc, &neg, &row.tag.0);
                }
            } else {
                out.push((k.0, c));
                if !full {
                    out.extend(acc.into_iter().map(|(k, c)| (k.0, c)));
                    break;
                }
            }
        }
        (SVec(out), from_map(tacc))
    }

    /// Full normal form of `v` without tag tracking.
    pub fn normal_form(&self, v: &SVec) -> SVec {
        self.reduce(v, &SVec::new(), true).0
    }

    pub fn contains(&self, v: &SVec) -> bool {
        self.reduce(v, &SVec::new(), false).0.is_zero()
    }

    /// Inserts `v` with its tag; returns the new pivot or the dependency tag.
    pub fn insert(&mut self, v: SVec, tag: SVec) -> Inserted {
        let (r, t) = self.reduce(&v, &tag, false);
        if r.is_zero() {
            return Inserted::Dependent(t);
        }
        let c = r.0[0].1.clone();
        let (r, t) = if c.is_one() {
            (r, t)
        } else {
            let inv = c.inv().expect("nonzero lead");
            (r.scale(&inv), t.scale(&inv))
        };
        let k = r.0[0].0;
        self.pivots.insert(k, self.rows.len());
        self.rows.push(Row { v: r, tag: t });
        Inserted::Pivot(k)
    }

    /// Reduced row echelon form: rows fully reduced against each other,
    /// sorted by decreasing pivot, with their tags.
    pub fn rref(&self) -> Vec<(SVec, SVec)> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.rows[i].v.0[0].0);
        let mut done = Echelon::new();
        let mut out = Vec::with_capacity(order.len());
        for i in order {
            let row = &self.rows[i];
            let lead = SVec(vec![row.v.0[0].clone()]);
            let tail = SVec(row.v.0[1..].to_vec());
            let (tr, tt) = done.reduce(&tail, &row.tag, true);
            let v = lead.add(&tr);
            done.pivots.insert(v.0[0].0, done.rows.len());
            done.rows.push(Row {
                v: v.clone(),
                tag: tt.clone(),
            });
            out.push((v, tt));
        }
        out.reverse();
        out
    }
}
