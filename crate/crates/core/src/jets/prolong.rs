use std::collections::HashMap;

use crate::kernel::MultiIndex;
use crate::linalg::{Echelon, Inserted, SVec};

use super::key::{derive_form, form_order, jet_key, key_order};

/// Incremental span of all formal derivatives d_ν Φ_τ of a list of jet forms,
/// truncated at a jet order that grows on demand.
///
/// With tracking enabled every row carries the tag Σ c_{τν} (τ, ν) recording
/// it as a combination of the d_ν Φ_τ, and every dependency found while
/// inserting is kept as a relation among the generators.
#[derive(Clone, Debug)]
pub struct Prolongation {
    n: usize,
    gens: Vec<(SVec, usize)>,
    frontier: Vec<(usize, HashMap<MultiIndex, SVec>)>,
    ech: Echelon,
    level: Option<usize>,
    track: bool,
    deps: Vec<(usize, SVec)>,
    hist: Vec<usize>,
}

impl Prolongation {
    pub fn new(n: usize, gens: Vec<SVec>, track: bool) -> Self {
        let gens: Vec<(SVec, usize)> = gens
            .into_iter()
            .map(|g| {
                let q = form_order(&g);
                (g, q)
            })
            .collect();
        Self::with_orders(n, gens, track)
    }

    /// Generators with explicit orders (a zero form still needs one).
    pub fn with_orders(n: usize, gens: Vec<(SVec, usize)>, track: bool) -> Self {
        let frontier = gens.iter().map(|_| (0, HashMap::new())).collect();
        Prolongation {
            n,
            gens,
            frontier,
            ech: Echelon::new(),
            level: None,
            track,
            deps: Vec::new(),
            hist: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(SVec, usize)] {
        &self.gens
    }

    pub fn min_order(&self) -> usize {
        self.gens.iter().map(|g| g.1).min().unwrap_or(0)
    }

    pub fn max_order(&self) -> usize {
        self.gens.iter().map(|g| g.1).max().unwrap_or(0)
    }

    pub fn level(&self) -> Option<usize> {
        self.level
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn dependencies(&self) -> &[(usize, SVec)] {
        &self.deps
    }

    /// Number of independent rows of order at most `q`.
    pub fn count_upto(&self, q: usize) -> usize {
        self.hist.iter().take(q + 1).sum()
    }

    /// Rows of order at most `q` with their tags.
    pub fn rows_upto(&self, q: usize) -> Vec<(SVec, SVec)> {
        self.ech
            .rows()
            .filter(|(v, _)| form_order(v) <= q)
            .map(|(v, t)| (v.clone(), t.clone()))
            .collect()
    }

    fn forms_at(&mut self, tau: usize, s: usize) -> Vec<(MultiIndex, SVec)> {
        let n = self.n;
        if s == 0 {
            let g = self.gens[tau].0.clone();
            let mut h = HashMap::new();
            h.insert(MultiIndex::zero(n), g.clone());
            self.frontier[tau] = (0, h);
            return vec![(MultiIndex::zero(n), g)];
        }
        assert_eq!(
            self.frontier[tau].0 + 1,
            s,
            "prolongation levels must be visited in order"
        );
        let prev = std::mem::take(&mut self.frontier[tau].1);
        let mut next = HashMap::new();
        let mut out = Vec::new();
        for nu in MultiIndex::all_of_order(n, s) {
            let i = (1..=n)
                .rev()
                .find(|&i| nu.get(i) > 0)
                .expect("nonzero multi-index");
            let parent = nu.minus(&MultiIndex::unit(n, i)).expect("parent");
            let f = derive_form(&prev[&parent], i);
            next.insert(nu.clone(), f.clone());
            out.push((nu, f));
        }
        self.frontier[tau] = (s, next);
        out
    }

    /// Appends a generator and inserts its derivatives up to the current level.
    pub fn add_generator(&mut self, g: SVec, order: usize) {
        self.gens.push((g, order));
        self.frontier.push((0, HashMap::new()));
        let tau = self.gens.len() - 1;
        let Some(level) = self.level else { return };
        for lvl in order..=level {
            for (nu, f) in self.forms_at(tau, lvl - order) {
                self.insert_at(lvl, tau, &nu, f);
            }
        }
    }

    fn insert_at(&mut self, lvl: usize, tau: usize, nu: &MultiIndex, f: SVec) {
        let tag = if self.track {
            SVec::unit(jet_key(tau, nu))
        } else {
            SVec::new()
        };
        match self.ech.insert(f, tag) {
            Inserted::Pivot(k) => {
                let o = key_order(k);
                if self.hist.len() <= o {
                    self.hist.resize(o + 1, 0);
                }
                self.hist[o] += 1;
            }
            Inserted::Dependent(t) => {
                if self.track {
                    self.deps.push((lvl, t));
                }
            }
        }
    }

    /// Inserts every d_ν Φ_τ with ord(Φ_τ) + |ν| ≤ `target`.
    pub fn extend_to(&mut self, target: usize) {
        let start = match self.level {
            Some(l) => l + 1,
            None => self.min_order(),
        };
        for lvl in start..=target {
            for tau in 0..self.gens.len() {
                let q = self.gens[tau].1;
                if q > lvl {
                    continue;
                }
                let s = lvl - q;
                for (nu, f) in self.forms_at(tau, s) {
                    self.insert_at(lvl, tau, &nu, f);
                }
            }
            self.level = Some(lvl);
        }
    }
}
