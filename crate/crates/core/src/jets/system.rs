use std::collections::HashMap;
use std::fmt;

use num::Signed;

use crate::error::{Error, Result};
use crate::kernel::{binomial, MultiIndex, RatFunc};
use crate::linalg::{Echelon, Key, SVec};
use crate::ore::{DiffOp, OpMatrix};

use super::key::{decode, derive_form, form_order, jet_key, jet_name, key_class, key_order};
use super::prolong::Prolongation;

/// Linear system of order q on the jet coordinates y^k_μ, |μ| ≤ q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSystem {
    n: usize,
    m: usize,
    q: usize,
    eqs: Vec<SVec>,
}

/// One line of a Janet board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoardRow {
    pub unknown: usize,
    pub mu: MultiIndex,
    /// Class of the leader for equations of top order; `None` below it.
    pub class: Option<usize>,
    pub multiplicative: Vec<bool>,
}

/// Janet board of a solved system, with the board of parametric jets of top order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JanetBoard {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<BoardRow>,
    pub parametric: Vec<BoardRow>,
}

/// Counts of leaders per class (β) and their complements (α) at top order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characters {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    /// β^i_q, index i−1.
    pub beta: Vec<usize>,
    /// α^i_q, index i−1.
    pub alpha: Vec<i64>,
    /// Set when the system is not involutive.
    pub provisional: bool,
}

impl Characters {
    /// α^n_q, the differential rank.
    pub fn rank(&self) -> i64 {
        self.alpha.last().copied().unwrap_or(self.m as i64)
    }
}

/// Dimension of R_k together with its parametric jets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionDims {
    pub order: usize,
    pub dim: usize,
    pub parametric: Vec<(usize, MultiIndex)>,
}

/// dim J_q = m·binom(n+q, n).
pub fn jet_dim(n: usize, m: usize, q: usize) -> usize {
    m * binomial((n + q) as u64, n as u64) as usize
}

/// dim S_q T* ⊗ E = m·binom(n+q−1, q).
pub fn sym_dim(n: usize, m: usize, q: usize) -> usize {
    if n == 0 {
        return if q == 0 { m } else { 0 };
    }
    m * binomial((n + q - 1) as u64, q as u64) as usize
}

/// Number of multi-indices of length q and class i.
pub fn class_count(n: usize, q: usize, i: usize) -> usize {
    if q == 0 {
        return 0;
    }
    binomial((q - 1 + n - i) as u64, (n - i) as u64) as usize
}

/// All jets of order at most q, as keys in decreasing order.
pub fn all_jets(n: usize, m: usize, q: usize) -> Vec<Key> {
    let mut out: Vec<Key> = MultiIndex::all_up_to(n, q)
        .iter()
        .flat_map(|mu| (0..m).map(move |k| jet_key(k, mu)))
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Jet form of row `r` of an operator matrix.
pub fn row_form(d: &OpMatrix, r: usize) -> SVec {
    let mut v = Vec::new();
    for (k, op) in d.row(r).iter().enumerate() {
        for (mu, c) in op.terms() {
            v.push((jet_key(k, mu), c.clone()));
        }
    }
    SVec::from_unsorted(v)
}

/// Operator row of a jet form on `m` unknowns.
pub fn form_row(v: &SVec, n: usize, m: usize) -> Vec<DiffOp> {
    let mut row = vec![DiffOp::zero(n); m];
    for (key, c) in v.entries() {
        let (k, mu) = decode(*key, n);
        row[k].add_term(mu, c);
    }
    row
}

/// Renders a jet form as `y13 - y2` and the like.
pub fn render_form(v: &SVec, n: usize, m: usize) -> String {
    if v.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, (key, c)) in v.entries().iter().enumerate() {
        let (k, mu) = decode(*key, n);
        let name = jet_name(k, &mu, m);
        let cs = c.to_string();
        let (neg, body) = match c.as_rat() {
            Some(r) if r.is_negative() => (true, (-r.clone()).to_string()),
            Some(_) => (false, cs),
            None => match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, cs),
            },
        };
        if idx == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if body == "1" {
            s.push_str(&name);
        } else if body.contains(' ') || (!c.is_constant() && body.contains('/')) {
            s.push_str(&format!("({body})*{name}"));
        } else {
            s.push_str(&format!("{body}*{name}"));
        }
    }
    s
}

impl JetSystem {
    pub fn new(n: usize, m: usize, q: usize, eqs: Vec<SVec>) -> Self {
        let top = eqs.iter().map(form_order).max().unwrap_or(0);
        let eqs = eqs.into_iter().filter(|e| !e.is_zero()).collect();
        JetSystem {
            n,
            m,
            q: q.max(top),
            eqs,
        }
    }

    pub fn empty(n: usize, m: usize, q: usize) -> Self {
        JetSystem {
            n,
            m,
            q,
            eqs: Vec::new(),
        }
    }

    pub fn from_opmatrix(d: &OpMatrix) -> Self {
        let eqs = (0..d.nrows()).map(|r| row_form(d, r)).collect();
        Self::new(d.n(), d.ncols(), d.order(), eqs)
    }

    pub fn to_opmatrix(&self) -> OpMatrix {
        let rows = self
            .eqs
            .iter()
            .map(|v| form_row(v, self.n, self.m))
            .collect();
        OpMatrix::from_rows(self.n, self.m, rows).expect("consistent shape")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn equations(&self) -> &[SVec] {
        &self.eqs
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    /// Leading jets of the equations.
    pub fn leaders(&self) -> Vec<Key> {
        self.eqs.iter().filter_map(|e| e.lead_key()).collect()
    }

    pub fn leader_names(&self) -> Vec<String> {
        self.leaders()
            .into_iter()
            .map(|k| {
                let (u, mu) = decode(k, self.n);
                jet_name(u, &mu, self.m)
            })
            .collect()
    }

    /// True when leaders are distinct, coefficients of leaders are 1 and no
    /// leader occurs in another equation.
    pub fn is_solved(&self) -> bool {
        let leads = self.leaders();
        for (i, e) in self.eqs.iter().enumerate() {
            if !e.entries()[0].1.is_one() {
                return false;
            }
            for (j, &l) in leads.iter().enumerate() {
                if i != j && !e.get(l).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Solved form: reduced row echelon form under the jet term order.
    pub fn autoreduce(&self) -> Result<JetSystem> {
        let mut ech = Echelon::new();
        for e in &self.eqs {
            ech.insert(e.clone(), SVec::new());
        }
        let eqs = ech.rref().into_iter().map(|(v, _)| v).collect::<Vec<_>>();
        Ok(JetSystem {
            n: self.n,
            m: self.m,
            q: self.q,
            eqs,
        })
    }

    /// All formal derivatives d_ν of all equations with |ν| ≤ r.
    pub fn prolong(&self, r: usize) -> JetSystem {
        let n = self.n;
        let mut all = Vec::new();
        for e in &self.eqs {
            let mut level: HashMap<MultiIndex, SVec> = HashMap::new();
            level.insert(MultiIndex::zero(n), e.clone());
            all.push(e.clone());
            for s in 1..=r {
                let mut next = HashMap::new();
                for nu in MultiIndex::all_of_order(n, s) {
                    let i = (1..=n).rev().find(|&i| nu.get(i) > 0).expect("nonzero");
                    let parent = nu.minus(&MultiIndex::unit(n, i)).expect("parent");
                    let d = derive_form(&level[&parent], i);
                    all.push(d.clone());
                    next.insert(nu, d);
                }
                level = next;
            }
        }
        JetSystem::new(n, self.m, self.q + r, all)
    }

    /// Janet board of a solved system.
    pub fn janet_board(&self) -> Result<JanetBoard> {
        if !self.is_solved() {
            return Err(Error::Precondition("system is not in solved form".into()));
        }
        let n = self.n;
        let top = self.eqs.iter().map(form_order).max().unwrap_or(self.q);
        let mut rows: Vec<BoardRow> = self
            .leaders()
            .into_iter()
            .map(|k| {
                let (u, mu) = decode(k, n);
                let class = if key_order(k) == top && top > 0 {
                    key_class(k, n)
                } else {
                    None
                };
                let c = class.unwrap_or(0);
                BoardRow {
                    unknown: u,
                    mu,
                    class,
                    multiplicative: (1..=n).map(|i| i <= c).collect(),
                }
            })
            .collect();
        rows.sort_by(|a, b| b.class.cmp(&a.class));
        let leads: std::collections::HashSet<Key> = self.leaders().into_iter().collect();
        let parametric = all_jets(n, self.m, top)
            .into_iter()
            .filter(|&k| key_order(k) == top && top > 0 && !leads.contains(&k))
            .map(|k| {
                let (u, mu) = decode(k, n);
                let c = key_class(k, n).unwrap_or(0);
                BoardRow {
                    unknown: u,
                    mu,
                    class: Some(c),
                    multiplicative: (1..=n).map(|i| i <= c).collect(),
                }
            })
            .collect();
        Ok(JanetBoard {
            n,
            m: self.m,
            rows,
            parametric,
        })
    }

    /// Characters of the top-order equations.
    pub fn characters(&self) -> Characters {
        let (n, m, q) = (self.n, self.m, self.q);
        let mut beta = vec![0usize; n];
        for k in self.leaders() {
            if key_order(k) == q {
                if let Some(c) = key_class(k, n) {
                    beta[c - 1] += 1;
                }
            }
        }
        let alpha = (1..=n)
            .map(|i| (m * class_count(n, q, i)) as i64 - beta[i - 1] as i64)
            .collect::<Vec<_>>();
        let provisional = !crate::involution::involution_check(self)
            .map(|c| c.involutive)
            .unwrap_or(false);
        Characters {
            n,
            m,
            q,
            beta,
            alpha,
            provisional,
        }
    }

    /// dim R_{q+r} for r = 0..=r_max with the parametric jets at each order.
    pub fn solution_dims(&self, r_max: usize) -> Vec<SolutionDims> {
        let (n, m, q) = (self.n, self.m, self.q);
        let gens = self
            .eqs
            .iter()
            .map(|e| (e.clone(), form_order(e)))
            .collect();
        let mut p = Prolongation::with_orders(n, gens, false);
        let mut out = Vec::new();
        for r in 0..=r_max {
            p.extend_to(q + r);
            let piv: std::collections::HashSet<Key> = p.echelon().pivot_keys().collect();
            let parametric: Vec<(usize, MultiIndex)> = all_jets(n, m, q + r)
                .into_iter()
                .filter(|k| !piv.contains(k))
                .map(|k| decode(k, n))
                .collect();
            out.push(SolutionDims {
                order: q + r,
                dim: parametric.len(),
                parametric,
            });
        }
        out
    }

    /// Order-q parts of the equations of order q.
    pub fn symbol_rows(&self) -> Vec<SVec> {
        let q = self.q;
        self.eqs
            .iter()
            .filter(|e| form_order(e) == q)
            .map(|e| e.filter(|k| key_order(k) == q))
            .collect()
    }

    /// Text form used for hashing and display.
    pub fn canonical_text(&self) -> String {
        let mut s = format!("n={} m={} q={}\n", self.n, self.m, self.q);
        for e in &self.eqs {
            s.push_str(&render_form(e, self.n, self.m));
            s.push('\n');
        }
        s
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc + Copy) -> JetSystem {
        let eqs = self.eqs.iter().map(|e| e.map(f)).collect();
        JetSystem::new(self.n, self.m, self.q, eqs)
    }
}

impl fmt::Display for JetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.eqs {
            writeln!(f, "{} = 0", render_form(e, self.n, self.m))?;
        }
        Ok(())
    }
}

impl JanetBoard {
    /// Classes of the board rows, 0 for equations below top order.
    pub fn classes(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.class.unwrap_or(0)).collect()
    }

    fn render_rows(&self, rows: &[BoardRow], out: &mut String) {
        for r in rows {
            let name = jet_name(r.unknown, &r.mu, self.m);
            let cells: Vec<String> = (1..=self.n)
                .map(|i| {
                    if r.multiplicative[i - 1] {
                        i.to_string()
                    } else {
                        "•".to_string()
                    }
                })
                .collect();
            out.push_str(&format!("{:<10} {}\n", name, cells.join(" ")));
        }
    }

    /// Fixed-width text: digits for multiplicative variables, `•` otherwise.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_rows(&self.rows, &mut out);
        out
    }

    pub fn render_parametric(&self) -> String {
        let mut out = String::new();
        self.render_rows(&self.parametric, &mut out);
        out
    }
}
