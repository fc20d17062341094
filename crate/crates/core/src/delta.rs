//! Symbols, the Spencer δ-complex and its cohomology.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::involution::symbol_involutive;
use crate::jets::{decode, jet_key, shift_form, sym_dim, JetSystem};
use crate::kernel::{binomial, MultiIndex, RatFunc};
use crate::linalg::{Echelon, Key, SVec};

/// The symbol g_p ⊂ S_p T* ⊗ E cut out by linear equations on the v^k_μ, |μ| = p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSpace {
    pub n: usize,
    pub m: usize,
    pub order: usize,
    /// Defining equations in reduced row echelon form.
    pub equations: Vec<SVec>,
    pub dim: usize,
}

impl SymbolSpace {
    /// S_p T* ⊗ E with no equations.
    pub fn full(n: usize, m: usize, p: usize) -> Self {
        SymbolSpace {
            n,
            m,
            order: p,
            equations: Vec::new(),
            dim: sym_dim(n, m, p),
        }
    }

    pub fn from_equations(n: usize, m: usize, p: usize, rows: Vec<SVec>) -> Self {
        let mut e = Echelon::new();
        for r in rows {
            e.insert(r, SVec::new());
        }
        let equations: Vec<SVec> = e.rref().into_iter().map(|(v, _)| v).collect();
        let dim = sym_dim(n, m, p) - equations.len();
        SymbolSpace {
            n,
            m,
            order: p,
            equations,
            dim,
        }
    }

    /// First prolongation: all shifts of the defining equations.
    pub fn prolong(&self) -> SymbolSpace {
        let rows = self
            .equations
            .iter()
            .flat_map(|v| (1..=self.n).map(move |i| shift_form(v, i)))
            .collect();
        SymbolSpace::from_equations(self.n, self.m, self.order + 1, rows)
    }

    pub fn is_zero(&self) -> bool {
        self.dim == 0
    }

    /// Basis of solutions, one vector per parametric coordinate.
    pub fn basis(&self) -> Vec<SVec> {
        let pivots: HashMap<Key, usize> = self
            .equations
            .iter()
            .enumerate()
            .map(|(i, v)| (v.lead_key().expect("nonzero"), i))
            .collect();
        let mut out = Vec::with_capacity(self.dim);
        for mu in MultiIndex::all_of_order(self.n, self.order) {
            for k in 0..self.m {
                let key = jet_key(k, &mu);
                if pivots.contains_key(&key) {
                    continue;
                }
                let mut entries = vec![(key, RatFunc::one())];
                for row in &self.equations {
                    let c = row.get(key);
                    if !c.is_zero() {
                        entries.push((row.lead_key().expect("nonzero"), c.neg()));
                    }
                }
                out.push(SVec::from_unsorted(entries));
            }
        }
        out
    }

    /// Cartan's test.
    pub fn is_involutive(&self) -> bool {
        self.is_zero() || symbol_involutive(&self.equations, self.n, self.m, self.order)
    }
}

/// g_{q+r} of a system: the r-th prolongation of its top-order symbol.
pub fn symbol_space(s: &JetSystem, r: usize) -> SymbolSpace {
    let mut g = SymbolSpace::from_equations(s.n(), s.m(), s.order(), s.symbol_rows());
    for _ in 0..r {
        g = g.prolong();
    }
    g
}

/// Symbols g_p for p = 0..=p_max, taking g_p = S_p T* ⊗ E below the system order.
pub fn symbol_family(s: &JetSystem, p_max: usize) -> Vec<SymbolSpace> {
    let q = s.order();
    let mut out: Vec<SymbolSpace> = (0..q.min(p_max + 1))
        .map(|p| SymbolSpace::full(s.n(), s.m(), p))
        .collect();
    if p_max >= q {
        let mut g = symbol_space(s, 0);
        out.push(g.clone());
        for _ in q..p_max {
            g = g.prolong();
            out.push(g.clone());
        }
    }
    out
}

/// Increasing s-subsets of {1..n} in lexicographic order.
pub fn skew_basis(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, s, &mut Vec::new(), &mut out);
    out
}

/// Keys of Λ^s T* ⊗ S_p T* ⊗ E: the form index is folded into the unknown slot.
pub fn form_key(form: usize, k: usize, m: usize, mu: &MultiIndex) -> Key {
    jet_key(form * m + k, mu)
}

/// δ on Λ^s ⊗ S_{p+1} ⊗ E in coordinates: (δω)^k_μ = Σ_i dx^i ∧ ω^k_{μ+1_i}.
pub fn delta_apply(v: &SVec, n: usize, m: usize, s: usize) -> SVec {
    let src = skew_basis(n, s);
    let dst: HashMap<Vec<usize>, usize> = skew_basis(n, s + 1)
        .into_iter()
        .enumerate()
        .map(|(i, b)| (b, i))
        .collect();
    let mut out = Vec::new();
    for (key, c) in v.entries() {
        let (fk, nu) = decode(*key, n);
        let (form, k) = (fk / m, fk % m);
        let idx = &src[form];
        for i in 1..=n {
            if nu.get(i) == 0 || idx.contains(&i) {
                continue;
            }
            let below = idx.iter().filter(|&&j| j < i).count();
            let mut j = idx.clone();
            j.insert(below, i);
            let mu = nu
                .minus(&MultiIndex::unit(n, i))
                .expect("positive exponent");
            let c = if below % 2 == 0 { c.clone() } else { c.neg() };
            out.push((form_key(dst[&j], k, m, &mu), c));
        }
    }
    SVec::from_unsorted(out)
}

/// Images under δ of a basis of Λ^s ⊗ g_{p+1}, in Λ^{s+1} ⊗ S_p ⊗ E coordinates.
pub fn delta_map(upper: &SymbolSpace, s: usize) -> Vec<SVec> {
    let (n, m) = (upper.n, upper.m);
    let basis = upper.basis();
    let forms = skew_basis(n, s).len();
    let mut out = Vec::with_capacity(forms * basis.len());
    for f in 0..forms {
        for b in &basis {
            let lifted = SVec::from_unsorted(
                b.entries()
                    .iter()
                    .map(|(key, c)| {
                        let (k, mu) = decode(*key, n);
                        (form_key(f, k, m, &mu), c.clone())
                    })
                    .collect(),
            );
            out.push(delta_apply(&lifted, n, m, s));
        }
    }
    out
}

pub fn rank_of(rows: impl IntoIterator<Item = SVec>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r, SVec::new());
    }
    e.len()
}

/// Dimensions at Λ^s T* ⊗ g_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaCell {
    pub form_degree: usize,
    pub order: usize,
    pub cochains: usize,
    pub coboundaries: usize,
    pub cocycles: usize,
    pub cohomology: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaReport {
    pub q: usize,
    pub cells: Vec<DeltaCell>,
}

impl DeltaReport {
    pub fn cell(&self, s: usize, p: usize) -> Option<&DeltaCell> {
        self.cells
            .iter()
            .find(|c| c.form_degree == s && c.order == p)
    }

    /// dim H^s at Λ^s ⊗ g_p.
    pub fn h(&self, s: usize, p: usize) -> Option<usize> {
        self.cell(s, p).map(|c| c.cohomology)
    }
}

/// One cell of the δ-complex given g_{p+1} and g_p; checks δ∘δ = 0 on the
/// incoming images.
pub fn delta_cell(lower: &SymbolSpace, upper: &SymbolSpace, s: usize) -> Result<DeltaCell> {
    let (n, m, p) = (lower.n, lower.m, lower.order);
    let nforms = binomial(n as u64, s as u64) as usize;
    let cochains = nforms * lower.dim;
    let coboundaries = if s == 0 {
        0
    } else {
        let imgs = delta_map(upper, s - 1);
        if s < n && p > 0 {
            for v in &imgs {
                if !delta_apply(v, n, m, s).is_zero() {
                    return Err(Error::Invariant("δ∘δ does not vanish".into()));
                }
            }
        }
        rank_of(imgs)
    };
    let outgoing = if s >= n || p == 0 {
        0
    } else {
        rank_of(delta_map(lower, s))
    };
    let cocycles = cochains - outgoing;
    if coboundaries > cocycles {
        return Err(Error::Invariant(format!(
            "δ-image of dimension {coboundaries} exceeds cocycles {cocycles}"
        )));
    }
    Ok(DeltaCell {
        form_degree: s,
        order: p,
        cochains,
        coboundaries,
        cocycles,
        cohomology: cocycles - coboundaries,
    })
}

/// Cohomology dims H^s at Λ^s ⊗ g_{q+r} for 0 ≤ s ≤ s_max, 0 ≤ r ≤ r_max.
pub fn cohomology(s: &JetSystem, s_max: usize, r_max: usize) -> Result<DeltaReport> {
    let q = s.order();
    let fam = symbol_family(s, q + r_max + 1);
    let mut cells = Vec::new();
    for r in 0..=r_max {
        for d in 0..=s_max.min(s.n()) {
            cells.push(delta_cell(&fam[q + r], &fam[q + r + 1], d)?);
        }
    }
    Ok(DeltaReport { q, cells })
}

/// How prolongations of a symbol settle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stabilization {
    /// g_p = 0 from the recorded order on.
    FiniteType,
    /// g_p passes Cartan's test at the recorded order.
    Involutive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Acyclicity {
    /// Least r with g_{q+r} s-acyclic.
    pub r: usize,
    pub stabilization: Stabilization,
    /// Order at which the symbol became zero or involutive.
    pub settled_at: usize,
}

/// Default cap on symbol prolongations explored.
pub const SYMBOL_BUDGET: usize = 6;

pub fn acyclicity(s: &JetSystem, degree: usize) -> Result<Acyclicity> {
    acyclicity_with(s, degree, SYMBOL_BUDGET)
}

pub fn acyclicity_with(s: &JetSystem, degree: usize, budget: usize) -> Result<Acyclicity> {
    let q = s.order();
    let mut g = symbol_space(s, 0);
    let mut spaces = vec![g.clone()];
    let (settled, how) = loop {
        let p = g.order;
        if g.is_zero() {
            break (p, Stabilization::FiniteType);
        }
        if g.is_involutive() {
            break (p, Stabilization::Involutive);
        }
        if p >= q + budget {
            return Err(Error::Budget(format!(
                "symbol neither zero nor involutive up to order {p}"
            )));
        }
        g = g.prolong();
        spaces.push(g.clone());
    };
    spaces.push(spaces.last().expect("nonempty").prolong());
    let mut r = 0;
    for p in q..settled {
        let (lo, hi) = (&spaces[p - q], &spaces[p - q + 1]);
        for d in 1..=degree.min(s.n()) {
            if delta_cell(lo, hi, d)?.cohomology != 0 {
                r = p - q + 1;
            }
        }
    }
    Ok(Acyclicity {
        r,
        stabilization: how,
        settled_at: settled,
    })
}

/// Order of generating compatibility conditions of a formally integrable system:
/// one more than the number of prolongations making its symbol 2-acyclic.
pub fn cc_order_bound(s: &JetSystem) -> Result<usize> {
    if !crate::involution::formally_integrable(s)? {
        return Err(Error::Precondition(
            "system is not formally integrable; complete it first".into(),
        ));
    }
    Ok(acyclicity(s, 2)?.r + 1)
}

/// Top-order rows of a system as a symbol.
pub fn top_symbol(s: &JetSystem) -> SymbolSpace {
    symbol_space(s, 0)
}
