//! Inverse systems: truncated sections of R, the Spencer operator acting on
//! them, and their rendering as modular equations.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::involution::complete;
use crate::jets::{
    all_jets, decode, form_order, jet_key, key_order, shift_key, JetSystem, Prolongation,
};
use crate::kernel::{MultiIndex, RatFunc};
use crate::linalg::{Echelon, Key, SVec};
use crate::ore::OpMatrix;

/// Values f^k_μ for all jets of order at most `order`; absent keys are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    n: usize,
    m: usize,
    order: usize,
    values: SVec,
}

impl Section {
    pub fn zero(n: usize, m: usize, order: usize) -> Self {
        Section {
            n,
            m,
            order,
            values: SVec::new(),
        }
    }

    /// Values given as an SVec over jet keys; entries above `order` are dropped.
    pub fn from_values(n: usize, m: usize, order: usize, values: SVec) -> Self {
        Section {
            n,
            m,
            order,
            values: values.filter(|k| key_order(k) <= order),
        }
    }

    /// Truncation of j_q(P) for a vector of functions P.
    pub fn jet_of(n: usize, p: &[RatFunc], order: usize) -> Self {
        let mut v = Vec::new();
        for (k, pk) in p.iter().enumerate() {
            for mu in MultiIndex::all_up_to(n, order) {
                let mut f = pk.clone();
                for i in mu.axes() {
                    f = f.derive(i);
                }
                if !f.is_zero() {
                    v.push((jet_key(k, &mu), f));
                }
            }
        }
        Section {
            n,
            m: p.len(),
            order,
            values: SVec::from_unsorted(v),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &SVec {
        &self.values
    }

    pub fn value(&self, k: usize, mu: &MultiIndex) -> RatFunc {
        self.values.get(jet_key(k, mu))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_zero()
    }

    pub fn truncate(&self, order: usize) -> Section {
        Section::from_values(self.n, self.m, order.min(self.order), self.values.clone())
    }

    /// Σ a_μ f_μ for a jet form a.
    pub fn contract(&self, form: &SVec) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (k, c) in form.entries() {
            let f = self.values.get(*k);
            if !f.is_zero() {
                acc = acc.add(&c.mul(&f));
            }
        }
        acc
    }

    /// Whether every equation of the system, prolonged up to this order,
    /// contracts to zero.
    pub fn satisfies(&self, s: &JetSystem) -> bool {
        self.satisfies_all(&equations_upto(s, self.order))
    }

    pub fn satisfies_all(&self, rows: &[SVec]) -> bool {
        rows.iter().all(|r| self.contract(r).is_zero())
    }

    pub fn add(&self, other: &Section) -> Section {
        let order = self.order.min(other.order);
        Section::from_values(self.n, self.m, order, self.values.add(&other.values))
    }

    pub fn scale(&self, c: &RatFunc) -> Section {
        Section {
            values: self.values.scale(c),
            ..self.clone()
        }
    }
}

/// Solved form of the equations of order at most q obtained by prolonging
/// the system up to order q.
pub fn equations_upto(s: &JetSystem, q: usize) -> Vec<SVec> {
    let gens = s
        .equations()
        .iter()
        .map(|e| (e.clone(), form_order(e)))
        .collect();
    let mut p = Prolongation::with_orders(s.n(), gens, false);
    p.extend_to(q);
    p.echelon().rref().into_iter().map(|(v, _)| v).collect()
}

/// The Spencer operator: component i is (∂_i f^k_μ − f^k_{μ+1_i}) for |μ| ≤ q
/// when f has order q + 1.
pub fn spencer_apply(f: &Section) -> Result<Vec<Section>> {
    if f.order == 0 {
        return Err(Error::Precondition(
            "the Spencer operator needs a section of order at least 1".into(),
        ));
    }
    let q = f.order - 1;
    let jets = all_jets(f.n, f.m, q);
    let out = (1..=f.n)
        .map(|i| {
            let v: Vec<(Key, RatFunc)> = jets
                .iter()
                .filter_map(|&k| {
                    let c = f
                        .values
                        .get(k)
                        .derive(i)
                        .sub(&f.values.get(shift_key(k, i)));
                    (!c.is_zero()).then_some((k, c))
                })
                .collect();
            Section {
                n: f.n,
                m: f.m,
                order: q,
                values: SVec::from_sorted(v),
            }
        })
        .collect();
    Ok(out)
}

/// Basis of the solutions at order q of the system prolonged up to order q,
/// one section per parametric jet: that jet is 1, the other parametric jets 0.
pub fn section_basis(s: &JetSystem, q: usize) -> Vec<Section> {
    basis_with_keys(s, q).into_iter().map(|(_, f)| f).collect()
}

/// Parametric jets of order at most q, in the order of `section_basis`.
pub fn parametric_jets(s: &JetSystem, q: usize) -> Vec<(usize, MultiIndex)> {
    basis_with_keys(s, q)
        .into_iter()
        .map(|(k, _)| decode(k, s.n()))
        .collect()
}

fn basis_with_keys(s: &JetSystem, q: usize) -> Vec<(Key, Section)> {
    let (n, m) = (s.n(), s.m());
    let rows = equations_upto(s, q);
    let pivots: HashSet<Key> = rows.iter().filter_map(|r| r.lead_key()).collect();
    all_jets(n, m, q)
        .into_iter()
        .filter(|k| !pivots.contains(k))
        .map(|par| {
            let mut v = vec![(par, RatFunc::one())];
            for r in &rows {
                let c = r.get(par);
                if !c.is_zero() {
                    v.push((r.lead_key().expect("nonzero row"), c.neg()));
                }
            }
            (
                par,
                Section {
                    n,
                    m,
                    order: q,
                    values: SVec::from_unsorted(v),
                },
            )
        })
        .collect()
}

/// The formal sum Σ f^k_μ a^μ_k over the nonzero values of a section.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularEquation {
    pub m: usize,
    /// (unknown, multi-index, coefficient), by increasing order and then by
    /// the sorted axis list.
    pub terms: Vec<(usize, MultiIndex, RatFunc)>,
}

impl ModularEquation {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Upper-index labels like `1113`, `0` for the empty multi-index.
    pub fn support(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(k, mu, _)| label(*k, mu, self.m))
            .collect()
    }
}

fn label(k: usize, mu: &MultiIndex, m: usize) -> String {
    let up: String = if mu.is_zero() {
        "0".into()
    } else {
        mu.axes().iter().map(|i| i.to_string()).collect()
    };
    if m == 1 {
        up
    } else {
        format!("{up}_{}", k + 1)
    }
}

pub fn modular_equation(f: &Section) -> ModularEquation {
    let mut terms: Vec<(usize, MultiIndex, RatFunc)> = f
        .values
        .entries()
        .iter()
        .map(|(key, c)| {
            let (k, mu) = decode(*key, f.n);
            (k, mu, c.clone())
        })
        .collect();
    terms.sort_by(|a, b| (a.1.order(), a.1.axes(), a.0).cmp(&(b.1.order(), b.1.axes(), b.0)));
    ModularEquation { m: f.m, terms }
}

impl fmt::Display for ModularEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (k, mu, c)) in self.terms.iter().enumerate() {
            let a = format!("a^{}", label(*k, mu, self.m));
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, cs),
            };
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            match body.as_str() {
                "1" => write!(f, "{a}")?,
                b if b.contains(' ') => write!(f, "({b})*{a}")?,
                b => write!(f, "{b}*{a}")?,
            }
        }
        Ok(())
    }
}

/// R for an operator: its formally integrable completion, the order at
/// which it was found and, for systems of finite type, a basis of R.
#[derive(Clone, Debug)]
pub struct InverseSystem {
    pub system: JetSystem,
    pub order: usize,
    pub finite_type: bool,
    /// Sections of R_order, one per parametric jet.
    pub basis: Vec<Section>,
    /// The parametric jet of each basis section.
    pub parametric: Vec<(usize, MultiIndex)>,
}

pub fn inverse_system(d: &OpMatrix) -> Result<InverseSystem> {
    let s = JetSystem::from_opmatrix(d).autoreduce()?;
    let done = complete(&s)?;
    let system = done.original_frame;
    let order = done.order;
    let (keys, basis): (Vec<Key>, Vec<Section>) =
        basis_with_keys(&system, order).into_iter().unzip();
    let finite_type = section_basis(&system, order + 1).len() == basis.len();
    let parametric = keys.iter().map(|&k| decode(k, d.n())).collect();
    Ok(InverseSystem {
        system,
        order,
        finite_type,
        basis,
        parametric,
    })
}

impl InverseSystem {
    /// dim_K R when finite.
    pub fn dim(&self) -> Option<usize> {
        self.finite_type.then_some(self.basis.len())
    }

    fn require_finite(&self) -> Result<()> {
        if self.finite_type {
            Ok(())
        } else {
            Err(Error::Precondition(
                "the system is not of finite type".into(),
            ))
        }
    }

    /// The unique section of R_target restricting to f, for systems of finite type.
    pub fn extend(&self, f: &Section, target: usize) -> Result<Section> {
        self.require_finite()?;
        if target <= f.order {
            return Ok(f.truncate(target));
        }
        let rows = equations_upto(&self.system, target);
        let mut v: Vec<(Key, RatFunc)> = f.values.entries().to_vec();
        for r in &rows {
            let lead = r.lead_key().expect("nonzero row");
            if key_order(lead) <= f.order {
                continue;
            }
            let mut val = RatFunc::zero();
            for (k, c) in &r.entries()[1..] {
                if key_order(*k) > f.order {
                    return Err(Error::Invariant(
                        "parametric jet above the order of R".into(),
                    ));
                }
                val = val.sub(&c.mul(&f.values.get(*k)));
            }
            if !val.is_zero() {
                v.push((lead, val));
            }
        }
        Ok(Section {
            n: f.n,
            m: f.m,
            order: target,
            values: SVec::from_unsorted(v),
        })
    }

    /// d_i f as a section of R, through the extension to one order higher.
    pub fn spencer(&self, f: &Section) -> Result<Vec<Section>> {
        spencer_apply(&self.extend(f, self.order + 1)?)
    }

    /// K-dimension of the D-submodule of R generated by the given sections.
    pub fn span_dim(&self, gens: &[Section]) -> Result<usize> {
        self.require_finite()?;
        let mut ech = Echelon::new();
        let mut queue: Vec<Section> = gens.iter().map(|g| g.truncate(self.order)).collect();
        while let Some(g) = queue.pop() {
            if ech.contains(&g.values) {
                continue;
            }
            ech.insert(g.values.clone(), SVec::new());
            queue.extend(self.spencer(&g)?);
        }
        Ok(ech.len())
    }

    /// Sections generating R over D, chosen greedily among the basis
    /// sections of highest parametric jet first.
    pub fn generators(&self) -> Result<Vec<Section>> {
        self.require_finite()?;
        let total = self.basis.len();
        let mut cands: Vec<(Key, &Section)> = self
            .parametric
            .iter()
            .map(|(k, mu)| jet_key(*k, mu))
            .zip(&self.basis)
            .collect();
        cands.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<Section> = Vec::new();
        let mut have = 0;
        for (_, f) in cands {
            if have == total {
                break;
            }
            let mut trial = out.clone();
            trial.push(f.clone());
            let d = self.span_dim(&trial)?;
            if d > have {
                out = trial;
                have = d;
            }
        }
        Ok(out)
    }
}
