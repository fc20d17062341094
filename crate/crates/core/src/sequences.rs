//! Compatibility conditions, Janet sequences, free resolutions and the
//! Spencer/Janet bundle dimensions of involutive systems.

use std::collections::HashMap;

use crate::delta::{delta_apply, form_key, skew_basis, SymbolSpace};
use crate::error::{Error, Result};
use crate::involution::{formally_integrable, involution_check, Budget, CompletionResult, Engine};
use crate::jets::{form_order, form_row, jet_dim, key_order, row_form, JetSystem, Prolongation};
use crate::kernel::{binomial, MultiIndex, RatFunc};
use crate::linalg::{Echelon, Inserted, SVec};
use crate::ore::{DiffOp, OpMatrix};

fn generators(d: &OpMatrix) -> Vec<(SVec, usize)> {
    (0..d.nrows())
        .map(|r| (row_form(d, r), d.row_order(r)))
        .collect()
}

fn budget_from_env() -> Budget {
    let mut b = Budget::default();
    if let Some(v) = std::env::var("INVOLUTOR_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
    {
        b.prolongations = v;
    }
    b
}

/// Result of the syzygy computation.
#[derive(Clone, Debug)]
pub struct CcReport {
    /// Generating compatibility conditions, one row per generator.
    pub operator: OpMatrix,
    /// Syzygies of operator order up to this bound were all examined.
    pub search_order: usize,
    /// Jet order reached by the tracked prolongation.
    pub jet_level: usize,
    /// Whether the input rows were already formally integrable.
    pub formally_integrable: bool,
}

pub fn compatibility_conditions(d: &OpMatrix) -> Result<OpMatrix> {
    Ok(compatibility_conditions_with(d, budget_from_env())?.operator)
}

pub fn compatibility_conditions_with(d: &OpMatrix, budget: Budget) -> Result<CcReport> {
    let (n, rows) = (d.n(), d.nrows());
    if rows == 0 {
        return Ok(CcReport {
            operator: OpMatrix::zero(n, 0, 0),
            search_order: 0,
            jet_level: 0,
            formally_integrable: true,
        });
    }
    let gens = generators(d);
    let q_min = gens.iter().map(|g| g.1).min().unwrap_or(0);
    let mut eng = Engine::run(n, d.ncols(), gens, true, budget)?;
    let q0 = eng.q0;
    let search_order = eng.n_star + 1 - q_min;
    let jet_level = q0 + search_order;
    eng.p.extend_to(jet_level);

    let mut syz = Echelon::new();
    for (_, t) in eng.p.dependencies() {
        syz.insert(t.clone(), SVec::new());
    }
    let candidates: Vec<SVec> = syz.rref().into_iter().map(|(v, _)| v).collect();

    let mut span = Prolongation::with_orders(n, Vec::new(), false);
    let mut kept: Vec<(SVec, usize)> = Vec::new();
    for s in 0..=search_order {
        span.extend_to(s);
        let mut stage = Vec::new();
        for v in candidates.iter().filter(|v| form_order(v) == s) {
            let r = span.echelon().normal_form(v);
            if r.is_zero() {
                continue;
            }
            stage.push(r.clone());
            span.add_generator(r, s);
        }
        let mut e = Echelon::new();
        for v in stage {
            e.insert(v, SVec::new());
        }
        kept.extend(e.rref().into_iter().map(|(v, _)| (v.monic(), s)));
    }
    let kept = drop_redundant(n, kept, search_order);

    let mut out = OpMatrix::zero(n, 0, rows);
    for (g, _) in &kept {
        out.push_row(form_row(g, n, rows));
    }
    Ok(CcReport {
        operator: out,
        search_order,
        jet_level,
        formally_integrable: eng.formally_integrable,
    })
}

/// Removes generators lying in the module spanned by the others, truncated at `bound`.
fn drop_redundant(n: usize, mut kept: Vec<(SVec, usize)>, bound: usize) -> Vec<(SVec, usize)> {
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        if !kept
            .iter()
            .enumerate()
            .any(|(j, g)| j != i && g.1 > kept[i].1)
        {
            continue;
        }
        let others: Vec<(SVec, usize)> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let mut p = Prolongation::with_orders(n, others, false);
        p.extend_to(bound.max(kept[i].1));
        if p.echelon().contains(&kept[i].0) {
            kept.remove(i);
        }
    }
    kept
}

/// Relations Σ c d_ν Φ_τ = 0 among the rows of `d` found up to jet order
/// `level`, as operator rows. Computed without completion or minimization.
pub fn raw_syzygies(d: &OpMatrix, level: usize) -> Vec<Vec<DiffOp>> {
    let mut p = Prolongation::with_orders(d.n(), generators(d), true);
    p.extend_to(level);
    p.dependencies()
        .iter()
        .map(|(_, t)| form_row(t, d.n(), d.nrows()))
        .collect()
}

/// Quotient and remainder of a row against a tracked basis: row = Q·D + residue.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub quotient: Vec<DiffOp>,
    pub residue: Vec<DiffOp>,
}

impl Reduction {
    pub fn is_zero(&self) -> bool {
        self.residue.iter().all(|p| p.is_zero())
    }
}

/// Completed row module of an operator with the bookkeeping that expresses
/// its generators through the original rows and back.
#[derive(Clone, Debug)]
pub struct TrackedBasis {
    d: OpMatrix,
    engine: Engine,
}

impl TrackedBasis {
    pub fn new(d: &OpMatrix) -> Result<Self> {
        Self::with_budget(d, budget_from_env())
    }

    pub fn with_budget(d: &OpMatrix, budget: Budget) -> Result<Self> {
        let engine = Engine::run(d.n(), d.ncols(), generators(d), true, budget)?;
        Ok(TrackedBasis {
            d: d.clone(),
            engine,
        })
    }

    pub fn operator(&self) -> &OpMatrix {
        &self.d
    }

    pub fn completion(&self) -> CompletionResult {
        self.engine.result()
    }

    fn solved(&self) -> Vec<(SVec, SVec)> {
        let q = self.engine.q_inv;
        self.engine
            .p
            .echelon()
            .rref()
            .into_iter()
            .filter(|(v, _)| form_order(v) <= q)
            .collect()
    }

    /// Generators G of the completed module (original coordinates), with T
    /// such that G = T·D.
    pub fn generators(&self) -> (OpMatrix, OpMatrix) {
        let (n, m, r) = (self.d.n(), self.d.ncols(), self.d.nrows());
        let mut g = OpMatrix::zero(n, 0, m);
        let mut t = OpMatrix::zero(n, 0, r);
        for (v, tag) in self.solved() {
            g.push_row(form_row(&v, n, m));
            t.push_row(form_row(&tag, n, r));
        }
        (g, t)
    }

    /// R with D = R·G; the entries of R are multiplications.
    pub fn reverse(&self) -> Result<OpMatrix> {
        let n = self.d.n();
        let solved = self.solved();
        let mut e = Echelon::new();
        for (j, (v, _)) in solved.iter().enumerate() {
            if let Inserted::Dependent(_) = e.insert(v.clone(), SVec::unit(j as u128)) {
                return Err(Error::Invariant(
                    "dependent generator in solved basis".into(),
                ));
            }
        }
        let mut out = OpMatrix::zero(n, 0, solved.len());
        for r in 0..self.d.nrows() {
            let (res, tag) = e.reduce(&row_form(&self.d, r), &SVec::new(), true);
            if !res.is_zero() {
                return Err(Error::Invariant(format!(
                    "row {} is not in the span of the generators",
                    r + 1
                )));
            }
            let mut row = vec![DiffOp::zero(n); solved.len()];
            for (k, c) in tag.entries() {
                row[*k as usize] = DiffOp::coeff(n, c.neg());
            }
            out.push_row(row);
        }
        Ok(out)
    }

    /// Normal form of a row modulo the module, with the certificate Q.
    pub fn reduce(&mut self, row: &[DiffOp]) -> Result<Reduction> {
        let (n, m) = (self.d.n(), self.d.ncols());
        if row.len() != m {
            return Err(Error::Shape(format!(
                "row has {} entries, operator has {m} columns",
                row.len()
            )));
        }
        let probe = OpMatrix::from_rows(n, m, vec![row.to_vec()])?;
        let v = row_form(&probe, 0);
        let level = self.engine.level_for(form_order(&v));
        if self.engine.p.level().map_or(true, |l| l < level) {
            self.engine.p.extend_to(level);
        }
        let (res, tag) = self.engine.p.echelon().reduce(&v, &SVec::new(), true);
        Ok(Reduction {
            quotient: form_row(&tag.neg(), n, self.d.nrows()),
            residue: form_row(&res, n, m),
        })
    }

    pub fn contains(&mut self, row: &[DiffOp]) -> Result<bool> {
        Ok(self.reduce(row)?.is_zero())
    }
}

/// Whether every row of `a` lies in the row module of `b`.
pub fn module_contains(b: &OpMatrix, a: &OpMatrix) -> Result<bool> {
    if a.nrows() == 0 {
        return Ok(true);
    }
    if b.nrows() == 0 {
        return Ok(a.is_zero());
    }
    let mut tb = TrackedBasis::new(b)?;
    for r in 0..a.nrows() {
        if !tb.contains(a.row(r))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Equality of the row modules of two operators with the same columns.
pub fn same_module(a: &OpMatrix, b: &OpMatrix) -> Result<bool> {
    Ok(module_contains(a, b)? && module_contains(b, a)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceReport {
    /// D, D₁, D₂, … ; each composes to zero with the previous one.
    pub operators: Vec<OpMatrix>,
    /// dim E, dim F₀, dim F₁, …
    pub dims: Vec<usize>,
    pub orders: Vec<usize>,
    /// Formal integrability of each operator's rows.
    pub stage_integrable: Vec<bool>,
    /// The first operator is involutive as given.
    pub involutive: bool,
    /// The last computed operator has no compatibility conditions.
    pub complete: bool,
    /// Σ (−1)^r dim F_r.
    pub euler: i64,
    /// α of the involutive form of the first operator.
    pub alpha: usize,
    /// Spencer bundle dims C_0..C_n of the involutive form.
    pub spencer: Vec<usize>,
    /// Janet bundle dims F_0..F_n of the involutive form.
    pub janet_bundles: Vec<usize>,
}

impl SequenceReport {
    pub fn formally_exact(&self) -> bool {
        self.complete
    }

    pub fn strictly_exact(&self) -> bool {
        self.complete && self.stage_integrable.iter().all(|&b| b)
    }
}

fn sequence(
    first: OpMatrix,
    length: usize,
    budget: Budget,
) -> Result<(Vec<OpMatrix>, Vec<bool>, bool)> {
    let mut ops = Vec::new();
    let mut fi = Vec::new();
    let mut cur = first;
    loop {
        let rep = compatibility_conditions_with(&cur, budget)?;
        fi.push(rep.formally_integrable);
        ops.push(cur);
        if rep.operator.nrows() == 0 {
            return Ok((ops, fi, true));
        }
        if ops.len() >= length {
            return Ok((ops, fi, false));
        }
        cur = rep.operator;
    }
}

fn report(
    ops: Vec<OpMatrix>,
    fi: Vec<bool>,
    complete: bool,
    m: usize,
    first: &JetSystem,
) -> Result<SequenceReport> {
    let mut dims = vec![m];
    dims.extend(ops.iter().map(|d| d.nrows()));
    let orders = ops.iter().map(|d| d.order()).collect();
    let euler = dims[1..]
        .iter()
        .enumerate()
        .map(|(r, &d)| if r % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum();
    let completed = crate::involution::complete(first)?;
    let alpha = *completed.system.characters().alpha.last().unwrap_or(&0) as usize;
    let spencer = spencer_bundle_dims(&completed.system)?;
    let janet_bundles = janet_bundle_dims(&completed.system)?;
    let involutive = involution_check(first)
        .map(|c| c.involutive)
        .unwrap_or(false);
    Ok(SequenceReport {
        operators: ops,
        dims,
        orders,
        stage_integrable: fi,
        involutive,
        complete,
        euler,
        alpha,
        spencer,
        janet_bundles,
    })
}

/// Janet sequence of D: D is first replaced by its formally integrable
/// projection at its own order, then compatibility conditions are iterated.
pub fn janet_sequence(d: &OpMatrix, length: usize) -> Result<SequenceReport> {
    let (n, m) = (d.n(), d.ncols());
    let budget = budget_from_env();
    let eng = Engine::run(n, m, generators(d), false, budget)?;
    let rows = eng.solved_upto(eng.q0);
    let sys = JetSystem::new(n, m, eng.q0, rows);
    let first = sys.to_opmatrix();
    let (ops, fi, complete) = sequence(first, length.max(1), budget)?;
    report(ops, fi, complete, m, &sys)
}

/// Free resolution of the module presented by D, iterating compatibility
/// conditions on D itself.
pub fn resolution(d: &OpMatrix, length: usize) -> Result<SequenceReport> {
    let m = d.ncols();
    let budget = budget_from_env();
    let sys = JetSystem::from_opmatrix(d);
    let (ops, fi, complete) = sequence(d.clone(), length.max(1), budget)?;
    report(ops, fi, complete, m, &sys)
}

/// Symbol g_q of all order-q consequences of the system rows up to order q.
pub fn full_symbol(s: &JetSystem) -> SymbolSpace {
    let (n, m, q) = (s.n(), s.m(), s.order());
    let mut p = Prolongation::new(n, s.equations().to_vec(), false);
    p.extend_to(q);
    let rows = p
        .rows_upto(q)
        .into_iter()
        .filter(|(v, _)| form_order(v) == q)
        .map(|(v, _)| v.filter(|k| key_order(k) == q))
        .collect();
    SymbolSpace::from_equations(n, m, q, rows)
}

fn dim_rq(s: &JetSystem) -> usize {
    s.solution_dims(0)[0].dim
}

fn require_integrable(s: &JetSystem) -> Result<()> {
    if !formally_integrable(s)? {
        return Err(Error::Precondition(
            "system is not formally integrable; complete it first".into(),
        ));
    }
    Ok(())
}

/// dim C_r = C(n,r)·dim R_q − rank(δ: Λ^{r−1}⊗g_{q+1} → Λ^r⊗g_q), r = 0..n.
pub fn spencer_bundle_dims(s: &JetSystem) -> Result<Vec<usize>> {
    require_integrable(s)?;
    let n = s.n();
    let rq = dim_rq(s);
    let g1 = full_symbol(s).prolong();
    let mut out = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let img = if r == 0 {
            0
        } else {
            crate::delta::rank_of(crate::delta::delta_map(&g1, r - 1))
        };
        out.push(binomial(n as u64, r as u64) as usize * rq - img);
    }
    Ok(out)
}

/// dim F_r = C(n,r)·dim F₀ − rank(Λ^{r−1}⊗S_{q+1}⊗E → Λ^r⊗S_q⊗E → Λ^r⊗F₀), r = 0..n.
pub fn janet_bundle_dims(s: &JetSystem) -> Result<Vec<usize>> {
    require_integrable(s)?;
    let (n, m, q) = (s.n(), s.m(), s.order());
    let f0 = jet_dim(n, m, q) - dim_rq(s);
    let sym = full_symbol(s).equations;
    let top: Vec<MultiIndex> = MultiIndex::all_of_order(n, q + 1);
    let mut out = vec![f0];
    for r in 1..=n {
        let mut e = Echelon::new();
        for f in 0..skew_basis(n, r - 1).len() {
            for k in 0..m {
                for mu in &top {
                    let img = delta_apply(&SVec::unit(form_key(f, k, m, mu)), n, m, r - 1);
                    let mut by_form: HashMap<usize, Vec<(u128, RatFunc)>> = HashMap::new();
                    for (key, c) in img.entries() {
                        let (fk, nu) = crate::jets::decode(*key, n);
                        by_form
                            .entry(fk / m)
                            .or_default()
                            .push((crate::jets::jet_key(fk % m, &nu), c.clone()));
                    }
                    let mut v = Vec::new();
                    for (g, comps) in by_form {
                        let w = SVec::from_unsorted(comps);
                        for (j, row) in sym.iter().enumerate() {
                            let mut acc = RatFunc::zero();
                            for (key, c) in w.entries() {
                                acc = acc.add(&row.get(*key).mul(c));
                            }
                            if !acc.is_zero() {
                                v.push(((g * sym.len() + j) as u128, acc));
                            }
                        }
                    }
                    e.insert(SVec::from_unsorted(v), SVec::new());
                }
            }
        }
        out.push(binomial(n as u64, r as u64) as usize * f0 - e.len());
    }
    Ok(out)
}

/// Outcome of the Euler–Poincaré checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerVerdict {
    /// (Σ (−1)^r dim F_r, m − α) over the Janet bundles.
    pub janet: (i64, i64),
    /// (Σ (−1)^r dim C_r, α).
    pub spencer: (i64, i64),
    /// (Σ (−1)^r rows of D_r, m − α), when the sequence is complete.
    pub operators: Option<(i64, i64)>,
}

fn alternating(v: &[usize]) -> i64 {
    v.iter()
        .enumerate()
        .map(|(r, &d)| if r % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum()
}

pub fn euler_check(rep: &SequenceReport) -> Result<EulerVerdict> {
    let m = rep.dims[0] as i64;
    let a = rep.alpha as i64;
    let v = EulerVerdict {
        janet: (alternating(&rep.janet_bundles), m - a),
        spencer: (alternating(&rep.spencer), a),
        operators: rep.complete.then_some((rep.euler, m - a)),
    };
    let bad = |p: (i64, i64)| p.0 != p.1;
    if bad(v.janet) || bad(v.spencer) || v.operators.map_or(false, bad) {
        return Err(Error::Invariant(format!("Euler–Poincaré mismatch: {v:?}")));
    }
    Ok(v)
}
