//! Completion to involutive form, formal integrability and δ-regular coordinates.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jets::{
    form_order, jet_dim, key_class, key_order, shift_form, sym_dim, CoordChange, JetSystem,
    Prolongation,
};
use crate::kernel::Rat;
use crate::linalg::{Echelon, SVec};

/// Limits on the completion search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Extra jet orders explored beyond the system order.
    pub prolongations: usize,
    /// Random coordinate changes tried after the permutations.
    pub retries: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            prolongations: 10,
            retries: 32,
        }
    }
}

/// A non-multiplicative prolongation that failed to reduce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// Index of the equation in the solved system.
    pub equation: usize,
    /// Axis of the prolongation (1-based).
    pub axis: usize,
    /// Normal form of the prolongation.
    pub residue: SVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutionCertificate {
    pub involutive: bool,
    pub obstructions: Vec<Obstruction>,
}

/// One tested pair (jet order N, candidate order q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub jet_order: usize,
    pub order: usize,
    /// dim R_q as seen at jet order N+1.
    pub dim: usize,
    /// Equations of order ≤ q gained by one more prolongation.
    pub gained: usize,
    pub symbol_involutive: bool,
}

#[derive(Clone, Debug)]
pub struct CompletionResult {
    /// Involutive solved system in the new coordinates.
    pub system: JetSystem,
    /// The same system in the original coordinates.
    pub original_frame: JetSystem,
    /// x = A·x′ relating old and new coordinates.
    pub change: CoordChange,
    pub trace: Vec<TraceStep>,
    /// Order of the involutive system.
    pub order: usize,
    /// Jet order at which it was found.
    pub jet_order: usize,
    pub formally_integrable: bool,
}

/// Completion state shared with the syzygy and reduction machinery.
#[derive(Clone, Debug)]
pub(crate) struct Engine {
    pub n: usize,
    pub m: usize,
    pub p: Prolongation,
    pub q0: usize,
    pub q_inv: usize,
    pub n_star: usize,
    pub change: CoordChange,
    pub trace: Vec<TraceStep>,
    pub formally_integrable: bool,
}

impl Engine {
    /// Runs the completion on generators (form, order) of a row module.
    pub fn run(
        n: usize,
        m: usize,
        gens: Vec<(SVec, usize)>,
        track: bool,
        budget: Budget,
    ) -> Result<Engine> {
        let q0 = gens.iter().map(|g| g.1).max().unwrap_or(0);
        let seed_text = {
            let mut s = format!("{n} {m}\n");
            for (g, _) in &gens {
                s.push_str(&crate::jets::render_form(g, n, m));
                s.push('\n');
            }
            s
        };
        let mut p = Prolongation::with_orders(n, gens, track);
        p.extend_to(q0);
        let mut counts: Vec<Vec<usize>> = vec![Vec::new(); q0];
        counts.push((0..=q0).map(|q| p.count_upto(q)).collect());
        let mut trace = Vec::new();
        for big_n in q0..=q0 + budget.prolongations {
            p.extend_to(big_n + 1);
            counts.push((0..=big_n + 1).map(|q| p.count_upto(q)).collect());
            for q in q0.max(1)..=big_n {
                let before = counts[big_n][q];
                let after = counts[big_n + 1][q];
                let mut step = TraceStep {
                    jet_order: big_n,
                    order: q,
                    dim: jet_dim(n, m, q) - after,
                    gained: after - before,
                    symbol_involutive: false,
                };
                if after != before {
                    trace.push(step);
                    continue;
                }
                let sym: Vec<SVec> = p
                    .echelon()
                    .rows()
                    .filter(|(v, _)| form_order(v) == q)
                    .map(|(v, _)| v.filter(|k| key_order(k) == q))
                    .collect();
                let found = regular_coordinates(&sym, n, m, q, &seed_text, budget.retries);
                step.symbol_involutive = found.is_some();
                trace.push(step);
                if let Some(change) = found {
                    let formally_integrable =
                        (q0..=big_n).all(|l| counts[big_n][l] == counts[l][l]);
                    return Ok(Engine {
                        n,
                        m,
                        p,
                        q0,
                        q_inv: q,
                        n_star: big_n,
                        change,
                        trace,
                        formally_integrable,
                    });
                }
            }
        }
        Err(Error::Budget(format!(
            "no involutive order found up to jet order {}",
            q0 + budget.prolongations
        )))
    }

    /// Rows of M ∩ ord≤q in solved form, original coordinates.
    pub fn solved_upto(&self, q: usize) -> Vec<SVec> {
        let mut e = Echelon::new();
        for (v, _) in self.p.echelon().rows() {
            if form_order(v) <= q {
                e.insert(v.clone(), SVec::new());
            }
        }
        e.rref().into_iter().map(|(v, _)| v).collect()
    }

    /// Jet order that makes E_L contain M ∩ ord≤r.
    pub fn level_for(&self, r: usize) -> usize {
        self.n_star + r.saturating_sub(self.q_inv)
    }

    pub fn result(&self) -> CompletionResult {
        let rows = self.solved_upto(self.q_inv);
        let original_frame = JetSystem::new(self.n, self.m, self.q_inv, rows.clone());
        let system = if self.change.is_identity() {
            original_frame.clone()
        } else {
            let t = self.change.transform_forms(&rows, true);
            JetSystem::new(self.n, self.m, self.q_inv, t)
                .autoreduce()
                .expect("autoreduce")
        };
        CompletionResult {
            system,
            original_frame,
            change: self.change.clone(),
            trace: self.trace.clone(),
            order: self.q_inv,
            jet_order: self.n_star,
            formally_integrable: self.formally_integrable,
        }
    }
}

/// Rank of the first prolongation of a symbol given by its rows.
pub fn prolonged_symbol_rank(sym: &[SVec], n: usize) -> usize {
    let mut e = Echelon::new();
    for v in sym {
        for i in 1..=n {
            e.insert(shift_form(v, i), SVec::new());
        }
    }
    e.len()
}

/// β^i counts (index i−1) of a symbol's solved form.
pub fn symbol_classes(sym: &[SVec], n: usize) -> Vec<usize> {
    let mut e = Echelon::new();
    for v in sym {
        e.insert(v.clone(), SVec::new());
    }
    let mut beta = vec![0; n];
    for k in e.pivot_keys() {
        if let Some(c) = key_class(k, n) {
            beta[c - 1] += 1;
        }
    }
    beta
}

fn cartan_sum(beta: &[usize]) -> usize {
    beta.iter().enumerate().map(|(i, b)| (i + 1) * b).sum()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i + 1);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn determinant(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for j in c..n {
                let t = &m[c][j] * &f;
                m[r][j] -= t;
            }
        }
    }
    det
}

fn seed_of(text: &str) -> u64 {
    let h = Sha256::digest(text.as_bytes());
    u64::from_le_bytes(h[..8].try_into().expect("eight bytes"))
}

/// Candidate coordinate changes in search order: identity, reversal, the
/// other permutations in lexicographic order, then seeded random
/// unimodular matrices.
pub fn candidate_changes(
    n: usize,
    seed_text: &str,
    retries: usize,
) -> impl Iterator<Item = CoordChange> {
    let mut perms = permutations(n);
    if n > 1 {
        let rev = perms.pop().expect("reversal is last");
        perms.insert(1, rev);
    }
    let perms = perms.into_iter().map(|p| CoordChange::permutation(&p));
    let mut rng = ChaCha8Rng::seed_from_u64(seed_of(seed_text));
    let mut made = 0;
    let randoms = std::iter::from_fn(move || {
        if made >= retries {
            return None;
        }
        for _ in 0..100_000 {
            let a: Vec<Vec<Rat>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| Rat::from_integer(rng.gen_range(-2i64..=2).into()))
                        .collect()
                })
                .collect();
            if determinant(&a).abs().is_one() {
                made += 1;
                return CoordChange::from_matrix(a).ok();
            }
        }
        None
    });
    perms.chain(randoms)
}

/// First coordinate change in which a symbol passes Cartan's test.
fn regular_coordinates(
    sym: &[SVec],
    n: usize,
    m: usize,
    q: usize,
    seed_text: &str,
    retries: usize,
) -> Option<CoordChange> {
    if q == 0 || sym.is_empty() {
        return Some(CoordChange::identity(n));
    }
    if symbol_classes(sym, n).iter().sum::<usize>() == sym_dim(n, m, q) {
        return Some(CoordChange::identity(n));
    }
    let r1 = prolonged_symbol_rank(sym, n);
    for c in candidate_changes(n, seed_text, retries) {
        let t = if c.is_identity() {
            sym.to_vec()
        } else {
            c.transform_forms(sym, false)
        };
        if cartan_sum(&symbol_classes(&t, n)) == r1 {
            return Some(c);
        }
    }
    None
}

/// Literal Janet test: every non-multiplicative prolongation of a solved
/// system reduces to zero modulo the equations and their multiplicative
/// prolongations.
pub fn involution_check(s: &JetSystem) -> Result<InvolutionCertificate> {
    if !s.is_solved() {
        return Err(Error::Precondition(
            "involution check needs a solved system".into(),
        ));
    }
    let n = s.n();
    let eqs = s.equations();
    let top = eqs.iter().map(form_order).max().unwrap_or(0);
    let classes: Vec<usize> = eqs
        .iter()
        .map(|e| {
            let k = e.lead_key().expect("nonzero equation");
            if key_order(k) == top && top > 0 {
                key_class(k, n).unwrap_or(0)
            } else {
                0
            }
        })
        .collect();
    let mut span = Echelon::new();
    for e in eqs {
        span.insert(e.clone(), SVec::new());
    }
    for (e, &c) in eqs.iter().zip(&classes) {
        for i in 1..=c {
            span.insert(crate::jets::derive_form(e, i), SVec::new());
        }
    }
    let mut obstructions = Vec::new();
    for (idx, (e, &c)) in eqs.iter().zip(&classes).enumerate() {
        for j in c + 1..=n {
            let r = span.normal_form(&crate::jets::derive_form(e, j));
            if !r.is_zero() {
                obstructions.push(Obstruction {
                    equation: idx,
                    axis: j,
                    residue: r,
                });
            }
        }
    }
    Ok(InvolutionCertificate {
        involutive: obstructions.is_empty(),
        obstructions,
    })
}

fn system_gens(s: &JetSystem) -> Vec<(SVec, usize)> {
    s.equations()
        .iter()
        .map(|e| (e.clone(), form_order(e)))
        .collect()
}

pub fn complete_with(s: &JetSystem, budget: Budget) -> Result<CompletionResult> {
    let gens = system_gens(s);
    let mut e = Engine::run(s.n(), s.m(), gens, false, budget)?;
    if e.q0 < s.order() {
        e.q0 = s.order();
    }
    Ok(e.result())
}

/// Completes a system to an involutive one with the default budget.
pub fn complete(s: &JetSystem) -> Result<CompletionResult> {
    complete_with(s, Budget::default())
}

/// True when prolongation never produces new equations of lower order.
pub fn formally_integrable(s: &JetSystem) -> Result<bool> {
    Ok(complete(s)?.formally_integrable)
}

/// Coordinates in which the top-order symbol of `s` passes Cartan's test.
pub fn delta_regular_change(s: &JetSystem) -> Result<CoordChange> {
    delta_regular_change_with(s, Budget::default())
}

pub fn delta_regular_change_with(s: &JetSystem, budget: Budget) -> Result<CoordChange> {
    let q = s.order();
    let sym = s.symbol_rows();
    regular_coordinates(&sym, s.n(), s.m(), q, &s.canonical_text(), budget.retries).ok_or_else(|| {
        let beta = symbol_classes(&sym, s.n());
        Error::DeltaRegularity(format!(
            "symbol of order {q} fails Cartan's test in all {} candidates (prolonged rank {}, identity classes {:?})",
            permutations(s.n()).len() + budget.retries,
            prolonged_symbol_rank(&sym, s.n()),
            beta
        ))
    })
}

/// Cartan's test on a symbol of order q given by its defining rows, over the
/// standard candidate coordinates.
pub fn symbol_involutive(sym: &[SVec], n: usize, m: usize, q: usize) -> bool {
    let mut text = format!("{n} {m} {q}\n");
    for v in sym {
        text.push_str(&crate::jets::render_form(v, n, m));
        text.push('\n');
    }
    regular_coordinates(sym, n, m, q, &text, Budget::default().retries).is_some()
}
