//! Double-duality test for parametrizability, torsion elements, minimal
//! parametrizations and the differential rank of a presented module.

use crate::error::{Error, Result};
use crate::involution::complete;
use crate::jets::JetSystem;
use crate::ore::{DiffOp, OpMatrix};
use crate::sequences::{compatibility_conditions, module_contains, same_module, TrackedBasis};

/// A torsion element of the module presented by D₁ with a certificate:
/// annihilator ∘ residue = Σ certificate_j · (row j of D₁).
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionElement {
    /// The element as a row acting on the unknowns, in normal form.
    pub residue: Vec<DiffOp>,
    pub annihilator: DiffOp,
    pub certificate: Vec<DiffOp>,
}

#[derive(Clone, Debug)]
pub struct ParamReport {
    pub input: OpMatrix,
    /// ad(D₁).
    pub adjoint: OpMatrix,
    /// B = CC(ad(D₁)).
    pub b: OpMatrix,
    /// D = ad(B), the candidate parametrization.
    pub parametrization: OpMatrix,
    /// D₁′ = CC(D).
    pub d1_prime: OpMatrix,
    pub parametrizable: bool,
    pub torsion: Vec<TorsionElement>,
    /// rk_D of the presented module.
    pub rank: usize,
}

pub fn double_duality_test(d1: &OpMatrix) -> Result<ParamReport> {
    let adjoint = d1.adjoint();
    let b = compatibility_conditions(&adjoint)?;
    let parametrization = b.adjoint();
    let d1_prime = if parametrization.nrows() == 0 {
        OpMatrix::identity(d1.n(), d1.ncols())
    } else {
        compatibility_conditions(&parametrization)?
    };
    if !module_contains(&d1_prime, d1)? {
        return Err(Error::Invariant(
            "input rows do not lie in the module of D₁′".into(),
        ));
    }
    let residues = residues_outside(d1, &d1_prime)?;
    let parametrizable = residues.is_empty();
    let torsion = residues
        .into_iter()
        .map(|z| certify(d1, z))
        .collect::<Result<Vec<_>>>()?;
    let rank = rank(d1)?;
    Ok(ParamReport {
        input: d1.clone(),
        adjoint,
        b,
        parametrization,
        d1_prime,
        parametrizable,
        torsion,
        rank,
    })
}

/// Normal forms modulo D₁ of the rows of `other` that do not reduce to zero,
/// K-linearly trimmed.
fn residues_outside(d1: &OpMatrix, other: &OpMatrix) -> Result<Vec<Vec<DiffOp>>> {
    let m = d1.ncols();
    let mut out: Vec<Vec<DiffOp>> = Vec::new();
    if d1.nrows() == 0 {
        for r in 0..other.nrows() {
            if !other.row_is_zero(r) {
                out.push(other.row(r).to_vec());
            }
        }
        return Ok(out);
    }
    let mut tb = TrackedBasis::new(d1)?;
    let mut span = OpMatrix::zero(d1.n(), 0, m);
    for r in 0..other.nrows() {
        let red = tb.reduce(other.row(r))?;
        if red.is_zero() {
            continue;
        }
        let cand = OpMatrix::from_rows(d1.n(), m, vec![red.residue.clone()])?;
        if span.nrows() > 0 && crate::geometry::rows_in_span(&cand, &span) {
            continue;
        }
        span.push_row(red.residue.clone());
        out.push(red.residue);
    }
    Ok(out)
}

fn certify(d1: &OpMatrix, z: Vec<DiffOp>) -> Result<TorsionElement> {
    let n = d1.n();
    let mut stacked = OpMatrix::from_rows(n, d1.ncols(), vec![z.clone()])?;
    if d1.nrows() > 0 {
        stacked = stacked.stack(d1)?;
    }
    let cc = compatibility_conditions(&stacked)?;
    let best = (0..cc.nrows())
        .filter(|&r| !cc.get(r, 0).is_zero())
        .min_by_key(|&r| (cc.get(r, 0).order(), r))
        .ok_or_else(|| Error::Invariant("residue is not a torsion element".into()))?;
    let annihilator = cc.get(best, 0).clone();
    let certificate = cc.row(best)[1..].iter().map(|p| p.neg()).collect();
    Ok(TorsionElement {
        residue: z,
        annihilator,
        certificate,
    })
}

/// Generators of the torsion submodule with their annihilators.
pub fn torsion_generators(d1: &OpMatrix) -> Result<Vec<TorsionElement>> {
    Ok(double_duality_test(d1)?.torsion)
}

/// rk_D of the module presented by D: α at the involutive order, checked
/// against m minus the generic rank of the involutive symbol.
pub fn rank(d: &OpMatrix) -> Result<usize> {
    let (n, m) = (d.n(), d.ncols());
    if d.nrows() == 0 || d.is_zero() {
        return Ok(m);
    }
    let s = JetSystem::from_opmatrix(d).autoreduce()?;
    let done = complete(&s)?;
    let top = done.system.to_opmatrix();
    let q = done.system.order();
    let idx: Vec<usize> = (0..top.nrows())
        .filter(|&r| top.row_order(r) == q)
        .collect();
    if q == 0 {
        return Ok(m - idx.len());
    }
    let alpha = *done.system.characters().alpha.last().expect("n ≥ 1");
    let other = m as i64 - top.select_rows(&idx).generic_symbol_rank() as i64;
    if alpha != other || alpha < 0 {
        return Err(Error::Invariant(format!(
            "rank mismatch: α = {alpha}, m − symbol rank = {other} (n = {n})"
        )));
    }
    Ok(alpha as usize)
}

/// A parametrization restricted to a subset of its potentials.
#[derive(Clone, Debug, PartialEq)]
pub struct MinimalParam {
    pub operator: OpMatrix,
    pub columns: Vec<usize>,
    /// The column count equals the rank.
    pub minimal: bool,
}

/// Default number of column subsets examined.
pub const SUBSET_BUDGET: usize = 512;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn still_parametrizes(d1: &OpMatrix, cand: &OpMatrix) -> Result<bool> {
    let cc = compatibility_conditions(cand)?;
    same_module(&cc, d1)
}

/// Column subsets of `canonical` of size rk_D(M) whose compatibility
/// conditions generate D₁, in lexicographic order of the subsets.
pub fn minimal_parametrizations(
    d1: &OpMatrix,
    canonical: &OpMatrix,
    budget: usize,
) -> Result<Vec<MinimalParam>> {
    let r = rank(d1)?;
    let mut out = Vec::new();
    for cols in subsets(canonical.ncols(), r).into_iter().take(budget) {
        let cand = canonical.select_columns(&cols);
        if still_parametrizes(d1, &cand)? {
            out.push(MinimalParam {
                operator: cand,
                columns: cols,
                minimal: true,
            });
        }
    }
    Ok(out)
}

/// First minimal parametrization in subset order; falls back to greedy
/// column dropping, then to the canonical parametrization.
pub fn minimal_parametrization(d1: &OpMatrix) -> Result<MinimalParam> {
    let rep = double_duality_test(d1)?;
    if !rep.parametrizable {
        return Err(Error::Precondition("operator is not parametrizable".into()));
    }
    let canonical = rep.parametrization;
    let r = rep.rank;
    for cols in subsets(canonical.ncols(), r)
        .into_iter()
        .take(SUBSET_BUDGET)
    {
        let cand = canonical.select_columns(&cols);
        if still_parametrizes(d1, &cand)? {
            return Ok(MinimalParam {
                operator: cand,
                columns: cols,
                minimal: true,
            });
        }
    }
    let mut cols: Vec<usize> = (0..canonical.ncols()).collect();
    let mut i = cols.len();
    while i > 0 {
        i -= 1;
        let mut trial = cols.clone();
        trial.remove(i);
        if !trial.is_empty() && still_parametrizes(d1, &canonical.select_columns(&trial))? {
            cols = trial;
        }
    }
    let minimal = cols.len() == r;
    Ok(MinimalParam {
        operator: canonical.select_columns(&cols),
        columns: cols,
        minimal,
    })
}
