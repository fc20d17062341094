//! Linearized operators of Riemannian and conformal geometry at constant
//! metrics, and the algebraic Ricci/Weyl splitting of curvature tensors.

use num::{One, Zero};

use crate::delta::{delta_apply, form_key, skew_basis, SymbolSpace};
use crate::error::{Error, Result};
use crate::jets::{decode, row_form, JetSystem};
use crate::kernel::{MultiIndex, Rat, RatFunc};
use crate::linalg::{Echelon, Inserted, SVec};
use crate::ore::{DiffOp, OpMatrix};

/// Constant symmetric nondegenerate metric with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstMetric {
    n: usize,
    w: Vec<Vec<Rat>>,
    inv: Vec<Vec<Rat>>,
}

impl ConstMetric {
    pub fn new(w: Vec<Vec<Rat>>) -> Result<Self> {
        let n = w.len();
        if w.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("metric must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if w[i][j] != w[j][i] {
                    return Err(Error::Malformed("metric must be symmetric".into()));
                }
            }
        }
        let inv =
            crate::jets::invert(&w).ok_or_else(|| Error::Malformed("degenerate metric".into()))?;
        Ok(ConstMetric { n, w, inv })
    }

    pub fn euclidean(n: usize) -> Self {
        Self::diagonal(&vec![1; n])
    }

    /// diag(1, …, 1, −1).
    pub fn minkowski(n: usize) -> Self {
        let mut d = vec![1; n];
        d[n - 1] = -1;
        Self::diagonal(&d)
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let n = d.len();
        let w = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rat::from_integer(d[i].into())
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(w).expect("nonzero diagonal")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// ω_ij, 1-based.
    pub fn lower(&self, i: usize, j: usize) -> &Rat {
        &self.w[i - 1][j - 1]
    }

    /// ω^ij, 1-based.
    pub fn upper(&self, i: usize, j: usize) -> &Rat {
        &self.inv[i - 1][j - 1]
    }
}

/// Index pairs i ≤ j in lexicographic order, the slots of a symmetric 2-tensor.
pub fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect()
}

/// Column of the symmetric slot (i, j).
pub fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    (1..a).map(|t| n + 1 - t).sum::<usize>() + (b - a)
}

/// Pairing weights of symmetric slots: 1 on the diagonal, 2 off it.
pub fn sym_weights(n: usize) -> Vec<RatFunc> {
    sym_pairs(n)
        .into_iter()
        .map(|(i, j)| RatFunc::int(if i == j { 1 } else { 2 }))
        .collect()
}

fn c(r: &Rat) -> RatFunc {
    RatFunc::constant(r.clone())
}

/// Killing operator ξ ↦ L(ξ)ω, row (ij): ω_rj d_i ξ^r + ω_ir d_j ξ^r.
pub fn make_killing(w: &ConstMetric) -> OpMatrix {
    let n = w.n();
    let mut m = OpMatrix::zero(n, 0, n);
    for (i, j) in sym_pairs(n) {
        let row = (1..=n)
            .map(|r| {
                DiffOp::d(n, &[i])
                    .scale(&c(w.lower(r, j)))
                    .add(&DiffOp::d(n, &[j]).scale(&c(w.lower(i, r))))
            })
            .collect();
        m.push_row(row);
    }
    m
}

/// Conformal Killing operator: trace-free part of the Killing rows, with one
/// dependent row dropped.
pub fn make_conformal_killing(w: &ConstMetric) -> Result<OpMatrix> {
    let n = w.n();
    if n < 3 {
        return Err(Error::Unsupported(
            "conformal Killing operator needs n ≥ 3".into(),
        ));
    }
    let k = make_killing(w);
    let two_over_n = Rat::new(2.into(), (n as i64).into());
    let div: Vec<DiffOp> = (1..=n).map(|r| DiffOp::d(n, &[r])).collect();
    let pairs = sym_pairs(n);
    let weight = |i: usize, j: usize| {
        if i == j {
            w.upper(i, j).clone()
        } else {
            w.upper(i, j) * Rat::from_integer(2.into())
        }
    };
    let drop = pairs
        .iter()
        .rposition(|&(i, j)| !weight(i, j).is_zero())
        .expect("nondegenerate metric");
    let mut out = OpMatrix::zero(n, 0, n);
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        if idx == drop {
            continue;
        }
        let f = c(&(w.lower(i, j) * &two_over_n));
        let row = k
            .row(idx)
            .iter()
            .zip(&div)
            .map(|(p, d)| p.sub(&d.scale(&f)))
            .collect();
        out.push_row(row);
    }
    Ok(out)
}

/// Einstein operator on symmetric Ω, row (ij) = 2E_ij.
pub fn make_einstein(w: &ConstMetric) -> Result<OpMatrix> {
    let n = w.n();
    if n < 3 {
        return Err(Error::Unsupported("Einstein operator needs n ≥ 3".into()));
    }
    let cols = n * (n + 1) / 2;
    let mut out = OpMatrix::zero(n, 0, cols);
    for (i, j) in sym_pairs(n) {
        let mut row = vec![DiffOp::zero(n); cols];
        let mut add = |a: usize, b: usize, mu: &[usize], f: Rat| {
            if f.is_zero() {
                return;
            }
            let col = sym_index(n, a, b);
            row[col] = row[col].add(&DiffOp::d(n, mu).scale(&RatFunc::constant(f)));
        };
        for r in 1..=n {
            for s in 1..=n {
                let g = w.upper(r, s).clone();
                if g.is_zero() {
                    continue;
                }
                add(r, s, &[i, j], g.clone());
                add(i, j, &[r, s], g.clone());
                add(s, j, &[r, i], -g.clone());
                add(r, i, &[s, j], -g);
            }
        }
        let wij = w.lower(i, j).clone();
        if !wij.is_zero() {
            for r in 1..=n {
                for s in 1..=n {
                    for u in 1..=n {
                        for v in 1..=n {
                            let a = w.upper(r, s) * w.upper(u, v);
                            let b = w.upper(r, u) * w.upper(s, v);
                            add(u, v, &[r, s], -(&wij * (a - b)));
                        }
                    }
                }
            }
        }
        out.push_row(row);
    }
    Ok(out)
}

/// □ = ω^ij d_ij.
pub fn dalembertian(w: &ConstMetric) -> DiffOp {
    let n = w.n();
    let mut p = DiffOp::zero(n);
    for i in 1..=n {
        for j in 1..=n {
            if !w.upper(i, j).is_zero() {
                p = p.add(&DiffOp::d(n, &[i, j]).scale(&c(w.upper(i, j))));
            }
        }
    }
    p
}

/// Values that tensor formulas can combine linearly.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&self, other: &Self, c: &Rat) -> Self;
}

impl Linear for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }

    fn add_scaled(&self, other: &Self, c: &Rat) -> Self {
        self + other * c
    }
}

/// An operator row, one entry per unknown.
impl Linear for Vec<DiffOp> {
    fn zero_like(&self) -> Self {
        self.iter().map(|p| DiffOp::zero(p.n())).collect()
    }

    fn add_scaled(&self, other: &Self, c: &Rat) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let f = RatFunc::constant(c.clone());
        self.iter()
            .zip(other)
            .map(|(a, b)| a.add(&b.scale(&f)))
            .collect()
    }
}

/// Curvature-type tensor ρ^k_{l,ij}, stored in full with 1-based accessors.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature<T> {
    pub n: usize,
    data: Vec<T>,
}

impl<T: Linear> Curvature<T> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n * n * n);
        for k in 1..=n {
            for l in 1..=n {
                for i in 1..=n {
                    for j in 1..=n {
                        data.push(f(k, l, i, j));
                    }
                }
            }
        }
        Curvature { n, data }
    }

    pub fn get(&self, k: usize, l: usize, i: usize, j: usize) -> &T {
        let n = self.n;
        &self.data[(((k - 1) * n + (l - 1)) * n + (i - 1)) * n + (j - 1)]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }
}

/// Symmetric 2-tensor τ_ij in full storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Sym2<T> {
    pub n: usize,
    data: Vec<T>,
}

impl<T: Linear> Sym2<T> {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        Sym2 {
            n,
            data: (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (i, j)))
                .map(|(i, j)| f(i, j))
                .collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[(i - 1) * self.n + (j - 1)]
    }
}

fn delta_kr(a: usize, b: usize) -> Rat {
    if a == b {
        Rat::one()
    } else {
        Rat::zero()
    }
}

/// ρ_ij = ρ^r_{i,rj}.
pub fn ricci_contract<T: Linear>(rho: &Curvature<T>) -> Sym2<T> {
    let n = rho.n;
    Sym2::from_fn(n, |i, j| {
        let mut acc = rho.get(1, i, 1, j).zero_like();
        for r in 1..=n {
            acc = acc.add_scaled(rho.get(r, i, r, j), &Rat::one());
        }
        acc
    })
}

/// tr τ = ω^ij τ_ij.
pub fn trace<T: Linear>(w: &ConstMetric, tau: &Sym2<T>) -> T {
    let n = w.n();
    let mut acc = tau.get(1, 1).zero_like();
    for i in 1..=n {
        for j in 1..=n {
            acc = acc.add_scaled(tau.get(i, j), w.upper(i, j));
        }
    }
    acc
}

/// Canonical lift of a symmetric 2-tensor to a curvature tensor whose Ricci
/// contraction gives it back.
pub fn ricci_lift<T: Linear>(w: &ConstMetric, tau: &Sym2<T>) -> Result<Curvature<T>> {
    let n = w.n();
    if n < 3 {
        return Err(Error::Unsupported("Ricci lift needs n ≥ 3".into()));
    }
    let a = Rat::new(1.into(), ((n - 2) as i64).into());
    let b = Rat::new(1.into(), (((n - 1) * (n - 2)) as i64).into());
    let tr = trace(w, tau);
    Ok(Curvature::from_fn(n, |k, l, i, j| {
        let mut acc = tr.zero_like();
        acc = acc.add_scaled(tau.get(l, j), &(&a * delta_kr(k, i)));
        acc = acc.add_scaled(tau.get(l, i), &-(&a * delta_kr(k, j)));
        for s in 1..=n {
            let wks = w.upper(k, s);
            if wks.is_zero() {
                continue;
            }
            acc = acc.add_scaled(tau.get(s, j), &-(&a * wks * w.lower(l, i)));
            acc = acc.add_scaled(tau.get(s, i), &(&a * wks * w.lower(l, j)));
        }
        let f = &b * (delta_kr(k, i) * w.lower(l, j) - delta_kr(k, j) * w.lower(l, i));
        acc.add_scaled(&tr, &-f)
    }))
}

/// Weyl part σ = ρ − lift(Ricci ρ).
pub fn weyl_project<T: Linear>(w: &ConstMetric, rho: &Curvature<T>) -> Result<Curvature<T>> {
    let lift = ricci_lift(w, &ricci_contract(rho))?;
    let n = rho.n;
    Ok(Curvature::from_fn(n, |k, l, i, j| {
        rho.get(k, l, i, j)
            .add_scaled(lift.get(k, l, i, j), &-Rat::one())
    }))
}

/// Linearized Riemann tensor as operator rows on symmetric Ω:
/// ρ^k_{l,ij} = ω^{ks} R_{sl,ij} with
/// 2R_{sl,ij} = d_is Ω_lj + d_jl Ω_si − d_il Ω_sj − d_js Ω_li.
pub fn riemann_tensor(w: &ConstMetric) -> Curvature<Vec<DiffOp>> {
    let n = w.n();
    let cols = n * (n + 1) / 2;
    let half = Rat::new(1.into(), 2.into());
    let lowered = |s: usize, l: usize, i: usize, j: usize| -> Vec<DiffOp> {
        let mut row = vec![DiffOp::zero(n); cols];
        let mut add = |a: usize, b: usize, mu: [usize; 2], f: &Rat| {
            let col = sym_index(n, a, b);
            row[col] = row[col].add(&DiffOp::d(n, &mu).scale(&c(f)));
        };
        add(l, j, [i, s], &half);
        add(s, i, [j, l], &half);
        add(s, j, [i, l], &-half.clone());
        add(l, i, [j, s], &-half.clone());
        row
    };
    Curvature::from_fn(n, |k, l, i, j| {
        let mut acc = vec![DiffOp::zero(n); cols];
        for s in 1..=n {
            if !w.upper(k, s).is_zero() {
                acc = acc.add_scaled(&lowered(s, l, i, j), w.upper(k, s));
            }
        }
        acc
    })
}

/// Linearized Ricci operator ρ_ij, rows over i ≤ j.
pub fn ricci_operator(w: &ConstMetric) -> OpMatrix {
    let n = w.n();
    let ric = ricci_contract(&riemann_tensor(w));
    let rows = sym_pairs(n)
        .into_iter()
        .map(|(i, j)| ric.get(i, j).clone())
        .collect();
    OpMatrix::from_rows(n, n * (n + 1) / 2, rows).expect("consistent shape")
}

/// Keeps the rows of `candidates` that are K-linearly independent of the
/// earlier ones, in order.
pub fn independent_rows(n: usize, cols: usize, candidates: Vec<Vec<DiffOp>>) -> OpMatrix {
    let mut e = Echelon::new();
    let mut out = OpMatrix::zero(n, 0, cols);
    for row in candidates {
        let m = OpMatrix::from_rows(n, cols, vec![row.clone()]).expect("shape");
        if let Inserted::Pivot(_) = e.insert(row_form(&m, 0), SVec::new()) {
            out.push_row(row);
        }
    }
    out
}

/// Independent components of a curvature-type operator, scanned over lowered
/// slots (k<l, i<j) in lexicographic order.
pub fn curvature_rows(w: &ConstMetric, t: &Curvature<Vec<DiffOp>>, cols: usize) -> OpMatrix {
    let n = w.n();
    let pairs = skew_basis(n, 2);
    let mut cands = Vec::new();
    for kl in &pairs {
        for ij in &pairs {
            let mut acc = vec![DiffOp::zero(n); cols];
            for r in 1..=n {
                if !w.lower(kl[0], r).is_zero() {
                    acc = acc.add_scaled(t.get(r, kl[1], ij[0], ij[1]), w.lower(kl[0], r));
                }
            }
            cands.push(acc);
        }
    }
    independent_rows(n, cols, cands)
}

/// Linearized Riemann operator S_2T* → F_1 with n²(n²−1)/12 independent rows.
pub fn riemann_operator(w: &ConstMetric) -> OpMatrix {
    let n = w.n();
    curvature_rows(w, &riemann_tensor(w), n * (n + 1) / 2)
}

/// Linearized Weyl operator: independent components of the Weyl part of the
/// Riemann tensor.
pub fn weyl_operator(w: &ConstMetric) -> Result<OpMatrix> {
    let n = w.n();
    let sigma = weyl_project(w, &riemann_tensor(w))?;
    Ok(curvature_rows(w, &sigma, n * (n + 1) / 2))
}

/// Basis of Z²(g₁) for the Killing symbol, as numeric curvature tensors.
pub fn riemann_component_basis(w: &ConstMetric) -> Vec<Curvature<Rat>> {
    let n = w.n();
    let s = JetSystem::from_opmatrix(&make_killing(w));
    let g1 = SymbolSpace::from_equations(n, n, 1, s.symbol_rows());
    let forms = skew_basis(n, 2);
    let mut cochains = Vec::new();
    for f in 0..forms.len() {
        for b in g1.basis() {
            let lifted = SVec::from_unsorted(
                b.entries()
                    .iter()
                    .map(|(key, v)| {
                        let (k, mu) = decode(*key, n);
                        (form_key(f, k, n, &mu), v.clone())
                    })
                    .collect(),
            );
            cochains.push(lifted);
        }
    }
    let mut e = Echelon::new();
    let mut kernel = Vec::new();
    for (idx, v) in cochains.iter().enumerate() {
        let img = delta_apply(v, n, n, 2);
        if let Inserted::Dependent(t) = e.insert(img, SVec::unit(idx as u128)) {
            let mut combo = SVec::new();
            for (i, c) in t.entries() {
                combo = combo.axpy(c, &cochains[*i as usize]);
            }
            kernel.push(combo);
        }
    }
    kernel
        .into_iter()
        .map(|v| {
            Curvature::from_fn(n, |k, l, i, j| {
                if i == j {
                    return Rat::zero();
                }
                let (a, b, sign) = if i < j {
                    (i, j, Rat::one())
                } else {
                    (j, i, -Rat::one())
                };
                let f = forms
                    .iter()
                    .position(|p| p[0] == a && p[1] == b)
                    .expect("pair");
                let key = form_key(f, k - 1, n, &MultiIndex::unit(n, l));
                v.get(key).as_rat().cloned().unwrap_or_else(Rat::zero) * sign
            })
        })
        .collect()
}

/// Zero-order K-combination check: every row of `a` lies in the K-span of the rows of `b`.
pub fn rows_in_span(a: &OpMatrix, b: &OpMatrix) -> bool {
    let mut e = Echelon::new();
    for r in 0..b.nrows() {
        e.insert(row_form(b, r), SVec::new());
    }
    (0..a.nrows()).all(|r| e.contains(&row_form(a, r)))
}

/// Divergence of a symmetric stress field: row i is Σ_j d_j σ^{ij}.
pub fn make_stress_divergence(n: usize) -> OpMatrix {
    let cols = n * (n + 1) / 2;
    let mut out = OpMatrix::zero(n, 0, cols);
    for i in 1..=n {
        let mut row = vec![DiffOp::zero(n); cols];
        for j in 1..=n {
            row[sym_index(n, i, j)] = DiffOp::d(n, &[j]);
        }
        out.push_row(row);
    }
    out
}

fn levi_civita3(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1,
        _ => 0,
    }
}

/// Beltrami stress functions in dimension 3: σ^{ij} = ε^{ikl} ε^{jrs} d_kr φ_ls,
/// rows over i ≤ j, columns φ_ab over a ≤ b.
pub fn make_beltrami() -> OpMatrix {
    let n = 3;
    let mut out = OpMatrix::zero(n, 0, 6);
    for (i, j) in sym_pairs(n) {
        let mut row = vec![DiffOp::zero(n); 6];
        for k in 1..=n {
            for l in 1..=n {
                for r in 1..=n {
                    for s in 1..=n {
                        let e = levi_civita3(i, k, l) * levi_civita3(j, r, s);
                        if e != 0 {
                            let col = sym_index(n, l, s);
                            row[col] = row[col].add(&DiffOp::d(n, &[k, r]).scale(&RatFunc::int(e)));
                        }
                    }
                }
            }
        }
        out.push_row(row);
    }
    out
}

/// Pairing weights of symmetric slots for a diagonal metric: the slot (i, j)
/// pairs λ^{ij} with its lowered form, weight (1 or 2)·ω^{ii}ω^{jj}.
pub fn metric_sym_weights(w: &ConstMetric) -> Result<Vec<RatFunc>> {
    let n = w.n();
    for i in 1..=n {
        for j in 1..=n {
            if i != j && !w.lower(i, j).is_zero() {
                return Err(Error::Unsupported(
                    "metric pairing weights need a diagonal metric".into(),
                ));
            }
        }
    }
    Ok(sym_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let base = Rat::from_integer(if i == j { 1 } else { 2 }.into());
            RatFunc::constant(base * w.upper(i, i) * w.upper(j, j))
        })
        .collect())
}
