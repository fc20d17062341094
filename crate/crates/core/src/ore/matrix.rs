use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::{Poly, RatFunc};

use super::diffop::DiffOp;

/// p×m matrix of operators, acting on column vectors of m unknowns.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpMatrix {
    n: usize,
    cols: usize,
    rows: Vec<Vec<DiffOp>>,
}

/// Covector used to evaluate a symbol.
#[derive(Clone, Debug)]
pub enum Covector {
    /// Explicit components over K.
    Values(Vec<RatFunc>),
    /// Fresh symbols χ_1..χ_n, realized as extra variables x^{n+1}..x^{2n}.
    Generic,
}

impl OpMatrix {
    pub fn zero(n: usize, rows: usize, cols: usize) -> Self {
        OpMatrix {
            n,
            cols,
            rows: vec![vec![DiffOp::zero(n); cols]; rows],
        }
    }

    pub fn from_rows(n: usize, cols: usize, rows: Vec<Vec<DiffOp>>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row of length {} in a {}-column matrix",
                    r.len(),
                    cols
                )));
            }
            if r.iter().any(|e| e.n() != n) {
                return Err(Error::ContextMismatch(
                    "matrix entries with different n".into(),
                ));
            }
        }
        Ok(OpMatrix { n, cols, rows })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        let mut out = Self::zero(n, m, m);
        for i in 0..m {
            out.rows[i][i] = DiffOp::one(n);
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<DiffOp>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[DiffOp] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &DiffOp {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, op: DiffOp) {
        assert_eq!(op.n(), self.n);
        self.rows[i][j] = op;
    }

    pub fn push_row(&mut self, row: Vec<DiffOp>) {
        assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn order(&self) -> usize {
        self.rows
            .iter()
            .flatten()
            .map(|e| e.order())
            .max()
            .unwrap_or(0)
    }

    pub fn row_order(&self, i: usize) -> usize {
        self.rows[i].iter().map(|e| e.order()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.is_zero())
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.rows[i].iter().all(|e| e.is_zero())
    }

    /// Removes rows that are identically zero.
    pub fn without_zero_rows(&self) -> OpMatrix {
        let rows = self
            .rows
            .iter()
            .filter(|r| r.iter().any(|e| !e.is_zero()))
            .cloned()
            .collect();
        OpMatrix {
            n: self.n,
            cols: self.cols,
            rows,
        }
    }

    /// Restriction to the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> OpMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        OpMatrix {
            n: self.n,
            cols: cols.len(),
            rows,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> OpMatrix {
        let rows = idx.iter().map(|&i| self.rows[i].clone()).collect();
        OpMatrix {
            n: self.n,
            cols: self.cols,
            rows,
        }
    }

    pub fn stack(&self, other: &OpMatrix) -> Result<OpMatrix> {
        if self.cols != other.cols || self.n != other.n {
            return Err(Error::Shape(
                "stacking matrices with different column counts".into(),
            ));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(OpMatrix {
            n: self.n,
            cols: self.cols,
            rows,
        })
    }

    pub fn transpose(&self) -> OpMatrix {
        let mut out = Self::zero(self.n, self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, e) in r.iter().enumerate() {
                out.rows[j][i] = e.clone();
            }
        }
        out
    }

    pub fn add(&self, other: &OpMatrix) -> Result<OpMatrix> {
        if self.cols != other.cols || self.rows.len() != other.rows.len() {
            return Err(Error::Shape("adding matrices of different shapes".into()));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            .collect();
        Ok(OpMatrix {
            n: self.n,
            cols: self.cols,
            rows,
        })
    }

    /// Operator composition self ∘ other.
    pub fn compose(&self, other: &OpMatrix) -> Result<OpMatrix> {
        if self.n != other.n {
            return Err(Error::ContextMismatch(
                "composition across different n".into(),
            ));
        }
        if self.cols != other.rows.len() {
            return Err(Error::Shape(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows.len(),
                self.cols,
                other.rows.len(),
                other.cols
            )));
        }
        let mut out = Self::zero(self.n, self.rows.len(), other.cols);
        for (i, r) in self.rows.iter().enumerate() {
            for (k, a) in r.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.rows[k][j];
                    if b.is_zero() {
                        continue;
                    }
                    out.rows[i][j] = out.rows[i][j].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint: transpose of entrywise adjoints.
    pub fn adjoint(&self) -> OpMatrix {
        let mut out = Self::zero(self.n, self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, e) in r.iter().enumerate() {
                out.rows[j][i] = e.adjoint();
            }
        }
        out
    }

    /// Adjoint for weighted pairings Σ w_k u^k v^k: `w_rows` weighs the p
    /// target components, `w_cols` the m unknowns.
    pub fn adjoint_weighted(&self, w_rows: &[RatFunc], w_cols: &[RatFunc]) -> Result<OpMatrix> {
        if w_rows.len() != self.rows.len() || w_cols.len() != self.cols {
            return Err(Error::Shape("weight vector lengths".into()));
        }
        let ad = self.adjoint();
        let mut out = Self::zero(self.n, self.cols, self.rows.len());
        for j in 0..self.cols {
            let inv = w_cols[j].inv()?;
            for i in 0..self.rows.len() {
                let e = ad.rows[j][i].mul(&DiffOp::coeff(self.n, w_rows[i].clone()));
                out.rows[j][i] = e.scale(&inv);
            }
        }
        Ok(out)
    }

    /// Left-multiplies row `i` by a coefficient.
    pub fn scale_row(&mut self, i: usize, f: &RatFunc) {
        for e in &mut self.rows[i] {
            *e = e.scale(f);
        }
    }

    /// Symbol at a covector: entries Σ_{|μ|=q} a^μ χ^μ with q the matrix order.
    pub fn symbol_at(&self, chi: &Covector) -> Vec<Vec<RatFunc>> {
        let q = self.order();
        self.symbol_at_order(chi, q)
    }

    pub fn symbol_at_order(&self, chi: &Covector, q: usize) -> Vec<Vec<RatFunc>> {
        let n = self.n;
        match chi {
            Covector::Values(v) => self
                .rows
                .iter()
                .map(|r| r.iter().map(|e| e.symbol_at(q, v)).collect())
                .collect(),
            Covector::Generic => {
                let chis: Vec<RatFunc> = (1..=n).map(|i| RatFunc::var(2 * n, n + i)).collect();
                self.rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|e| e.map_coeffs(|c| c.extend(2 * n)).symbol_at(q, &chis))
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Rank of the symbol over K(χ), with χ fresh symbols.
    pub fn generic_symbol_rank(&self) -> usize {
        let m = self.symbol_at(&Covector::Generic);
        rank_fraction_free(&m, 2 * self.n)
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc + Copy) -> OpMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.map_coeffs(f)).collect())
            .collect();
        OpMatrix {
            n: self.n,
            cols: self.cols,
            rows,
        }
    }
}

/// Exact rank of a matrix over the fraction field of Q[x_1..x_nv] by Bareiss
/// elimination after clearing row denominators.
pub fn rank_fraction_free(m: &[Vec<RatFunc>], nv: usize) -> usize {
    let mut a: Vec<Vec<Poly>> = m
        .iter()
        .map(|row| {
            let mut l = Poly::one(nv);
            for e in row {
                let d = e.den(nv);
                if !d.is_one() {
                    let g = crate::kernel::gcd(&l, &d);
                    l = l.mul(&d.div_exact(&g).expect("gcd divides"));
                }
            }
            row.iter()
                .map(|e| {
                    let d = e.den(nv);
                    e.num(nv).mul(&l.div_exact(&d).expect("lcm is a multiple"))
                })
                .collect()
        })
        .collect();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = Poly::one(nv);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].terms().len());
        let Some(p) = piv else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = a[r][c].mul(&a[i][j]).sub(&a[i][c].mul(&a[r][j]));
                a[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][c] = Poly::zero(nv);
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

impl fmt::Display for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize, axes: &[usize]) -> DiffOp {
        DiffOp::d(n, axes)
    }

    #[test]
    fn curl_grad_vanishes() {
        let n = 3;
        let grad = OpMatrix::from_rows(
            n,
            1,
            vec![vec![d(n, &[1])], vec![d(n, &[2])], vec![d(n, &[3])]],
        )
        .unwrap();
        let z = DiffOp::zero(n);
        let curl = OpMatrix::from_rows(
            n,
            3,
            vec![
                vec![z.clone(), d(n, &[3]).neg(), d(n, &[2])],
                vec![d(n, &[3]), z.clone(), d(n, &[1]).neg()],
                vec![d(n, &[2]).neg(), d(n, &[1]), z],
            ],
        )
        .unwrap();
        assert!(curl.compose(&grad).unwrap().is_zero());
        assert_eq!(grad.generic_symbol_rank(), 1);
    }

    #[test]
    fn example_three_nine_symbol_is_singular() {
        let n = 2;
        let z = DiffOp::zero(n);
        let e = |a: &[usize]| d(n, a);
        let m = OpMatrix::from_rows(
            n,
            3,
            vec![
                vec![z, e(&[2]).sub(&e(&[1])), e(&[2]).sub(&e(&[1]))],
                vec![e(&[2]), e(&[1]).neg(), e(&[2]).neg().sub(&e(&[1]))],
                vec![e(&[1]), e(&[1]).neg(), e(&[1]).scale(&RatFunc::int(-2))],
            ],
        )
        .unwrap();
        assert_eq!(m.generic_symbol_rank(), 2);
        assert_eq!(m.adjoint().generic_symbol_rank(), 2);
    }

    #[test]
    fn grad_symbol_at_covector() {
        let n = 2;
        let grad = OpMatrix::from_rows(n, 1, vec![vec![d(n, &[1])], vec![d(n, &[2])]]).unwrap();
        let s = grad.symbol_at(&Covector::Values(vec![RatFunc::one(), RatFunc::zero()]));
        assert_eq!(s, vec![vec![RatFunc::one()], vec![RatFunc::zero()]]);
    }
}
