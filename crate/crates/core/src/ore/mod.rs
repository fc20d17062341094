//! Linear differential operators over K, operator matrices, adjoints and symbols.

mod diffop;
mod matrix;

pub use diffop::{derive_multi, DiffOp};
pub use matrix::{rank_fraction_free, Covector, OpMatrix};

use crate::error::Result;

pub fn op_mul(p: &DiffOp, q: &DiffOp) -> DiffOp {
    p.mul(q)
}

pub fn adjoint(d: &OpMatrix) -> OpMatrix {
    d.adjoint()
}

pub fn compose(d1: &OpMatrix, d: &OpMatrix) -> Result<OpMatrix> {
    d1.compose(d)
}

pub fn symbol_at(d: &OpMatrix, chi: &Covector) -> Vec<Vec<crate::RatFunc>> {
    d.symbol_at(chi)
}

pub fn generic_symbol_rank(d: &OpMatrix) -> usize {
    d.generic_symbol_rank()
}
