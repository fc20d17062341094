//! Jet-coordinate view of linear systems: solved forms, Janet boards,
//! characters, prolongation and dimensions of solution spaces.

mod coords;
mod key;
mod prolong;
mod system;

pub use coords::{invert, CoordChange};
pub use key::{
    decode, derive_form, form_order, jet_key, jet_name, key_class, key_exp, key_order, key_unknown,
    shift_form, shift_key, shift_key_by, MAX_N,
};
pub use prolong::Prolongation;
pub use system::{
    all_jets, class_count, form_row, jet_dim, render_form, row_form, sym_dim, BoardRow, Characters,
    JanetBoard, JetSystem, SolutionDims,
};

use crate::error::Result;
use crate::ore::OpMatrix;

pub fn from_opmatrix(d: &OpMatrix) -> JetSystem {
    JetSystem::from_opmatrix(d)
}

pub fn to_opmatrix(s: &JetSystem) -> OpMatrix {
    s.to_opmatrix()
}

pub fn autoreduce(s: &JetSystem) -> Result<JetSystem> {
    s.autoreduce()
}

pub fn prolong(s: &JetSystem, r: usize) -> JetSystem {
    s.prolong(r)
}

pub fn janet_board(s: &JetSystem) -> Result<JanetBoard> {
    s.janet_board()
}

pub fn characters(s: &JetSystem) -> Characters {
    s.characters()
}

pub fn solution_dims(s: &JetSystem, r_max: usize) -> Vec<SolutionDims> {
    s.solution_dims(r_max)
}
