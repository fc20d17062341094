//! Exact symbolic engine for linear systems of partial differential equations
//! with rational-function coefficients.

pub mod error;
pub mod kernel;

pub use error::{Error, Result};
pub use kernel::{MultiIndex, Poly, Rat, RatFunc};
pub mod ore;

pub use ore::{Covector, DiffOp, OpMatrix};
pub mod delta;
pub mod duality;
pub mod geometry;
pub mod inverse_systems;
pub mod involution;
pub mod jets;
pub mod linalg;
pub mod sequences;
pub mod text;
pub use involution::{complete, involution_check, CompletionResult};
pub use jets::{CoordChange, JetSystem};
