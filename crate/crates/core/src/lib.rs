//! Exact creative-telescoping machinery for proving terminating
//! hypergeometric identities, together with a rigorous high-precision
//! evaluator for Ramanujan-type series for 1/pi.

pub mod bigfloat;
pub mod catalog;
pub mod error;
pub mod field;
pub mod gosper;
pub mod hyperterm;
pub mod linform;
pub mod linsolve;
pub mod modp;
pub mod mpoly;
pub mod numeric;
pub mod prover;
pub mod rat;
pub mod ratfunc;
pub mod telescope;
pub mod upoly;

pub use error::{Error, Result};
