//! Effective K-theory for presented C*-algebras.
//!
//! Exact arithmetic over ℚ(i) underlies everything: norms are certified
//! intervals, searches take explicit fuel, and `Unknown` is an answer.

pub mod coding;
pub mod effective_sets;
pub mod categoricity;
pub mod cstar;
pub mod error;
pub mod exact;
pub mod fuel;
pub mod matrix_fd;
pub mod ktheory;
pub mod presentations;
pub mod uhf;

pub use error::{Error, Result};
pub use fuel::{Fuel, Verdict};
