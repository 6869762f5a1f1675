//! Exact ℚ(i) scalars and matrices, and certified operator norms.

pub mod gaussian;
pub mod matrix;
pub mod norm;
pub mod poly;

pub use gaussian::{q, GaussianRational};
pub use matrix::ExactMatrix;
pub use norm::{certified_opnorm, norm_bounds, pow2, sqrt_bounds, trace_exact, DyadicInterval};
