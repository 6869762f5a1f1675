//! Presented C*-algebras: rational points, norm oracles, amplification,
//! products, unitization and suspension.

pub mod descriptor;
pub mod elem;
pub mod parse;
pub mod presentation;
pub mod shipped;
pub mod starpoly;

pub use descriptor::{parse_descriptor, Descriptor};
pub use elem::{assemble, embed, split, Elem, Path};
pub use presentation::{
    computable_point, distance, enumerate_rational_points, norm_interval, ComputablePoint, CPres, CPresentation,
    NormAnswer, NormMode,
};
pub use shipped::{
    amplify, hat, opaque, product, standard_complex, standard_matrix, suspend, unitize, Amplified, MatrixPointCode,
    OraclePresentation, Product, StandardComplex, Suspension, Unitization, ZeroAlgebra,
};
pub use parse::{parse_plain, parse_point};
pub use starpoly::{rational_point, rational_point_u64, Letter, Monomial, StarPoly, StarRing};
