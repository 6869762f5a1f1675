//! The D → G → K_0 pipeline, its positive cone and functoriality, the UHF
//! identification K_0 ≅ ℚ(ε), and K_1 through the suspension.

pub mod grothendieck;
pub mod k0;
pub mod semigroup;

pub use grothendieck::{gamma, g_of_map, groth_kernel_decide, grothendieck, universal_map, GrothendieckPresentation};
pub use k0::{k0, k0_nonunital, k0_to_rational, k0_uhf, k1, scalar_map, ConeAnswer, K0Nonunital, K0};
pub use semigroup::{align_d, build_d, d_of_map, enumerate_projections, DMap, DPresentation, ProjectionSource, StarHom};
