//! Stable module categories of finite-dimensional local symmetric algebras:
//! minimal covers, syzygies, stable Hom and Tate cohomology rings.

mod algebra;
mod module;
mod tate;

pub use algebra::{FDAlgebra, FDAlgebraFile, TruncatedShorthand};
pub use module::{
    cosyzygy, cover, hom_basis, hom_coords, hom_from_coords, is_homomorphism, stable_hom, stable_hom_with, syzygy, syzygy_map,
    Cosyzygy, Cover, FDModule, StableHom,
};
pub use tate::{
    default_strategy, duality_functional, levels, ordinary_ext_dims, tate_dims, tate_ext, tate_ring, DimTable, SyzygyTower, TateExt,
    TateRing,
};
