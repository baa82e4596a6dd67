mod affine;
mod finite;

pub use affine::{
    affinize, elem_add, single, AffineAlgebra, Basis, DeformedWeight, Elem, RootInfo, RootKind,
    Split, Weight,
};
pub use finite::{build_from_catalog, FiniteSuperAlgebra, SparseVec, CATALOG};

/// Catalog lookup followed by affinization.
pub fn affine_from_catalog(name: &str) -> crate::error::Result<AffineAlgebra> {
    Ok(affinize(build_from_catalog(name)?))
}
