//! Numerical toolkit for finite-dimensional von Neumann modules,
//! correspondences over multimatrix algebras, their commutants, and
//! discrete product systems of correspondences.

pub mod algebra;
pub mod correspondence;
pub mod cp;
pub mod endo;
pub mod error;
pub mod module;
pub mod numeric;
pub mod powers;
pub mod product_system;

pub use algebra::{Algebra, Block, Representation};
pub use correspondence::{flip_check, gns, tensor, Correspondence, MultiplicityMatrix};
pub use cp::CPMap;
pub use endo::Endomorphism;
pub use error::{Error, Result};
pub use module::{intertwiner_module, ConcreteModule, InducedRep, UnitCertificate, Verdict};
pub use numeric::{CMatrix, CVector, Tolerance, C64};
pub use powers::{PowersMap, SpatialDatum};
pub use product_system::{spatial_product, CentralUnit, FiberSystem, SpatialProduct, Unit};

/// Library version recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
