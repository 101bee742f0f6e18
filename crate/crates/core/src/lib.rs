//! Exact checks for the integral-point criteria on affine surfaces.
//!
//! The linear algebra is generic over [`scalar::ExactField`]; the aliases
//! below fix the scalar to arbitrary-precision rationals.

pub mod cli;
pub mod criterion;
pub mod deskmodel;
pub mod exactnum;
pub mod filtration;
pub mod fixtures;
pub mod pellpoints;
pub mod scalar;
pub mod surface;

pub use exactnum::{QuadNum, Rational};
pub use surface::SurfaceInstance;

pub type Subspace = filtration::Subspace<Rational>;
pub type Filtration = filtration::Filtration<Rational>;
pub type AdaptedBasis = filtration::AdaptedBasis<Rational>;
