//! Exact computations with Verma modules over affine Lie (super)algebras at
//! the critical level.

pub mod algebra;
pub mod characters;
pub mod construct;
pub mod error;
pub mod heisenberg;
pub mod jantzen;
pub mod linalg;
pub mod modular;
pub mod pbw;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod shapovalov;
pub mod verma;

pub use error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type QPoly = poly::Poly<Rational>;
pub type QSeries = series::LocalSeries<Rational>;
