//! Exact tools for the Cayley-Bacharach condition on finite point sets in
//! projective space.
//!
//! - [`field`]: exact scalars over GF(p) or Q.
//! - [`projective`]: points, flats, plane configurations.
//! - [`forms`]: monomial bases and evaluation matrices.
//! - [`cb`]: deciding CB(r), witnesses, excision.

pub mod campaign;
pub mod cb;
pub mod cover;
pub mod error;
pub mod field;
pub mod forms;
pub mod generators;
pub mod linalg;
pub mod matroid;
pub mod projective;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use projective::{Flat, PlaneConfiguration, PointSet, ProjPoint};
