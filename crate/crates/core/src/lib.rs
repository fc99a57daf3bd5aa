//! Exact computation of Okounkov bodies of divisors on smooth complete
//! toric varieties and on abstract surface models, together with the
//! asymptotic invariants attached to them: Iitaka dimensions, base loci,
//! Zariski decompositions, and restricted volumes.
//!
//! Everything is exact rational arithmetic end to end; equality of bodies
//! is decidable and tested as such.

pub mod body;
pub mod bridge;
pub mod error;
pub mod exactgeom;
pub mod json;
pub mod semigroup;
pub mod surface;
pub mod toric;

pub use body::{BodyKind, ConvexBody, Exactness};
pub use error::{Error, Result};
pub use exactgeom::{QVector, QuadraticValue, Rational, RationalPolytope};
