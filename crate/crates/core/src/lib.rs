//! Lines on cubic hypersurfaces over finite fields and the rationals.
//!
//! The crate covers exact arithmetic, the Grassmannian of lines, Fano
//! varieties of cubics, normal forms along lines of the second type,
//! higher triple lines, blow-up chart Jacobians, Eckardt points and the
//! classification of singular cubic surface sections.

pub mod error;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod projective;
pub mod grassmann;
pub mod cubic;
pub mod normal_form;
pub mod triple;
pub mod blowup;
pub mod eckardt;
pub mod sections;
pub mod driver;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use matrix::ExactMatrix;
pub use poly::{Monomial, MultiPoly};
