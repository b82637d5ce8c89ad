//! Explicit triangulations of Akbulut–Kirby homotopy 4-spheres, with exact
//! homology, random discrete Morse statistics, bistellar reduction and
//! fundamental-group presentations.

pub mod bistellar;
pub mod builder;
pub mod catalog;
pub mod error;
pub mod fct;
pub mod linalg;
pub mod morse;
pub mod pi1;
pub mod product;
pub mod simplicial;

pub use error::{AkError, Result};
pub use simplicial::{FVector, Simplex, SimplicialComplex, Vertex};
