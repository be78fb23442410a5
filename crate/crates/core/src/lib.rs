//! Numerical laboratory for multilinear limited-range weight classes on a
//! discrete one-dimensional dyadic model.

pub mod dyadic;
pub mod error;
pub mod exponent;
pub mod maximal;
pub mod pipeline;
pub mod power;
pub mod rdf;
pub mod sample;
pub mod sparse;
pub mod weights;

pub use error::{Error, Result};
