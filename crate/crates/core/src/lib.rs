//! Numerical laboratory for the mean values of Hardy's Z-function on
//! generalized Gram interval systems and their images under a Jacob's
//! ladder.

pub mod dd;
pub mod error;
pub mod grid;
pub mod harness;
pub mod ladder;
pub mod quad;
pub mod rs;
pub mod sum;

pub use error::{Error, Result};
