//! Logarithmized adjacency arrays.

pub mod algorithms;
pub mod analysis;
pub mod bitio;
pub mod compressed;
pub mod container;
pub mod error;
pub mod fine;
pub mod graph;
pub mod offsets;
pub mod permute;
pub mod transform;
mod ser;

pub use error::{Error, Result};
