//! Self-similar groups of intermediate growth acting on the binary rooted tree.

pub mod error;
pub mod groups;
pub mod growth;
pub mod orbits;
pub mod periodic;
pub mod presentations;
pub mod tree;
pub mod walks;
pub mod word;

pub use error::{Error, Result};
