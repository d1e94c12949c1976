pub mod bellcontext;
pub mod cvlab;
pub mod entangle;
pub mod error;
pub mod hgqec;
pub mod hgraph;
pub mod magiclab;
pub mod quditlab;
pub mod rewrite;
pub mod simkit;
pub mod stabgen;

pub use error::{Error, Result};
pub use hgraph::Hypergraph;
pub use num_complex::Complex64 as C64;
