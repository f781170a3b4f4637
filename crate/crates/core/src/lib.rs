//! Decoherence-free communication over channels whose collective noise is a
//! finite group: representation analysis, token states, encoding/decoding
//! simulation and circuit synthesis.

pub mod circuit;
pub mod codec;
pub mod error;
pub mod group;
pub mod io;
pub mod isotypic;
pub mod linalg;
pub mod rep;
pub mod statevec;
pub mod su2;

pub use error::{Error, Result};
