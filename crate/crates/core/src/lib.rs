//! Coherent information of graph-state codes under i.i.d. Pauli noise.
//!
//! The crate computes the coherent information (CI) of a graph-state code
//! either directly over the full `2^n` eigenbasis or through an
//! automorphism-compressed spectrum, and uses it to locate error thresholds
//! along rays of the Pauli simplex.

pub mod channels;
pub mod cli;
pub mod directci;
pub mod error;
pub mod graphs;
pub mod permgroup;
pub mod scan;
pub mod stabilizer;
pub mod symci;

pub use error::{Error, Result};
