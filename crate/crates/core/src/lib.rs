//! Exact weighted graph homomorphism counts over ℚ and GF(p), and the
//! isomorphism, witness, connection-rank and counterexample machinery built
//! on them.

pub mod counterexample;
pub mod error;
pub mod exec;
pub mod field;
pub mod graphs;
pub mod hom;
pub mod isomorphism;
pub mod random;
pub mod selftest;
pub mod tensor;
pub mod twin;
pub mod vandermonde;
pub mod witness;

pub use error::{Error, Result};
pub use exec::{Exec, Limits};
pub use field::{nat_embed, FieldSpec, FieldValue};
pub use graphs::{LabelMap, LabeledGraph, WeightedGraph};
