//! Sparse spectral network embedding.
//!
//! The pipeline builds a sparse node-context proximity matrix from
//! edge-dropout masked transition powers, turns it into a shifted log-ratio
//! matrix, factorizes it with a truncated sparse SVD, and finally propagates
//! the raw embedding through a band-pass modulated graph Laplacian evaluated
//! by a Chebyshev expansion.

pub mod embedding;
pub mod error;
pub mod eval;
pub mod graph;
pub mod pipeline;
pub mod pmi;
pub mod proximity;
pub mod rng;
pub mod sparse;
pub mod spectral;
pub mod svd;
pub mod synth;

pub use embedding::{Embedding, Provenance};
pub use error::{Error, Result};
pub use graph::{NodeIdMap, SparseGraph};
pub use sparse::SparseMatrix;
pub use spectral::FilterSpec;
