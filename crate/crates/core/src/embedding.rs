use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Where an embedding came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Scaled left singular vectors of the shifted log matrix.
    RawSvd,
    /// Output of spectral propagation.
    Propagated,
    /// Loaded from outside the pipeline.
    External,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::RawSvd => "raw-svd",
            Provenance::Propagated => "propagated",
            Provenance::External => "external",
        }
    }
}

/// Dense `n × d` node embedding, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub vectors: DMatrix<f64>,
    pub provenance: Provenance,
}

impl Embedding {
    pub fn new(vectors: DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        if let Some(pos) = vectors.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % vectors.nrows().max(1), pos / vectors.nrows().max(1));
            return Err(Error::validation(format!("embedding entry ({r}, {c}) is not finite")));
        }
        if vectors.ncols() >= vectors.nrows() && vectors.nrows() > 0 {
            log::warn!(
                "embedding dimension {} is not smaller than the node count {}",
                vectors.ncols(),
                vectors.nrows()
            );
        }
        Ok(Embedding { vectors, provenance })
    }

    pub fn node_count(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}
