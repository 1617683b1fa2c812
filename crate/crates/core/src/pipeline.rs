//! End-to-end embedding: proximity → shifted log → truncated SVD → scaling → propagation.

use std::time::{Duration, Instant};

use crate::embedding::Embedding;
use crate::error::Result;
use crate::graph::SparseGraph;
use crate::pmi::build_shifted_log;
use crate::proximity::build_proximity;
use crate::spectral::{propagate, FilterSpec};
use crate::svd::{scale_embedding, truncated_svd, SvdOptions, WithTranspose};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub dim: usize,
    pub order: usize,
    pub dropout: f64,
    pub negative_ratio: f64,
    pub clamp_negative: bool,
    pub filter: FilterSpec,
    pub seed: u64,
    pub svd_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dim: 128,
            order: 2,
            dropout: 0.5,
            negative_ratio: 1.0,
            clamp_negative: false,
            filter: FilterSpec::default(),
            seed: 42,
            svd_tol: 1e-8,
        }
    }
}

/// Wall-clock time per phase.
#[derive(Debug, Clone, Default)]
pub struct PhaseTimings {
    pub proximity: Duration,
    pub shifted_log: Duration,
    pub svd: Duration,
    pub propagation: Duration,
}

impl PhaseTimings {
    /// Everything before propagation.
    pub fn sparse_embedding(&self) -> Duration {
        self.proximity + self.shifted_log + self.svd
    }

    pub fn total(&self) -> Duration {
        self.sparse_embedding() + self.propagation
    }
}

#[derive(Debug, Clone)]
pub struct RawEmbedding {
    pub embedding: Embedding,
    pub proximity_nnz: usize,
    pub shifted_log_nnz: usize,
    pub svd_matvecs: usize,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone)]
pub struct EmbedOutput {
    pub raw: RawEmbedding,
    pub embedding: Embedding,
    pub timings: PhaseTimings,
}

/// Sparse factorization stage only.
pub fn raw_embedding(g: &SparseGraph, cfg: &PipelineConfig) -> Result<RawEmbedding> {
    let mut timings = PhaseTimings::default();

    let start = Instant::now();
    let proximity = build_proximity(g, cfg.order, cfg.dropout, cfg.seed)?;
    timings.proximity = start.elapsed();
    log::info!(
        "proximity: {} stored entries (density {:.3e})",
        proximity.nnz(),
        proximity.density()
    );

    let start = Instant::now();
    let shifted = build_shifted_log(&proximity, cfg.negative_ratio, cfg.clamp_negative)?;
    timings.shifted_log = start.elapsed();
    let proximity_nnz = proximity.nnz();
    drop(proximity);

    let start = Instant::now();
    let opts = SvdOptions {
        tol: cfg.svd_tol,
        seed: cfg.seed,
        ..SvdOptions::default()
    };
    let shifted_log_nnz = shifted.matrix.nnz();
    let operator = WithTranspose::new(shifted.matrix);
    let svd = truncated_svd(&operator, cfg.dim, &opts)?;
    drop(operator);
    let embedding = scale_embedding(&svd.u, &svd.singular_values)?;
    timings.svd = start.elapsed();
    log::info!("truncated SVD: {} products, residual {:.2e}", svd.matvecs, svd.residual);

    Ok(RawEmbedding {
        embedding,
        proximity_nnz,
        shifted_log_nnz,
        svd_matvecs: svd.matvecs,
        timings,
    })
}

/// Full pipeline.
pub fn embed(g: &SparseGraph, cfg: &PipelineConfig) -> Result<EmbedOutput> {
    let raw = raw_embedding(g, cfg)?;
    let start = Instant::now();
    let embedding = propagate(g, &cfg.filter, &raw.embedding)?;
    let mut timings = raw.timings.clone();
    timings.propagation = start.elapsed();
    Ok(EmbedOutput { raw, embedding, timings })
}
