use clap::Args;
use progle_core::pipeline::PipelineConfig;
use progle_core::spectral::{DEFAULT_MU, DEFAULT_TERMS, DEFAULT_THETA};
use progle_core::{FilterSpec, Result};
use serde_json::{json, Value};

/// Parameters shared by the embedding commands.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Embedding dimension.
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    /// Highest transition power in the proximity matrix.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Edge dropout ratio for the higher-order masks, in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub dropout: f64,
    /// Negative-noise ratio of the shifted log matrix.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Band center of the spectral modulator, in [0, 2].
    #[arg(long, default_value_t = DEFAULT_MU)]
    pub mu: f64,
    /// Bandwidth of the spectral modulator.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    pub theta: f64,
    /// Number of Chebyshev terms.
    #[arg(long = "cheb-k", default_value_t = DEFAULT_TERMS)]
    pub cheb_k: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Drop negative entries of the shifted log matrix.
    #[arg(long)]
    pub clamp_negative: bool,
    /// Use the modulated Laplacian as written, even when its spectrum leaves [-1, 1].
    #[arg(long)]
    pub no_rescale: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: 128,
            order: 2,
            dropout: 0.5,
            lambda: 1.0,
            mu: DEFAULT_MU,
            theta: DEFAULT_THETA,
            cheb_k: DEFAULT_TERMS,
            seed: 42,
            clamp_negative: false,
            no_rescale: false,
        }
    }
}

impl RunConfig {
    pub fn filter(&self) -> Result<FilterSpec> {
        Ok(FilterSpec::new(self.mu, self.theta, self.cheb_k)?.with_rescale(!self.no_rescale))
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        Ok(PipelineConfig {
            dim: self.dim,
            order: self.order,
            dropout: self.dropout,
            negative_ratio: self.lambda,
            clamp_negative: self.clamp_negative,
            filter: self.filter()?,
            seed: self.seed,
            ..PipelineConfig::default()
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "order": self.order,
            "dropout": self.dropout,
            "lambda": self.lambda,
            "mu": self.mu,
            "theta": self.theta,
            "cheb_k": self.cheb_k,
            "seed": self.seed,
            "clamp_negative": self.clamp_negative,
            "no_rescale": self.no_rescale,
        })
    }

    /// One-line `key=value` summary.
    pub fn describe(&self) -> String {
        format!(
            "dim={} order={} dropout={} lambda={} mu={} theta={} cheb_k={} seed={} clamp_negative={} no_rescale={}",
            self.dim,
            self.order,
            self.dropout,
            self.lambda,
            self.mu,
            self.theta,
            self.cheb_k,
            self.seed,
            self.clamp_negative,
            self.no_rescale
        )
    }
}
