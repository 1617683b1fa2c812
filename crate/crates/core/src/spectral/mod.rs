//! Band-pass spectral modulation and propagation of embeddings.
//!
//! The modulator `g(λ) = exp(−½[(λ−μ)² − 1]θ)` acts on the eigenvalues of the
//! random-walk Laplacian `L`. With `L̄ = ½[(L − μI)² − I]` it becomes
//! `exp(−θ L̄)`, whose Chebyshev coefficients are `I_0(θ)` and
//! `2(−1)^i I_i(θ)`. The filtered operator `L̃ ≈ Σ c_i T_i(L̄)` is applied to
//! a dense block with the three-term recurrence, two sparse products per term.

pub mod bessel;

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::{Embedding, Provenance};
use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::rng::{stream_rng, streams};
use crate::sparse::{from_row_major, to_row_major, SparseMatrix};
use crate::svd::scaled_left_singular_vectors;

pub use bessel::{bessel_i, bessel_i_sequence};

pub const DEFAULT_MU: f64 = 0.1;
pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_TERMS: usize = 10;
const POWER_ITERATIONS: usize = 30;

/// Chebyshev coefficients of `exp(−θx)` on `[−1, 1]`: `[I_0, −2I_1, 2I_2, −2I_3, …]`.
pub fn chebyshev_coefficients(theta: f64, terms: usize) -> Result<Vec<f64>> {
    if terms == 0 {
        return Err(Error::validation("Chebyshev expansion needs at least one term"));
    }
    let mut c = bessel_i_sequence(terms, theta)?;
    for (i, v) in c.iter_mut().enumerate().skip(1) {
        *v *= if i % 2 == 0 { 2.0 } else { -2.0 };
    }
    Ok(c)
}

/// Parameters of the band-pass modulator.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    /// Band center, in `[0, 2]`.
    pub mu: f64,
    /// Bandwidth / decay parameter.
    pub theta: f64,
    /// Number of Chebyshev terms.
    pub terms: usize,
    /// Coefficients for `theta` on the unscaled operator.
    pub coefficients: Vec<f64>,
    /// Shrink `L̄` when its spectrum may leave `[−1, 1]`.
    pub rescale: bool,
}

impl FilterSpec {
    pub fn new(mu: f64, theta: f64, terms: usize) -> Result<Self> {
        if !(0.0..=2.0).contains(&mu) {
            return Err(Error::validation(format!("mu = {mu} outside [0, 2]")));
        }
        if !(theta >= 0.0) || !theta.is_finite() {
            return Err(Error::validation(format!("theta = {theta} must be nonnegative")));
        }
        Ok(FilterSpec {
            mu,
            theta,
            terms,
            coefficients: chebyshev_coefficients(theta, terms)?,
            rescale: true,
        })
    }

    pub fn with_rescale(mut self, rescale: bool) -> Self {
        self.rescale = rescale;
        self
    }

    /// Exact modulator `g(λ)` on a Laplacian eigenvalue.
    pub fn modulator(&self, lambda: f64) -> f64 {
        (-0.5 * ((lambda - self.mu).powi(2) - 1.0) * self.theta).exp()
    }
}

impl Default for FilterSpec {
    fn default() -> Self {
        FilterSpec::new(DEFAULT_MU, DEFAULT_THETA, DEFAULT_TERMS).expect("defaults are valid")
    }
}

/// Largest eigenvalue of the random-walk Laplacian, by power iteration on the
/// similar symmetric matrix `I − D^{-1/2} A D^{-1/2}`.
pub fn estimate_lambda_max(g: &SparseGraph, iterations: usize) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let inv_sqrt: Vec<f64> = g
        .degree()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let apply = |x: &DVector<f64>, y: &mut DVector<f64>| {
        for i in 0..n {
            let (idx, val) = g.neighbors(i);
            let s: f64 = idx.iter().zip(val).map(|(&j, &w)| w * inv_sqrt[j] * x[j]).sum();
            y[i] = x[i] - inv_sqrt[i] * s;
        }
    };
    let mut rng = stream_rng(0, streams::POWER_ITERATION);
    let mut x = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    x /= x.norm();
    let mut y = DVector::zeros(n);
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        apply(&x, &mut y);
        estimate = x.dot(&y);
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        x.copy_from(&y);
        x /= norm;
    }
    estimate.clamp(0.0, 2.0)
}

/// Implicit `L̄ = ½[(L − μI)² − I] / scale` acting on dense blocks.
#[derive(Debug)]
pub struct ScaledLaplacianOp {
    laplacian: SparseMatrix,
    mu: f64,
    scale: f64,
    products: AtomicUsize,
}

impl ScaledLaplacianOp {
    /// Operator for `g`. With `rescale`, the largest Laplacian eigenvalue is
    /// estimated and `scale` is chosen so that the spectrum of `L̄ / scale`
    /// lies in `[−1, 1]`.
    pub fn new(g: &SparseGraph, mu: f64, rescale: bool) -> Self {
        let scale = if rescale {
            let lambda_max = (estimate_lambda_max(g, POWER_ITERATIONS) * 1.01).min(2.0);
            let widest = (lambda_max - mu).powi(2).max(mu * mu);
            (0.5 * (widest - 1.0)).max(1.0)
        } else {
            1.0
        };
        if scale > 1.0 {
            log::info!("modulated Laplacian rescaled by 1/{scale:.4} to keep its spectrum in [-1, 1]");
        }
        Self::with_scale(g, mu, scale)
    }

    pub fn with_scale(g: &SparseGraph, mu: f64, scale: f64) -> Self {
        ScaledLaplacianOp {
            laplacian: g.rw_laplacian(),
            mu,
            scale,
            products: AtomicUsize::new(0),
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn node_count(&self) -> usize {
        self.laplacian.rows()
    }

    /// Sparse `n × d` products performed so far.
    pub fn sparse_products(&self) -> usize {
        self.products.load(Ordering::Relaxed)
    }

    /// `out = (L − μI) x` on row-major blocks of width `k`.
    fn shifted(&self, x: &[f64], k: usize, out: &mut [f64]) {
        self.products.fetch_add(1, Ordering::Relaxed);
        self.laplacian.mul_row_major(x, k, out);
        let mu = self.mu;
        for (a, b) in out.iter_mut().zip(x) {
            *a -= mu * b;
        }
    }

    /// `out = L̄ x` on row-major blocks of width `k`; `scratch` has the size of `x`.
    fn apply_row_major(&self, x: &[f64], k: usize, out: &mut [f64], scratch: &mut [f64]) {
        self.shifted(x, k, scratch);
        self.shifted(scratch, k, out);
        let factor = 0.5 / self.scale;
        for (a, b) in out.iter_mut().zip(x) {
            *a = (*a - b) * factor;
        }
    }

    /// `L̄ x`.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let rows = to_row_major(x);
        let mut out = vec![0.0; rows.len()];
        let mut scratch = vec![0.0; rows.len()];
        self.apply_row_major(&rows, x.ncols(), &mut out, &mut scratch);
        from_row_major(x.nrows(), x.ncols(), &out)
    }
}

/// `L̃ x` by the Chebyshev recurrence `T_{i+1} = 2 L̄ T_i − T_{i−1}`, with
/// `terms − 1` applications of `L̄`.
pub fn apply_modulated_laplacian(lbar: &ScaledLaplacianOp, spec: &FilterSpec, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_rows(lbar, x)?;
    let out = filter_row_major(lbar, spec, &to_row_major(x), x.ncols())?;
    Ok(from_row_major(x.nrows(), x.ncols(), &out))
}

fn check_rows(lbar: &ScaledLaplacianOp, x: &DMatrix<f64>) -> Result<()> {
    if x.nrows() != lbar.node_count() {
        return Err(Error::validation(format!(
            "block has {} rows but the graph has {} nodes",
            x.nrows(),
            lbar.node_count()
        )));
    }
    Ok(())
}

/// The recurrence on a row-major block, cycling four buffers.
fn filter_row_major(lbar: &ScaledLaplacianOp, spec: &FilterSpec, x: &[f64], k: usize) -> Result<Vec<f64>> {
    let coefficients = if lbar.scale() == 1.0 {
        spec.coefficients.clone()
    } else {
        chebyshev_coefficients(spec.theta * lbar.scale(), spec.terms)?
    };
    let c0 = coefficients[0];
    let mut out: Vec<f64> = x.iter().map(|v| v * c0).collect();
    if coefficients.len() == 1 {
        return Ok(out);
    }
    let mut scratch = vec![0.0; x.len()];
    let mut previous = x.to_vec();
    let mut current = vec![0.0; x.len()];
    lbar.apply_row_major(x, k, &mut current, &mut scratch);
    let c1 = coefficients[1];
    for (a, b) in out.iter_mut().zip(&current) {
        *a += c1 * b;
    }
    let mut next = vec![0.0; x.len()];
    for &c in &coefficients[2..] {
        lbar.apply_row_major(&current, k, &mut next, &mut scratch);
        for ((a, n), p) in out.iter_mut().zip(next.iter_mut()).zip(&previous) {
            *n = *n * 2.0 - p;
            *a += c * *n;
        }
        std::mem::swap(&mut previous, &mut current);
        std::mem::swap(&mut current, &mut next);
    }
    Ok(out)
}

/// `D⁻¹A (X − L̃X)` before re-orthogonalization.
pub fn propagate_unorthogonalized(g: &SparseGraph, spec: &FilterSpec, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != g.node_count() {
        return Err(Error::validation(format!(
            "embedding has {} rows but the graph has {} nodes",
            x.nrows(),
            g.node_count()
        )));
    }
    let lbar = ScaledLaplacianOp::new(g, spec.mu, spec.rescale);
    let k = x.ncols();
    let mut band = to_row_major(x);
    let filtered = filter_row_major(&lbar, spec, &band, k)?;
    for (b, f) in band.iter_mut().zip(&filtered) {
        *b -= f;
    }
    drop(filtered);
    let mut out = vec![0.0; band.len()];
    g.transition_matrix().mul_row_major(&band, k, &mut out);
    Ok(from_row_major(x.nrows(), k, &out))
}

/// Propagate `emb` through the modulated network and restore orthogonal
/// columns: the result is `UΣ` from the thin SVD of the propagated block.
pub fn propagate(g: &SparseGraph, spec: &FilterSpec, emb: &Embedding) -> Result<Embedding> {
    let z = propagate_unorthogonalized(g, spec, &emb.vectors)?;
    Embedding::new(scaled_left_singular_vectors(&z), Provenance::Propagated)
}

/// Propagate an externally trained embedding whose rows are already aligned
/// with the graph's node indices.
pub fn enhance(g: &SparseGraph, spec: &FilterSpec, external: &Embedding) -> Result<Embedding> {
    if external.node_count() != g.node_count() {
        return Err(Error::validation(format!(
            "external embedding has {} rows but the graph has {} nodes",
            external.node_count(),
            g.node_count()
        )));
    }
    propagate(g, spec, external)
}
