//! Shifted log-ratio matrix over the node-context pair set.

use crate::error::{Error, Result};
use crate::proximity::ProximityMatrix;
use crate::sparse::SparseMatrix;

/// `M[i,j] = ln p[i,j] − ln(λ · noise[j])` on the proximity support, zero elsewhere.
#[derive(Debug, Clone)]
pub struct ShiftedLogMatrix {
    pub matrix: SparseMatrix,
    /// Negative-noise ratio λ.
    pub negative_ratio: f64,
    /// Background distribution of each context node; sums to 1.
    pub noise: Vec<f64>,
    pub clamp_negative: bool,
}

/// Column sums of the proximity matrix divided by its total mass.
pub fn background_noise(p: &ProximityMatrix) -> Result<Vec<f64>> {
    let mut noise = p.matrix.col_sums();
    let total: f64 = noise.iter().sum();
    if !(total > 0.0) {
        return Err(Error::validation("proximity matrix has no positive entries"));
    }
    noise.iter_mut().for_each(|v| *v /= total);
    Ok(noise)
}

/// Build the shifted log matrix. Stored zeros in `p` are dropped first; with
/// `clamp_negative` the negative entries are removed from the pattern.
pub fn build_shifted_log(p: &ProximityMatrix, negative_ratio: f64, clamp_negative: bool) -> Result<ShiftedLogMatrix> {
    if !(negative_ratio > 0.0) || !negative_ratio.is_finite() {
        return Err(Error::validation(format!(
            "negative ratio must be positive, got {negative_ratio}"
        )));
    }
    if let Some((i, j, v)) = p.matrix.iter().find(|&(_, _, v)| v < 0.0 || !v.is_finite()) {
        return Err(Error::validation(format!("proximity entry ({i}, {j}) = {v} is not a probability")));
    }
    let noise = background_noise(p)?;
    let support = p.matrix.filter(|_, _, v| v > 0.0);
    let shift = negative_ratio.ln();
    let log_noise: Vec<f64> = noise.iter().map(|&q| q.ln()).collect();
    for &j in support.indices() {
        if noise[j] <= 0.0 {
            return Err(Error::Internal(format!("context {j} has zero background noise")));
        }
    }
    let values = support
        .iter()
        .map(|(_, j, v)| (v.ln() - log_noise[j]) - shift)
        .collect();
    let mut matrix = support.with_values(values);
    if clamp_negative {
        matrix = matrix.filter(|_, _, v| v >= 0.0);
    }
    Ok(ShiftedLogMatrix {
        matrix,
        negative_ratio,
        noise,
        clamp_negative,
    })
}
