//! Compressed sparse row matrices.

use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Work below this many multiply-adds is not worth splitting across threads.
const PARALLEL_WORK: usize = 1 << 16;
/// Output columns accumulated together by the block kernels.
const TILE: usize = 8;
/// Rows per parallel task of the block kernels.
const ROWS_PER_TASK: usize = 64;

/// Real sparse matrix in compressed sparse row layout.
///
/// Column indices are strictly increasing within each row, so there are no
/// duplicate `(row, col)` entries. Explicit zeros are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from raw CSR arrays, checking every structural invariant.
    pub fn new(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if offsets.len() != rows + 1 {
            return Err(Error::validation(format!(
                "offsets has length {} but {} rows need {}",
                offsets.len(),
                rows,
                rows + 1
            )));
        }
        if offsets[0] != 0 || offsets[rows] != indices.len() || indices.len() != values.len() {
            return Err(Error::validation("offsets do not bracket the index and value arrays"));
        }
        for r in 0..rows {
            let (lo, hi) = (offsets[r], offsets[r + 1]);
            if lo > hi {
                return Err(Error::validation(format!("offsets decrease at row {r}")));
            }
            let row = &indices[lo..hi];
            if row.iter().any(|&c| c >= cols) {
                return Err(Error::validation(format!("column index out of range in row {r}")));
            }
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::validation(format!(
                    "column indices not strictly increasing in row {r}"
                )));
            }
        }
        Ok(Self::from_parts_unchecked(rows, cols, offsets, indices, values))
    }

    pub(crate) fn from_parts_unchecked(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), rows + 1);
        debug_assert_eq!(indices.len(), values.len());
        SparseMatrix {
            rows,
            cols,
            offsets,
            indices,
            values,
        }
    }

    /// Build from `(row, col, value)` triplets; duplicate positions are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; rows + 1];
        for &(r, c, _) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::validation(format!(
                    "triplet ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            counts[r + 1] += 1;
        }
        for r in 0..rows {
            counts[r + 1] += counts[r];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            entries[fill[r]] = (c, v);
            fill[r] += 1;
        }
        let mut offsets = Vec::with_capacity(rows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        offsets.push(0);
        for r in 0..rows {
            let row = &mut entries[counts[r]..counts[r + 1]];
            row.sort_by_key(|&(c, _)| c);
            for &(c, v) in row.iter() {
                if indices.len() > *offsets.last().unwrap() && *indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        Ok(Self::from_parts_unchecked(rows, cols, offsets, indices, values))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), vec![1.0; n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_parts_unchecked(rows, cols, vec![0; rows + 1], Vec::new(), Vec::new())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.offsets[r], self.offsets[r + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// Stored value at `(r, c)`, or zero when the position is not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        match idx.binary_search(&c) {
            Ok(k) => val[k],
            Err(_) => 0.0,
        }
    }

    /// Iterate over stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (idx, val) = self.row(r);
            idx.iter().zip(val).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Same pattern with every value passed through `f`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    /// Same pattern with new values.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.nnz());
        Self::from_parts_unchecked(self.rows, self.cols, self.offsets.clone(), self.indices.clone(), values)
    }

    /// Drop stored entries for which `keep(row, col, value)` is false.
    pub fn filter(&self, keep: impl Fn(usize, usize, f64) -> bool) -> Self {
        let mut offsets = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                if keep(r, c, v) {
                    indices.push(c);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        Self::from_parts_unchecked(self.rows, self.cols, offsets, indices, values)
    }

    /// True when both matrices store exactly the same positions.
    pub fn same_pattern(&self, other: &SparseMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.offsets == other.offsets
            && self.indices == other.indices
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.cols];
        for (&c, &v) in self.indices.iter().zip(&self.values) {
            sums[c] += v;
        }
        sums
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (r, c, v) in self.iter() {
            indices[fill[c]] = r;
            values[fill[c]] = v;
            fill[c] += 1;
        }
        Self::from_parts_unchecked(self.cols, self.rows, counts, indices, values)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.iter() {
            out[(r, c)] = v;
        }
        out
    }

    /// `y = self * x`.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols, "vector length does not match column count");
        assert_eq!(y.len(), self.rows, "output length does not match row count");
        for (r, out) in y.iter_mut().enumerate() {
            let (idx, val) = self.row(r);
            *out = idx.iter().zip(val).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `y = selfᵀ * x`.
    pub fn mul_vec_transpose(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows, "vector length does not match row count");
        assert_eq!(y.len(), self.cols, "output length does not match column count");
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &xr) in x.iter().enumerate() {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                y[c] += v * xr;
            }
        }
    }

    /// Sparse times dense block. Each output row is computed by one thread in
    /// a fixed order, so the result does not depend on the thread count.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.cols, "dense block row count does not match column count");
        let k = x.ncols();
        if self.rows == 0 || k == 0 {
            return DMatrix::zeros(self.rows, k);
        }
        let src = to_row_major(x);
        let mut dst = vec![0.0; k * self.rows];
        self.mul_row_major(&src, k, &mut dst);
        from_row_major(self.rows, k, &dst)
    }

    /// `dst = self * src` for blocks of width `k` stored row by row, the
    /// layout that keeps the `k` values read per stored entry contiguous.
    pub fn mul_row_major(&self, src: &[f64], k: usize, dst: &mut [f64]) {
        assert_eq!(src.len(), self.cols * k, "source block does not match column count");
        assert_eq!(dst.len(), self.rows * k, "destination block does not match row count");
        if k == 0 {
            return;
        }
        let body = |(chunk, dst): (usize, &mut [f64])| {
            for (i, row) in dst.chunks_exact_mut(k).enumerate() {
                self.row_times_block(chunk * ROWS_PER_TASK + i, src, row);
            }
        };
        if self.nnz().saturating_mul(k) < PARALLEL_WORK {
            dst.chunks_mut(k * ROWS_PER_TASK).enumerate().for_each(body);
        } else {
            dst.par_chunks_mut(k * ROWS_PER_TASK).enumerate().for_each(body);
        }
    }

    /// Row `r` of the product with a row-major block `src` of width `dst.len()`.
    /// Partial sums for `TILE` output columns stay in registers across the row.
    fn row_times_block(&self, r: usize, src: &[f64], dst: &mut [f64]) {
        let k = dst.len();
        let (idx, val) = self.row(r);
        let mut t = 0;
        while t + TILE <= k {
            let mut acc = [0.0f64; TILE];
            for (&c, &v) in idx.iter().zip(val) {
                let s: &[f64; TILE] = src[c * k + t..c * k + t + TILE].try_into().expect("tile width");
                for (a, s) in acc.iter_mut().zip(s) {
                    *a += v * s;
                }
            }
            dst[t..t + TILE].copy_from_slice(&acc);
            t += TILE;
        }
        for (j, out) in dst.iter_mut().enumerate().skip(t) {
            *out = idx.iter().zip(val).fold(0.0, |acc, (&c, &v)| acc + v * src[c * k + j]);
        }
    }

    /// Transposed sparse times dense block, `selfᵀ * x`.
    pub fn mul_dense_transpose(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(x.nrows(), self.rows, "dense block row count does not match row count");
        let k = x.ncols();
        if self.cols == 0 || k == 0 {
            return DMatrix::zeros(self.cols, k);
        }
        let src = to_row_major(x);
        let mut dst = vec![0.0; k * self.cols];
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let s = &src[r * k..(r + 1) * k];
            for (&c, &v) in idx.iter().zip(val) {
                for (o, s) in dst[c * k..(c + 1) * k].iter_mut().zip(s) {
                    *o += v * s;
                }
            }
        }
        from_row_major(self.cols, k, &dst)
    }

    /// Write the matrix as coordinate text: a `%rows cols nnz` header followed by
    /// one `i j value` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }
}

/// Entries of `x` row by row.
pub fn to_row_major(x: &DMatrix<f64>) -> Vec<f64> {
    transpose(x.as_slice(), x.nrows(), x.ncols())
}

/// Matrix from entries stored row by row.
pub fn from_row_major(rows: usize, cols: usize, values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_vec(rows, cols, transpose(values, cols, rows))
}

/// Transpose of a column-major `rows × cols` array, in cache-sized tiles.
fn transpose(src: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    const B: usize = 32;
    let mut out = vec![0.0; rows * cols];
    for c0 in (0..cols).step_by(B) {
        let c1 = (c0 + B).min(cols);
        for r0 in (0..rows).step_by(B) {
            let r1 = (r0 + B).min(rows);
            for c in c0..c1 {
                let column = &src[c * rows + r0..c * rows + r1];
                for (r, &v) in (r0..r1).zip(column) {
                    out[r * cols + c] = v;
                }
            }
        }
    }
    out
}
