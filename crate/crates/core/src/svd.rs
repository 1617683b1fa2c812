//! Truncated SVD of sparse operators and thin SVD of dense tall matrices.
//!
//! The truncated SVD is a thick-restarted block Golub–Kahan–Lanczos
//! bidiagonalization with full reorthogonalization. Blocks of `d/8` vectors,
//! at most 8, turn the sparse products and the reorthogonalization into
//! matrix–matrix kernels. After each sweep the
//! projected matrix `B` (with `A·V = P·B`) is decomposed densely and the
//! leading Ritz triplets are kept as the start of the next Krylov basis.

use std::ops::AddAssign;

use nalgebra::{DMatrix, DMatrixView, DMatrixViewMut, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::embedding::{Embedding, Provenance};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams, StreamRng};
use crate::sparse::SparseMatrix;

/// A matrix that is only accessed through products with vectors.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y = Aᵀ x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);

    /// `A X` for a block of columns.
    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let (rows, k) = (self.nrows(), x.ncols());
        let mut y = DMatrix::zeros(rows, k);
        for c in 0..k {
            let src = &x.as_slice()[c * x.nrows()..(c + 1) * x.nrows()];
            self.apply(src, &mut y.as_mut_slice()[c * rows..(c + 1) * rows]);
        }
        y
    }

    /// `Aᵀ X` for a block of columns.
    fn apply_transpose_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let (cols, k) = (self.ncols(), x.ncols());
        let mut y = DMatrix::zeros(cols, k);
        for c in 0..k {
            let src = &x.as_slice()[c * x.nrows()..(c + 1) * x.nrows()];
            self.apply_transpose(src, &mut y.as_mut_slice()[c * cols..(c + 1) * cols]);
        }
        y
    }
}

impl LinearOperator for SparseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_transpose(x, y)
    }

    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.mul_dense(x)
    }

    fn apply_transpose_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.mul_dense_transpose(x)
    }
}

/// A sparse matrix kept together with its transpose, so that products on
/// either side read rows. Costs a second copy of the matrix.
#[derive(Debug, Clone)]
pub struct WithTranspose {
    a: SparseMatrix,
    at: SparseMatrix,
}

impl WithTranspose {
    pub fn new(a: SparseMatrix) -> Self {
        let at = a.transpose();
        WithTranspose { a, at }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }
}

impl LinearOperator for WithTranspose {
    fn nrows(&self) -> usize {
        self.a.rows()
    }

    fn ncols(&self) -> usize {
        self.a.cols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.a.mul_vec(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.at.mul_vec(x, y)
    }

    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.a.mul_dense(x)
    }

    fn apply_transpose_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.at.mul_dense(x)
    }
}

#[derive(Debug, Clone)]
pub struct SvdOptions {
    /// Residual tolerance relative to the largest singular value.
    pub tol: f64,
    /// Cap on products with `A`; defaults to `50·d` (never below one full basis).
    pub max_matvecs: Option<usize>,
    /// Krylov basis size; defaults to `min(rows, cols, 2d + 16)`.
    pub krylov_dim: Option<usize>,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            tol: 1e-8,
            max_matvecs: None,
            krylov_dim: None,
            seed: 42,
        }
    }
}

/// Leading singular triplets, singular values in descending order.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
    /// Products with `A` (equal to the number with `Aᵀ`).
    pub matvecs: usize,
    /// Largest estimated residual `‖Aᵀu_i − σ_i v_i‖ / σ_1` at exit.
    pub residual: f64,
}

/// Thin SVD `x = U diag(σ) Vᵀ` of an `n × d` matrix.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

/// Rank-`d` truncated SVD of `a`.
pub fn truncated_svd<A: LinearOperator + ?Sized>(a: &A, d: usize, opts: &SvdOptions) -> Result<TruncatedSvd> {
    let (m, n) = (a.nrows(), a.ncols());
    let min_dim = m.min(n);
    if d == 0 {
        return Err(Error::validation("rank must be at least 1"));
    }
    if d >= min_dim {
        return Err(Error::validation(format!(
            "rank {d} must be smaller than both dimensions of a {m}x{n} matrix"
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let target = opts.krylov_dim.unwrap_or(2 * d + 16).clamp(d + 1, min_dim);
    let (bs, basis, keep) = block_layout(d, target, min_dim);
    let max_matvecs = opts.max_matvecs.unwrap_or(50 * d).max(basis);

    let mut rng = stream_rng(opts.seed, streams::SVD_START);
    // the last block of `vb` holds the residual directions of a sweep
    let mut vb = DMatrix::<f64>::zeros(n, basis + bs);
    let mut pb = DMatrix::<f64>::zeros(m, basis);
    let mut b = DMatrix::<f64>::zeros(basis, basis);
    let start = DMatrix::from_fn(n, bs, |_, _| StandardNormal.sample(&mut rng));
    orthonormalize_block(&mut vb, 0, start, 0.0, &mut rng);

    let mut lower = DMatrix::<f64>::zeros(bs, bs);
    let mut matvecs = 0usize;
    let mut scale = 0.0f64;
    let mut first = 0usize;

    loop {
        for j in (first..basis).step_by(bs) {
            let mut w = a.apply_block(&vb.columns(j, bs).into_owned());
            matvecs += bs;
            scale = scale.max(max_column_norm(&w));
            let coeffs = orthogonalize_block(&pb, j, bs, &mut w);
            b.view_mut((0, j), (j, bs)).copy_from(&coeffs);
            let diag = orthonormalize_block(&mut pb, j, w, scale, &mut rng);
            b.view_mut((j, j), (bs, bs)).copy_from(&diag);

            let mut y = a.apply_transpose_block(&pb.columns(j, bs).into_owned());
            scale = scale.max(max_column_norm(&y));
            orthogonalize_block(&vb, j + bs, bs, &mut y);
            lower = orthonormalize_block(&mut vb, j + bs, y, scale, &mut rng);
        }

        let (left, sigma, right) = sorted_svd(&b);
        let threshold = opts.tol * sigma[0];
        // ‖Aᵀu_i − σ_i v_i‖ = ‖L y_i‖ over the last block of the left Ritz vector
        let tail = left.rows(basis - bs, bs);
        let worst = (0..d).map(|i| (&lower * tail.column(i)).norm()).fold(0.0, f64::max);
        let converged = worst <= threshold;
        let relative = worst / sigma[0].max(f64::MIN_POSITIVE);
        log::debug!("lanczos restart: {matvecs} products, worst residual {relative:.3e} of sigma_1");
        let exhausted = matvecs + (basis - keep) > max_matvecs;

        if converged || exhausted {
            if !converged {
                return Err(Error::Convergence {
                    matvecs,
                    residual: relative,
                    tolerance: opts.tol,
                });
            }
            let u = &pb * left.columns(0, d);
            let v = vb.columns(0, basis) * right.columns(0, d);
            return Ok(TruncatedSvd {
                u,
                singular_values: DVector::from_iterator(d, sigma.iter().take(d).copied()),
                v,
                matvecs,
                residual: relative,
            });
        }

        // Thick restart from the leading `keep` Ritz vectors plus the residual block.
        let new_p = &pb * left.columns(0, keep);
        let new_v = vb.columns(0, basis) * right.columns(0, keep);
        pb.columns_mut(0, keep).copy_from(&new_p);
        vb.columns_mut(0, keep).copy_from(&new_v);
        drop((new_p, new_v));
        let residual_block = vb.columns(basis, bs).into_owned();
        vb.columns_mut(keep, bs).copy_from(&residual_block);
        b.fill(0.0);
        for i in 0..keep {
            b[(i, i)] = sigma[i];
        }
        first = keep;
    }
}

/// Block size, basis size and restart size. Both the basis and the part
/// rebuilt after a restart are whole blocks; small ranks use single vectors.
fn block_layout(d: usize, target: usize, min_dim: usize) -> (usize, usize, usize) {
    let bs = (d / 8).clamp(1, MAX_BLOCK);
    let basis = target / bs * bs;
    if bs > 1 && basis >= d + 2 * bs && basis + bs <= min_dim {
        let fresh = ((basis - d) / 2 / bs).max(1) * bs;
        return (bs, basis, basis - fresh);
    }
    (1, target, (d + (target - d) / 2).min(target - 1))
}

const MAX_BLOCK: usize = 8;
const REORTH_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;
const BREAKDOWN: f64 = 1e-12;

fn max_column_norm(w: &DMatrix<f64>) -> f64 {
    w.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `c ← alpha·aᵀ·b + beta·c` without forming `aᵀ`.
fn gemm_tn(alpha: f64, a: DMatrixView<f64>, b: DMatrixView<f64>, beta: f64, c: &mut DMatrix<f64>) {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!((c.nrows(), c.ncols()), (a.ncols(), b.ncols()));
    let (ars, acs) = a.strides();
    let (brs, bcs) = b.strides();
    let (crs, ccs) = c.strides();
    // SAFETY: the shapes and strides describe the three matrices exactly and
    // `c` does not alias the inputs
    unsafe {
        matrixmultiply::dgemm(
            a.ncols(),
            a.nrows(),
            b.ncols(),
            alpha,
            a.as_ptr(),
            acs as isize,
            ars as isize,
            b.as_ptr(),
            brs as isize,
            bcs as isize,
            beta,
            c.as_mut_ptr(),
            crs as isize,
            ccs as isize,
        );
    }
}

/// One classical Gram–Schmidt pass of `w` against `q`, adding the
/// coefficients to `total`.
fn project_out(q: DMatrixView<f64>, w: &mut DMatrix<f64>, total: &mut DMatrixViewMut<f64>) {
    let mut c = DMatrix::zeros(q.ncols(), w.ncols());
    gemm_tn(1.0, q, w.as_view(), 0.0, &mut c);
    w.gemm(-1.0, &q, &c, 1.0);
    *total += c;
}

/// Remove from the columns of `w` their components along the first `count`
/// columns of `basis` and return the coefficients. The recurrence puts most of
/// `w` along the newest `local` columns, so those are removed first; a second
/// pass over the whole basis runs only when the full pass then cancels most of
/// some column (Daniel–Gragg–Kaufman–Stewart test).
fn orthogonalize_block(basis: &DMatrix<f64>, count: usize, local: usize, w: &mut DMatrix<f64>) -> DMatrix<f64> {
    let mut total = DMatrix::zeros(count, w.ncols());
    if count == 0 {
        return total;
    }
    let lo = count.saturating_sub(local);
    project_out(basis.columns(lo, count - lo), w, &mut total.rows_mut(lo, count - lo));
    let before: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let q = basis.columns(0, count);
    project_out(q, w, &mut total.as_view_mut());
    if w.column_iter().zip(&before).any(|(c, &b)| c.norm() < REORTH_RATIO * b) {
        project_out(q, w, &mut total.as_view_mut());
    }
    total
}

/// Orthonormalize the columns of `w`, already orthogonal to the first `offset`
/// columns of `basis`, into the columns that follow them and return the upper
/// triangular factor. Columns that vanish below `BREAKDOWN·scale` are replaced
/// by random orthogonal directions with a zero diagonal entry.
fn orthonormalize_block(
    basis: &mut DMatrix<f64>,
    offset: usize,
    w: DMatrix<f64>,
    scale: f64,
    rng: &mut StreamRng,
) -> DMatrix<f64> {
    let k = w.ncols();
    let mut r = DMatrix::zeros(k, k);
    for c in 0..k {
        let mut col = w.column(c).into_owned();
        let before = col.norm();
        for _ in 0..2 {
            let q = basis.columns(offset, c);
            let coeffs = q.tr_mul(&col);
            col.gemv(-1.0, &q, &coeffs, 1.0);
            r.view_mut((0, c), (c, 1)).add_assign(&coeffs);
        }
        let mut norm = col.norm();
        if norm < REORTH_RATIO * before && norm > BREAKDOWN * scale {
            // heavy cancellation inside the block exposes rounding along the earlier basis
            let q = basis.columns(0, offset + c);
            let coeffs = q.tr_mul(&col);
            col.gemv(-1.0, &q, &coeffs, 1.0);
            norm = col.norm();
        }
        if norm <= BREAKDOWN * scale || norm == 0.0 {
            let fresh = random_unit_orthogonal(basis, offset + c, rng);
            basis.set_column(offset + c, &fresh);
        } else {
            r[(c, c)] = norm;
            basis.set_column(offset + c, &(col / norm));
        }
    }
    r
}

/// Random unit vector orthogonal to the first `count` columns of `basis`, or
/// zero when those columns already span the space.
fn random_unit_orthogonal(basis: &DMatrix<f64>, count: usize, rng: &mut StreamRng) -> DVector<f64> {
    let n = basis.nrows();
    if count >= n {
        return DVector::zeros(n);
    }
    let q = basis.columns(0, count);
    loop {
        let mut w = DVector::from_fn(n, |_, _| StandardNormal.sample(rng));
        for _ in 0..2 {
            let c = q.tr_mul(&w);
            w.gemv(-1.0, &q, &c, 1.0);
        }
        let norm = w.norm();
        if norm > 1e-8 {
            return w / norm;
        }
    }
}

/// Dense SVD with singular values sorted in descending order.
fn sorted_svd(x: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v = DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
    let s = DVector::from_iterator(order.len(), order.iter().map(|&i| s[i]));
    (u, s, v)
}

/// `UΣ` from the thin SVD of a tall `z`, computed as `z·V` with `V` the
/// eigenvectors of `zᵀz`, columns ordered by decreasing singular value. The
/// columns are orthogonal to rounding relative to the largest one; only the
/// directions of columns with tiny singular values are inaccurate, which the
/// product with `z` scales away.
pub fn scaled_left_singular_vectors(z: &DMatrix<f64>) -> DMatrix<f64> {
    let d = z.ncols();
    if d == 0 || z.nrows() == 0 {
        return DMatrix::zeros(z.nrows(), d);
    }
    let mut gram = DMatrix::zeros(d, d);
    gemm_tn(1.0, z.as_view(), z.as_view(), 0.0, &mut gram);
    let gram = (&gram + gram.transpose()) * 0.5;
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let v = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    z * v
}

/// Exact thin SVD of a dense matrix with at least as many rows as columns.
pub fn thin_svd_dense(x: &DMatrix<f64>) -> Result<ThinSvd> {
    if x.ncols() > x.nrows() {
        return Err(Error::validation(format!(
            "thin SVD needs rows >= columns, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    if x.ncols() == 0 {
        return Ok(ThinSvd {
            u: DMatrix::zeros(x.nrows(), 0),
            singular_values: DVector::zeros(0),
            v: DMatrix::zeros(0, 0),
        });
    }
    let (u, singular_values, v) = sorted_svd(x);
    Ok(ThinSvd { u, singular_values, v })
}

/// Scale column `k` of `u` by `√σ_k`.
pub fn scale_embedding(u: &DMatrix<f64>, singular_values: &DVector<f64>) -> Result<Embedding> {
    if u.ncols() != singular_values.len() {
        return Err(Error::validation("singular value count does not match column count"));
    }
    if singular_values.iter().any(|&s| s < 0.0 || !s.is_finite()) {
        return Err(Error::validation("singular values must be nonnegative"));
    }
    let mut scaled = u.clone();
    for (mut col, &s) in scaled.column_iter_mut().zip(singular_values.iter()) {
        col *= s.sqrt();
    }
    Embedding::new(scaled, Provenance::RawSvd)
}
