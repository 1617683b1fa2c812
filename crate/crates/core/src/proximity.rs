//! Sparse node-context proximity built from edge-dropout masked transition powers.
//!
//! Term `i` of the sum is the `i`-step transition probability `(D⁻¹A)^i`,
//! kept only where `A·Â_1⋯Â_{i-1}` is nonzero (each `Â_j` an independent
//! edge-dropout copy of `A`). The summed terms are row-normalized.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::rng::{derive_seed, stream_rng, streams};
use crate::sparse::SparseMatrix;

/// Row-stochastic sparse proximity matrix. Its support is the node-context pair set.
#[derive(Debug, Clone)]
pub struct ProximityMatrix {
    pub matrix: SparseMatrix,
    pub order: usize,
    pub dropout: f64,
    pub seed: u64,
}

impl ProximityMatrix {
    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Fraction of the `n²` positions that are stored.
    pub fn density(&self) -> f64 {
        let n = self.matrix.rows() as f64;
        if n == 0.0 {
            0.0
        } else {
            self.matrix.nnz() as f64 / (n * n)
        }
    }
}

fn check_dropout(eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::validation(format!("dropout ratio {eta} outside [0, 1)")));
    }
    Ok(())
}

/// Seed used for the `j`-th dropout draw (`j ≥ 1`) of [`build_proximity`].
pub fn dropout_seed(seed: u64, j: usize) -> u64 {
    derive_seed(seed, j as u64)
}

/// Drop each undirected edge of `g` independently with probability `eta`.
/// Both directions of an edge share one draw; kept edges keep their weight.
pub fn dropout_adjacency(g: &SparseGraph, eta: f64, seed: u64) -> Result<SparseMatrix> {
    check_dropout(eta)?;
    let mut rng = stream_rng(seed, streams::DROPOUT);
    let mut kept = Vec::new();
    for (u, v, w) in g.edges() {
        let draw: f64 = rng.random();
        if draw >= eta {
            kept.push((u, v, w));
            kept.push((v, u, w));
        }
    }
    SparseMatrix::from_triplets(g.node_count(), g.node_count(), &kept)
}

/// Replace every stored value by 1.
pub fn binarize_support(x: &SparseMatrix) -> SparseMatrix {
    x.map_values(|_| 1.0)
}

/// Build the row-normalized proximity matrix of order `order` with dropout `eta`.
pub fn build_proximity(g: &SparseGraph, order: usize, eta: f64, seed: u64) -> Result<ProximityMatrix> {
    if order < 1 {
        return Err(Error::validation("proximity order must be at least 1"));
    }
    check_dropout(eta)?;
    if order > 3 {
        log::warn!("proximity order {order} > 3; cost grows with the {order}-hop neighborhood");
    }
    let n = g.node_count();
    let transition = g.transition_matrix();
    let dropped = (1..order)
        .map(|j| dropout_adjacency(g, eta, dropout_seed(seed, j)))
        .collect::<Result<Vec<_>>>()?;

    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .with_min_len(256)
        .map_init(
            || RowWorkspace::new(n),
            |ws, r| ws.proximity_row(r, g.adjacency(), &transition, &dropped),
        )
        .collect();

    let mut offsets = Vec::with_capacity(n + 1);
    let total: usize = rows.iter().map(Vec::len).sum();
    let mut indices = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    offsets.push(0);
    for row in rows {
        for (c, v) in row {
            indices.push(c);
            values.push(v);
        }
        offsets.push(indices.len());
    }
    Ok(ProximityMatrix {
        matrix: SparseMatrix::from_parts_unchecked(n, n, offsets, indices, values),
        order,
        dropout: eta,
        seed,
    })
}

/// Sparse accumulator for one output row.
struct Accumulator {
    values: Vec<f64>,
    stamp: Vec<u32>,
    touched: Vec<usize>,
    epoch: u32,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            values: vec![0.0; n],
            stamp: vec![0; n],
            touched: Vec::new(),
            epoch: 0,
        }
    }

    fn clear(&mut self) {
        self.touched.clear();
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    #[inline]
    fn contains(&self, c: usize) -> bool {
        self.stamp[c] == self.epoch
    }

    #[inline]
    fn add(&mut self, c: usize, v: f64) {
        if self.stamp[c] == self.epoch {
            self.values[c] += v;
        } else {
            self.stamp[c] = self.epoch;
            self.values[c] = v;
            self.touched.push(c);
        }
    }

    /// Touched entries in column order.
    fn drain_sorted(&mut self) -> Vec<(usize, f64)> {
        self.touched.sort_unstable();
        self.touched.iter().map(|&c| (c, self.values[c])).collect()
    }
}

struct RowWorkspace {
    power: Vec<(usize, f64)>,
    next: Accumulator,
    mask: Accumulator,
    mask_next: Accumulator,
    total: Accumulator,
}

impl RowWorkspace {
    fn new(n: usize) -> Self {
        RowWorkspace {
            power: Vec::new(),
            next: Accumulator::new(n),
            mask: Accumulator::new(n),
            mask_next: Accumulator::new(n),
            total: Accumulator::new(n),
        }
    }

    fn proximity_row(
        &mut self,
        r: usize,
        adjacency: &SparseMatrix,
        transition: &SparseMatrix,
        dropped: &[SparseMatrix],
    ) -> Vec<(usize, f64)> {
        self.total.clear();
        self.mask.clear();
        let (idx, val) = transition.row(r);
        self.power.clear();
        self.power.extend(idx.iter().copied().zip(val.iter().copied()));
        for &c in adjacency.row(r).0 {
            self.mask.add(c, 1.0);
        }
        for &(c, v) in &self.power {
            self.total.add(c, v);
        }

        let order = dropped.len() + 1;
        for (step, a_hat) in dropped.iter().enumerate() {
            // mask ← support(mask · Â_j)
            self.mask_next.clear();
            for &k in &self.mask.touched {
                for &c in a_hat.row(k).0 {
                    self.mask_next.add(c, 1.0);
                }
            }
            std::mem::swap(&mut self.mask, &mut self.mask_next);
            if self.mask.touched.is_empty() {
                break;
            }

            let last = step + 2 == order;
            self.next.clear();
            for &(k, pk) in &self.power {
                let (idx, val) = transition.row(k);
                for (&c, &v) in idx.iter().zip(val) {
                    if !last || self.mask.contains(c) {
                        self.next.add(c, pk * v);
                    }
                }
            }
            self.power = self.next.drain_sorted();
            for &(c, v) in &self.power {
                if self.mask.contains(c) {
                    self.total.add(c, v);
                }
            }
        }

        let mut row = self.total.drain_sorted();
        let sum: f64 = row.iter().map(|&(_, v)| v).sum();
        if sum > 0.0 {
            row.iter_mut().for_each(|(_, v)| *v /= sum);
        }
        row
    }
}
