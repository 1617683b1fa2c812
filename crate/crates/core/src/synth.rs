//! Synthetic graph generators.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::rng::{stream_rng, streams, StreamRng};

/// Pairing rounds without progress before switching to edge repair.
const STALLED_ROUNDS: usize = 3;

/// Random `degree`-regular simple graph on `n` nodes from the permutation
/// pairing model. Stubs are shuffled and paired; pairs that would form a
/// self-loop or a repeated edge go back into the pool. Stubs left over when
/// reshuffling stops making progress are placed by edge switches.
pub fn random_regular_graph(n: usize, degree: usize, seed: u64) -> Result<SparseGraph> {
    if degree >= n {
        return Err(Error::validation(format!("degree {degree} must be smaller than the node count {n}")));
    }
    if (n * degree) % 2 == 1 {
        return Err(Error::validation(format!(
            "no {degree}-regular graph on {n} nodes: n·degree is odd"
        )));
    }
    let mut rng = stream_rng(seed, streams::SYNTH);
    let mut builder = SimpleGraphBuilder::new(n, degree);
    let mut pool: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    let mut stalled = 0;
    while !pool.is_empty() && stalled < STALLED_ROUNDS {
        pool.shuffle(&mut rng);
        let before = pool.len();
        let mut rejected = Vec::new();
        for pair in pool.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if !builder.try_add(u, v) {
                rejected.extend_from_slice(pair);
            }
        }
        pool = rejected;
        stalled = if pool.len() < before { 0 } else { stalled + 1 };
    }
    while !pool.is_empty() {
        let v = pool.pop().expect("pool has an even number of stubs");
        let u = pool.pop().expect("pool has an even number of stubs");
        if !builder.try_add(u, v) {
            builder.switch_in(u, v, &mut rng)?;
        }
    }
    SparseGraph::from_edges(n, &builder.weighted_edges())
}

struct SimpleGraphBuilder {
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraphBuilder {
    fn new(n: usize, degree: usize) -> Self {
        SimpleGraphBuilder {
            neighbors: vec![Vec::with_capacity(degree); n],
            edges: Vec::with_capacity(n * degree / 2),
        }
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].contains(&v)
    }

    fn try_add(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.adjacent(u, v) {
            return false;
        }
        self.neighbors[u].push(v);
        self.neighbors[v].push(u);
        self.edges.push((u, v));
        true
    }

    fn remove_at(&mut self, k: usize) -> (usize, usize) {
        let (x, y) = self.edges.swap_remove(k);
        self.neighbors[x].retain(|&w| w != y);
        self.neighbors[y].retain(|&w| w != x);
        (x, y)
    }

    /// Place the stub pair `(u, v)` by replacing a random edge `x–y` with `u–x` and `v–y`.
    fn switch_in(&mut self, u: usize, v: usize, rng: &mut StreamRng) -> Result<()> {
        for _ in 0..100_000 {
            if self.edges.is_empty() {
                break;
            }
            let k = rng.random_range(0..self.edges.len());
            let (mut x, mut y) = self.edges[k];
            if rng.random::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            let distinct = x != u && x != v && y != u && y != v;
            if distinct && !self.adjacent(u, x) && !self.adjacent(v, y) && (u != v || x != y) {
                self.remove_at(k);
                self.try_add(u, x);
                self.try_add(v, y);
                return Ok(());
            }
        }
        Err(Error::Internal("edge switching failed to place the remaining stubs".into()))
    }

    fn weighted_edges(&self) -> Vec<(usize, usize, f64)> {
        self.edges.iter().map(|&(u, v)| (u, v, 1.0)).collect()
    }
}

/// Stochastic block model: nodes are assigned to consecutive blocks of the
/// given sizes; each pair is linked with probability `p_in` inside a block and
/// `p_out` across blocks. Returns the graph and the block of every node.
pub fn stochastic_block_model(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<(SparseGraph, Vec<usize>)> {
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return Err(Error::validation("edge probabilities must lie in [0, 1]"));
    }
    let block: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block.len();
    let mut rng = stream_rng(seed, streams::SYNTH);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    Ok((SparseGraph::from_edges(n, &edges)?, block))
}
