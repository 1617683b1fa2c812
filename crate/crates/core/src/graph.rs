//! Undirected weighted graphs, edge-list I/O and the derived random-walk operators.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Comment prefix that declares the node count of an edge file. When present,
/// labels `0..n` are registered up front in numeric order, so isolated nodes
/// are kept and internal indices equal the integer labels.
pub const NODE_COUNT_HEADER: &str = "# nodes:";

/// Immutable undirected weighted graph.
///
/// The adjacency matrix is stored in full (both directions), has no
/// self-loops and only positive weights. `degree[i]` is the sum of row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    adjacency: SparseMatrix,
    degree: Vec<f64>,
}

impl SparseGraph {
    /// Build from undirected edges `(u, v, w)`. Each edge is stored in both
    /// directions and repeated edges have their weights summed.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut triplets = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::validation(format!("edge ({u}, {v}) outside a graph of {n} nodes")));
            }
            if u == v {
                return Err(Error::validation(format!("self-loop on node {u}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::validation(format!("edge ({u}, {v}) has non-positive weight {w}")));
            }
            triplets.push((u, v, w));
            triplets.push((v, u, w));
        }
        let adjacency = SparseMatrix::from_triplets(n, n, &triplets)?;
        Ok(Self::from_adjacency_unchecked(adjacency))
    }

    /// Wrap a symmetric adjacency matrix, validating the graph invariants.
    pub fn from_adjacency(adjacency: SparseMatrix) -> Result<Self> {
        if adjacency.rows() != adjacency.cols() {
            return Err(Error::validation("adjacency matrix is not square"));
        }
        for (r, c, v) in adjacency.iter() {
            if r == c {
                return Err(Error::validation(format!("self-loop on node {r}")));
            }
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("entry ({r}, {c}) has non-positive weight {v}")));
            }
            if adjacency.get(c, r) != v {
                return Err(Error::validation(format!("adjacency is not symmetric at ({r}, {c})")));
            }
        }
        Ok(Self::from_adjacency_unchecked(adjacency))
    }

    fn from_adjacency_unchecked(adjacency: SparseMatrix) -> Self {
        let degree = adjacency.row_sums();
        SparseGraph { adjacency, degree }
    }

    pub fn node_count(&self) -> usize {
        self.degree.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.nnz() / 2
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    /// Neighbors of `node` and the corresponding edge weights.
    pub fn neighbors(&self, node: usize) -> (&[usize], &[f64]) {
        self.adjacency.row(node)
    }

    /// Undirected edges with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().filter(|&(u, v, _)| u < v)
    }

    /// Transition matrix `D⁻¹A`. Rows of zero-degree nodes stay empty.
    pub fn transition_matrix(&self) -> SparseMatrix {
        let mut values = self.adjacency.values().to_vec();
        let offsets = self.adjacency.offsets();
        for r in 0..self.node_count() {
            let d = self.degree[r];
            if d > 0.0 {
                values[offsets[r]..offsets[r + 1]].iter_mut().for_each(|v| *v /= d);
            }
        }
        SparseMatrix::from_parts_unchecked(
            self.node_count(),
            self.node_count(),
            offsets.to_vec(),
            self.adjacency.indices().to_vec(),
            values,
        )
    }

    /// Random-walk normalized Laplacian `I − D⁻¹A`, with the diagonal stored explicitly.
    pub fn rw_laplacian(&self) -> SparseMatrix {
        let p = self.transition_matrix();
        let n = self.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut indices = Vec::with_capacity(p.nnz() + n);
        let mut values = Vec::with_capacity(p.nnz() + n);
        offsets.push(0);
        for r in 0..n {
            let (idx, val) = p.row(r);
            let mut diagonal_done = false;
            for (&c, &v) in idx.iter().zip(val) {
                if !diagonal_done && c >= r {
                    if c == r {
                        indices.push(r);
                        values.push(1.0 - v);
                        diagonal_done = true;
                        continue;
                    }
                    indices.push(r);
                    values.push(1.0);
                    diagonal_done = true;
                }
                indices.push(c);
                values.push(-v);
            }
            if !diagonal_done {
                indices.push(r);
                values.push(1.0);
            }
            offsets.push(indices.len());
        }
        SparseMatrix::from_parts_unchecked(n, n, offsets, indices, values)
    }
}

/// Bidirectional mapping between external node labels and dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeIdMap {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeIdMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Map labels `"0".."n-1"` onto themselves.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::new();
        for i in 0..n {
            map.insert(&i.to_string());
        }
        map
    }

    /// Index of `label`, registering it with the next free index if unseen.
    pub fn insert(&mut self, label: &str) -> usize {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), i);
        i
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Write the sidecar format: one `external_label internal_index` line per node.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(w, "{label} {i}")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(label), Some(idx), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(lineno + 1, "expected `label index`"));
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(lineno + 1, format!("bad index `{idx}`")))?;
            entries.push((idx, label.to_owned()));
        }
        entries.sort();
        let mut map = Self::new();
        for (expected, (idx, label)) in entries.into_iter().enumerate() {
            if idx != expected || map.index_of(&label).is_some() {
                return Err(Error::validation("node id sidecar is not a bijection onto 0..n"));
            }
            map.insert(&label);
        }
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }
}

/// Parse an edge list. Lines are `u v` or `u v w`; blank lines and lines
/// starting with `#` are skipped. Internal indices follow first appearance
/// unless a [`NODE_COUNT_HEADER`] line precedes the edges. Self-loops are
/// dropped. With `weighted == false` any third column is ignored.
pub fn read_edge_list<R: BufRead>(reader: R, weighted: bool) -> Result<(SparseGraph, NodeIdMap)> {
    let mut ids = NodeIdMap::new();
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut self_loops = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(NODE_COUNT_HEADER) {
            if !edges.is_empty() || declared.is_some() {
                return Err(Error::parse(lineno, "node-count header must precede all edges"));
            }
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad node count `{}`", rest.trim())))?;
            ids = NodeIdMap::identity(n);
            declared = Some(n);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(
                lineno,
                format!("expected `u v` or `u v w`, found {} fields", fields.len()),
            ));
        }
        let w = if weighted && fields.len() == 3 {
            let w: f64 = fields[2]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad weight `{}`", fields[2])))?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::validation(format!("line {lineno}: weight {w} is not positive")));
            }
            w
        } else {
            1.0
        };
        let mut endpoint = |label: &str| -> Result<usize> {
            match declared {
                Some(n) => ids.index_of(label).ok_or_else(|| {
                    Error::validation(format!(
                        "line {lineno}: label `{label}` outside the declared {n} nodes"
                    ))
                }),
                None => Ok(ids.insert(label)),
            }
        };
        let u = endpoint(fields[0])?;
        let v = endpoint(fields[1])?;
        if u == v {
            self_loops += 1;
            continue;
        }
        edges.push((u, v, w));
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop line(s) from edge list");
    }
    let graph = SparseGraph::from_edges(ids.len(), &edges)?;
    Ok((graph, ids))
}

/// Load an edge-list file; see [`read_edge_list`].
pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<(SparseGraph, NodeIdMap)> {
    read_edge_list(BufReader::new(File::open(path)?), weighted)
}

/// Write `g` in index space with a node-count header, one undirected edge per
/// line. Weights are written only if some weight differs from 1. Reading the
/// output back with `weighted == true` reproduces `g` exactly.
pub fn write_edge_list<W: Write>(g: &SparseGraph, mut w: W) -> std::io::Result<()> {
    let weighted = g.adjacency().values().iter().any(|&v| v != 1.0);
    writeln!(w, "{NODE_COUNT_HEADER} {}", g.node_count())?;
    for (u, v, weight) in g.edges() {
        if weighted {
            writeln!(w, "{u} {v} {weight}")?;
        } else {
            writeln!(w, "{u} {v}")?;
        }
    }
    Ok(())
}

pub fn save_edge_list(g: &SparseGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_edge_list(g, &mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> (SparseGraph, NodeIdMap) {
        read_edge_list(text.as_bytes(), false).unwrap()
    }

    #[test]
    fn triangle() {
        let (g, ids) = parse("0 1\n1 2\n0 2\n");
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.adjacency().nnz(), 6);
        assert_eq!(g.degree(), &[2.0, 2.0, 2.0]);
        assert_eq!(ids.labels(), &["0", "1", "2"]);
    }

    #[test]
    fn single_edge() {
        let (g, _) = parse("0 1");
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.degree(), &[1.0, 1.0]);
    }

    #[test]
    fn duplicate_edges_sum() {
        let (g, _) = parse("0 1\n0 1\n");
        assert_eq!(g.adjacency().get(0, 1), 2.0);
        assert_eq!(g.adjacency().get(1, 0), 2.0);
        let (g, _) = parse("0 1\n1 0\n");
        assert_eq!(g.adjacency().get(0, 1), 2.0);
    }

    #[test]
    fn labels_follow_first_appearance() {
        let (g, ids) = parse("# comment\nb a\n\nc b\n");
        assert_eq!(ids.labels(), &["b", "a", "c"]);
        assert_eq!(g.neighbors(0).0, &[1, 2]);
    }

    #[test]
    fn node_count_header_keeps_isolates() {
        let (g, ids) = parse("# nodes: 4\n2 0\n");
        assert_eq!(g.node_count(), 4);
        assert_eq!(ids.index_of("3"), Some(3));
        assert_eq!(g.degree(), &[1.0, 0.0, 1.0, 0.0]);
        assert!(read_edge_list("# nodes: 2\n0 5\n".as_bytes(), false).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match read_edge_list("0 1\n\n0\n".as_bytes(), false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match read_edge_list("0 1 x\n".as_bytes(), true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read_edge_list("0 1 -1\n".as_bytes(), true),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            read_edge_list("0 1 0\n".as_bytes(), true),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn self_loops_are_dropped() {
        let (g, _) = parse("0 0\n0 1\n");
        assert_eq!(g.adjacency().nnz(), 2);
    }

    #[test]
    fn transition_examples() {
        let (g, _) = parse("0 1");
        assert_eq!(g.transition_matrix().to_dense(), nalgebra::dmatrix![0.0, 1.0; 1.0, 0.0]);

        let (g, _) = parse("0 1\n1 2\n0 2\n");
        let p = g.transition_matrix();
        for (r, c, v) in p.iter() {
            assert_ne!(r, c);
            assert_eq!(v, 0.5);
        }
        assert_eq!(p.nnz(), 6);

        let (g, _) = parse("0 1\n0 2\n0 3\n");
        let p = g.transition_matrix().to_dense();
        assert_eq!(p.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        for r in 1..4 {
            assert_eq!(p.row(r).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn zero_degree_rows_are_empty() {
        let g = SparseGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        let p = g.transition_matrix();
        assert_eq!(p.row(2).0.len(), 0);
        let l = g.rw_laplacian();
        assert_eq!(l.row(2), (&[2usize][..], &[1.0][..]));
    }

    #[test]
    fn laplacian_of_single_edge() {
        let (g, _) = parse("0 1");
        assert_eq!(g.rw_laplacian().to_dense(), nalgebra::dmatrix![1.0, -1.0; -1.0, 1.0]);
    }

    #[test]
    fn from_edges_rejects_invalid() {
        assert!(SparseGraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(SparseGraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
        assert!(SparseGraph::from_edges(2, &[(0, 1, 0.0)]).is_err());
        let asym = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]).unwrap();
        assert!(SparseGraph::from_adjacency(asym).is_err());
    }

    #[test]
    fn id_map_sidecar_round_trip() {
        let (_, ids) = parse("x y\ny z\n");
        let mut buf = Vec::new();
        ids.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x 0\ny 1\nz 2\n");
        assert_eq!(NodeIdMap::read(buf.as_slice()).unwrap(), ids);
        assert!(NodeIdMap::read("a 0\nb 2\n".as_bytes()).is_err());
    }
}
