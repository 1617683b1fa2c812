//! Embedding files.
//!
//! Text: a `n d` header line, then one `label v1 … vd` line per node.
//! Binary: `n·d` little-endian f64 values in row-major order, with a JSON
//! sidecar at `<path>.json` holding the shape, the row labels and the run
//! configuration.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use progle_core::{Error, NodeIdMap, Result};
use serde_json::{json, Value};

/// Labels listed in alignment errors.
const SHOWN_LABELS: usize = 10;

pub struct LabeledMatrix {
    pub labels: Vec<String>,
    pub vectors: DMatrix<f64>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn ids_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".ids");
    PathBuf::from(s)
}

pub fn write_text<W: Write>(mut w: W, labels: &[String], x: &DMatrix<f64>) -> std::io::Result<()> {
    writeln!(w, "{} {}", x.nrows(), x.ncols())?;
    let mut line = String::new();
    for (r, label) in labels.iter().enumerate() {
        line.clear();
        line.push_str(label);
        for c in 0..x.ncols() {
            use std::fmt::Write as _;
            // adding zero turns -0 into 0
            write!(line, " {}", x[(r, c)] + 0.0).expect("writing to a String cannot fail");
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_text<R: BufRead>(reader: R) -> Result<LabeledMatrix> {
    let mut lines = reader.lines().enumerate();
    let (rows, cols) = match lines.next() {
        Some((_, header)) => {
            let header = header?;
            let fields: Vec<&str> = header.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[n, d]) => (n, d),
                _ => return Err(parse_error(1, format!("expected an `n d` header, found `{header}`"))),
            }
        }
        None => return Err(parse_error(1, "empty embedding file")),
    };
    let mut labels = Vec::with_capacity(rows);
    let mut values = Vec::with_capacity(rows * cols);
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if labels.len() == rows {
            return Err(parse_error(lineno, format!("more than the {rows} rows declared in the header")));
        }
        let mut fields = line.split_whitespace();
        let label = fields.next().expect("line is not blank");
        let before = values.len();
        for f in fields {
            let v: f64 = f
                .parse()
                .map_err(|_| parse_error(lineno, format!("bad value `{f}`")))?;
            values.push(v);
        }
        if values.len() - before != cols {
            return Err(parse_error(
                lineno,
                format!("expected {cols} values, found {}", values.len() - before),
            ));
        }
        labels.push(label.to_string());
    }
    if labels.len() != rows {
        return Err(parse_error(
            labels.len() + 2,
            format!("header declares {rows} rows but the file has {}", labels.len()),
        ));
    }
    check_unique(&labels)?;
    Ok(LabeledMatrix {
        labels,
        vectors: DMatrix::from_row_slice(rows, cols, &values),
    })
}

pub fn write_binary(path: &Path, labels: &[String], x: &DMatrix<f64>, meta: Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in 0..x.nrows() {
        for c in 0..x.ncols() {
            w.write_all(&x[(r, c)].to_le_bytes())?;
        }
    }
    w.flush()?;
    let sidecar = json!({
        "rows": x.nrows(),
        "cols": x.ncols(),
        "dtype": "f64-le",
        "layout": "row-major",
        "labels": labels,
        "meta": meta,
    });
    let mut text = serde_json::to_string_pretty(&sidecar).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(sidecar_path(path), text)?;
    Ok(())
}

pub fn read_binary(path: &Path) -> Result<LabeledMatrix> {
    let sidecar: Value = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)
        .map_err(|e| parse_error(e.line(), format!("sidecar JSON: {e}")))?;
    let field = |name: &str| {
        sidecar[name]
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| Error::Validation(format!("sidecar lacks an integer `{name}`")))
    };
    let (rows, cols) = (field("rows")?, field("cols")?);
    let labels: Vec<String> = match sidecar["labels"].as_array() {
        Some(a) => a
            .iter()
            .map(|v| v.as_str().map(str::to_string))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Validation("sidecar labels must be strings".into()))?,
        None => (0..rows).map(|i| i.to_string()).collect(),
    };
    if labels.len() != rows {
        return Err(Error::Validation(format!("sidecar has {} labels for {rows} rows", labels.len())));
    }
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() != rows * cols * 8 {
        return Err(Error::Validation(format!(
            "binary embedding has {} bytes, expected {} for a {rows}×{cols} matrix",
            bytes.len(),
            rows * cols * 8
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("chunk of eight bytes")))
        .collect();
    check_unique(&labels)?;
    Ok(LabeledMatrix {
        labels,
        vectors: DMatrix::from_row_slice(rows, cols, &values),
    })
}

/// Binary if a JSON sidecar sits next to the file, text otherwise.
pub fn read_embedding(path: &Path) -> Result<LabeledMatrix> {
    if sidecar_path(path).exists() {
        read_binary(path)
    } else {
        read_text(BufReader::new(File::open(path)?))
    }
}

pub fn write_embedding(path: &Path, binary: bool, labels: &[String], x: &DMatrix<f64>, meta: Value) -> Result<()> {
    if binary {
        write_binary(path, labels, x, meta)
    } else {
        // a stale sidecar would make the text file read back as binary
        let sidecar = sidecar_path(path);
        if sidecar.exists() {
            std::fs::remove_file(sidecar)?;
        }
        let mut w = BufWriter::new(File::create(path)?);
        write_text(&mut w, labels, x)?;
        w.flush()?;
        Ok(())
    }
}

/// Reorder embedding rows to the graph's internal indices. Every graph node
/// needs exactly one row and every row must name a graph node.
pub fn align(ids: &NodeIdMap, emb: LabeledMatrix) -> Result<DMatrix<f64>> {
    let position: HashMap<&str, usize> = emb.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let missing: Vec<&String> = ids.labels().iter().filter(|l| !position.contains_key(l.as_str())).collect();
    let extra: Vec<&String> = emb.labels.iter().filter(|l| ids.index_of(l).is_none()).collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::Alignment {
            missing: missing.iter().take(SHOWN_LABELS).map(|s| s.to_string()).collect(),
            missing_count: missing.len(),
            extra: extra.iter().take(SHOWN_LABELS).map(|s| s.to_string()).collect(),
            extra_count: extra.len(),
        });
    }
    let d = emb.vectors.ncols();
    Ok(DMatrix::from_fn(ids.len(), d, |r, c| {
        emb.vectors[(position[ids.label(r)], c)]
    }))
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Validation(format!("label `{l}` appears twice in the embedding")));
        }
    }
    Ok(())
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
