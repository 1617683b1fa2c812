use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Args;
use progle_core::eval::{evaluate, LabelSet, DEFAULT_L2, DEFAULT_TRIALS};
use progle_core::graph::{load_edge_list, write_edge_list};
use progle_core::pipeline::{embed, PhaseTimings};
use progle_core::spectral::enhance;
use progle_core::synth::{random_regular_graph, stochastic_block_model};
use progle_core::{Embedding, Error, NodeIdMap, Provenance, Result, SparseGraph};
use serde_json::json;

use crate::alloc;
use crate::config::RunConfig;
use crate::io::{align, ids_path, read_embedding, write_embedding};

#[derive(Args, Debug)]
pub struct EmbedArgs {
    /// Edge list: `u v [w]` per line.
    pub edges: PathBuf,
    /// Output embedding file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the unpropagated embedding here.
    #[arg(long)]
    pub raw_out: Option<PathBuf>,
    /// Write raw little-endian f64 plus a JSON sidecar instead of text.
    #[arg(long)]
    pub binary: bool,
    /// Read edge weights from the third column.
    #[arg(long)]
    pub weighted: bool,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Args, Debug)]
pub struct EnhanceArgs {
    pub edges: PathBuf,
    /// Embedding to propagate, text or binary.
    pub embedding: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub binary: bool,
    #[arg(long)]
    pub weighted: bool,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Embedding file, text or binary.
    pub embedding: PathBuf,
    /// Label file: `node label1 label2 …` per line.
    pub labels: PathBuf,
    /// Training ratios.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// L2 penalty of the logistic regressions.
    #[arg(long, default_value_t = DEFAULT_L2)]
    pub l2: f64,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, required_unless_present = "blocks")]
    pub nodes: Option<usize>,
    #[arg(long, required_unless_present = "blocks")]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Block sizes of a stochastic block model instead of a regular graph.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["nodes", "degree"], requires_all = ["p_in", "p_out"])]
    pub blocks: Option<Vec<usize>>,
    /// Edge probability inside a block.
    #[arg(long)]
    pub p_in: Option<f64>,
    /// Edge probability across blocks.
    #[arg(long)]
    pub p_out: Option<f64>,
    /// Write the block of every node as a label file.
    #[arg(long, requires = "blocks")]
    pub labels_out: Option<PathBuf>,
    /// Edge list file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Node counts of the synthetic regular graphs.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    pub scales: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub degree: usize,
    #[command(flatten)]
    pub config: RunConfig,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn print_timings(t: &PhaseTimings) {
    eprintln!("phase\tms");
    for (name, d) in [
        ("proximity", t.proximity),
        ("shifted_log", t.shifted_log),
        ("svd", t.svd),
        ("propagation", t.propagation),
        ("total", t.total()),
    ] {
        eprintln!("{name}\t{:.3}", millis(d));
    }
}

fn output_meta(command: &str, provenance: Provenance, config: &RunConfig) -> serde_json::Value {
    json!({
        "command": command,
        "provenance": provenance.as_str(),
        "config": config.to_json(),
    })
}

pub fn cmd_embed(args: &EmbedArgs) -> Result<()> {
    eprintln!("# config {}", args.config.describe());
    let pipeline = args.config.pipeline()?;
    let (g, ids) = load_edge_list(&args.edges, args.weighted)?;
    eprintln!("# graph nodes={} edges={}", g.node_count(), g.edge_count());
    let out = embed(&g, &pipeline)?;
    let n = g.node_count() as f64;
    eprintln!(
        "# proximity nnz={} density={:.3e}",
        out.raw.proximity_nnz,
        out.raw.proximity_nnz as f64 / (n * n)
    );
    eprintln!("# shifted_log nnz={}", out.raw.shifted_log_nnz);
    eprintln!("# svd products={}", out.raw.svd_matvecs);
    print_timings(&out.timings);

    if let Some(raw_path) = &args.raw_out {
        let meta = output_meta("embed", Provenance::RawSvd, &args.config);
        write_embedding(raw_path, args.binary, ids.labels(), &out.raw.embedding.vectors, meta)?;
    }
    let meta = output_meta("embed", Provenance::Propagated, &args.config);
    write_embedding(&args.out, args.binary, ids.labels(), &out.embedding.vectors, meta)?;
    ids.save(ids_path(&args.out))?;
    Ok(())
}

pub fn cmd_enhance(args: &EnhanceArgs) -> Result<()> {
    eprintln!("# config {}", args.config.describe());
    let spec = args.config.filter()?;
    let (g, ids) = load_edge_list(&args.edges, args.weighted)?;
    let external = Embedding::new(align(&ids, read_embedding(&args.embedding)?)?, Provenance::External)?;
    let start = std::time::Instant::now();
    let out = enhance(&g, &spec, &external)?;
    eprintln!("phase\tms\npropagation\t{:.3}", millis(start.elapsed()));
    let meta = output_meta("enhance", Provenance::Propagated, &args.config);
    write_embedding(&args.out, args.binary, ids.labels(), &out.vectors, meta)?;
    ids.save(ids_path(&args.out))?;
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let emb = read_embedding(&args.embedding)?;
    let mut ids = NodeIdMap::new();
    for label in &emb.labels {
        ids.insert(label);
    }
    let labels = LabelSet::read(BufReader::new(File::open(&args.labels)?), &ids)?;
    let report = evaluate(&emb.vectors, &labels, &args.ratios, args.trials, args.seed, args.l2)?;
    match &args.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write_tsv(&mut w)?;
            w.flush()?;
        }
        None => report.write_tsv(std::io::stdout().lock())?,
    }
    Ok(())
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = std::io::stdout().lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let g = match &args.blocks {
        Some(sizes) => {
            let (p_in, p_out) = (args.p_in.unwrap_or(0.0), args.p_out.unwrap_or(0.0));
            let (g, block) = stochastic_block_model(sizes, p_in, p_out, args.seed)?;
            if let Some(path) = &args.labels_out {
                write_to(Some(path), |w| {
                    for (node, b) in block.iter().enumerate() {
                        writeln!(w, "{node} {b}")?;
                    }
                    Ok(())
                })?;
            }
            g
        }
        None => {
            let (n, degree) = (args.nodes.unwrap_or(0), args.degree.unwrap_or(0));
            random_regular_graph(n, degree, args.seed)?
        }
    };
    eprintln!("# graph nodes={} edges={}", g.node_count(), g.edge_count());
    write_to(args.out.as_deref(), |w| write_edge_list(&g, w))
}

/// Rough upper bound on the heap needed to embed a regular graph.
fn estimated_bytes(n: usize, degree: usize, config: &RunConfig) -> usize {
    let reach: usize = (1..=config.order).map(|i| degree.pow(i as u32)).sum::<usize>().min(n);
    let sparse = 3 * n * reach * 16;
    let krylov = 2 * n * (2 * config.dim + 16) * 8;
    let dense = 8 * n * config.dim * 8;
    sparse + krylov + dense
}

fn available_bytes() -> Option<usize> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: usize = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

enum ScaleOutcome {
    Done { edges: usize, timings: PhaseTimings, peak: usize },
    Skipped(String),
}

fn bench_scale(n: usize, degree: usize, config: &RunConfig) -> Result<ScaleOutcome> {
    let needed = estimated_bytes(n, degree, config);
    if let Some(available) = available_bytes() {
        if needed > available {
            return Ok(ScaleOutcome::Skipped(format!(
                "needs about {} MB, {} MB available",
                needed >> 20,
                available >> 20
            )));
        }
    }
    let g: SparseGraph = random_regular_graph(n, degree, config.seed)?;
    let pipeline = config.pipeline()?;
    alloc::reset_peak();
    let out = embed(&g, &pipeline)?;
    let peak = alloc::peak_bytes();
    Ok(ScaleOutcome::Done {
        edges: g.edge_count(),
        timings: out.timings,
        peak,
    })
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    eprintln!("# config {}", args.config.describe());
    args.config.pipeline()?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "nodes\tedges\tsparse_ms\tpropagation_ms\ttotal_ms\tpeak_heap_mb\tstatus")?;
    let mut failures = 0;
    for &n in &args.scales {
        let outcome = catch_unwind(AssertUnwindSafe(|| bench_scale(n, args.degree, &args.config)));
        let line = match outcome {
            Ok(Ok(ScaleOutcome::Done { edges, timings, peak })) => format!(
                "{n}\t{edges}\t{:.3}\t{:.3}\t{:.3}\t{:.3}\tok",
                millis(timings.sparse_embedding()),
                millis(timings.propagation),
                millis(timings.total()),
                peak as f64 / (1024.0 * 1024.0)
            ),
            Ok(Ok(ScaleOutcome::Skipped(why))) => {
                failures += 1;
                format!("{n}\t-\t-\t-\t-\t-\tskipped: {why}")
            }
            Ok(Err(e)) => {
                failures += 1;
                format!("{n}\t-\t-\t-\t-\t-\tfailed: {e}")
            }
            Err(_) => {
                failures += 1;
                format!("{n}\t-\t-\t-\t-\t-\tfailed: panic")
            }
        };
        writeln!(stdout, "{line}")?;
        stdout.flush()?;
    }
    if failures > 0 {
        return Err(Error::Validation(format!("{failures} scale(s) did not complete")));
    }
    Ok(())
}
