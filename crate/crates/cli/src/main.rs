mod alloc;
mod commands;
mod config;
mod io;

use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use progle_core::Error;

use commands::{BenchArgs, EmbedArgs, EnhanceArgs, EvaluateArgs, SynthArgs};

#[global_allocator]
static ALLOCATOR: alloc::CountingAllocator = alloc::CountingAllocator;

/// Sparse spectral network embedding.
#[derive(Parser, Debug)]
#[command(name = "progle", version)]
struct Cli {
    /// Worker threads for the numeric kernels (0 = all cores).
    #[arg(long, env = "PROGLE_THREADS", default_value_t = 1, global = true)]
    threads: usize,
    /// More log output; repeat for debug messages.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed the nodes of a graph.
    Embed(EmbedArgs),
    /// Propagate an existing embedding through the modulated graph.
    Enhance(EnhanceArgs),
    /// Multi-label node classification with repeated random splits.
    Evaluate(EvaluateArgs),
    /// Generate a random regular graph or a stochastic block model.
    Synth(SynthArgs),
    /// Time the pipeline on synthetic regular graphs of growing size.
    Bench(BenchArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 2,
        Error::Validation(_) | Error::Alignment { .. } => 3,
        Error::Convergence { .. } => 4,
        Error::Io(_) | Error::Internal(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start the thread pool: {e}");
        return ExitCode::from(1);
    }

    let result = match &cli.command {
        Command::Embed(args) => commands::cmd_embed(args),
        Command::Enhance(args) => commands::cmd_enhance(args),
        Command::Evaluate(args) => commands::cmd_evaluate(args),
        Command::Synth(args) => commands::cmd_synth(args),
        Command::Bench(args) => commands::cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
