//! `boundwidth`: command-line front end.
//!
//! Exit status: 0 on success (and for satisfiable `sat` instances), 1 on
//! domain errors, 2 on usage errors, 10 for unsatisfiable `sat` instances.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "boundwidth", version, about = "Bounded-width circuits, branching programs and pebble games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print n, m, size, depth, layered width and read multiplicities.
    Stats { file: PathBuf },
    /// Evaluate a circuit under an assignment.
    Eval {
        file: PathBuf,
        /// `name=bit` pairs binding every actual variable, and either all
        /// guess variables or none.
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Layer a circuit, inserting COPY gates.
    Layer {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Lower a layered circuit to a branching program.
    ToBp {
        /// A circuit file; it is layered first unless it has `layer` lines.
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Pebble game tools.
    Pebble {
        #[command(subcommand)]
        command: PebbleCommand,
    },
    /// Cut edges until the depth is at most `--target` and rebuild the
    /// circuit blockwise in bounded width.
    DepthReduce {
        file: PathBuf,
        #[arg(long)]
        target: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Decide satisfiability.
    Sat {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Width)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Backend::Enum)]
        backend: Backend,
        /// Worker threads for the outer enumeration.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
}

#[derive(Subcommand)]
enum PebbleCommand {
    /// Check a trace against the rules; print its time and space.
    Validate {
        graph: PathBuf,
        trace: PathBuf,
        #[arg(long, value_enum, default_value_t = GameMode::Bw)]
        mode: GameMode,
    },
    /// Find the least space admitting a pebbling, with a shortest witness.
    Search {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = GameMode::Black)]
        mode: GameMode,
        #[arg(long, default_value_t = 14)]
        max_space: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a family graph with a standard pebbling.
    Gen {
        #[arg(value_enum)]
        family: FamilyKind,
        /// Length for paths, height for trees and pyramids.
        param: usize,
        /// `bw` additionally places white pebbles on the sink's predecessors
        /// first and verifies them last.
        #[arg(long, value_enum, default_value_t = GameMode::Black)]
        mode: GameMode,
        /// Write `STEM.graph` and `STEM.trace` instead of printing both.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Compile a pebbling of a circuit into a layered circuit.
    Compile {
        /// A circuit file, or a graph file with `--graph`.
        source: PathBuf,
        /// Trace over the node names of the circuit.
        trace: PathBuf,
        #[arg(long, value_enum)]
        mode: GameMode,
        /// Read `source` as a graph and realize it as a circuit.
        #[arg(long)]
        graph: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write the artifact here and the report to standard output. Without
    /// it the artifact goes to standard output and the report to standard
    /// error.
    #[arg(short = 'o', long = "output")]
    path: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Width,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Enum,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GameMode {
    Black,
    Bw,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Path,
    Tree,
    Pyramid,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
