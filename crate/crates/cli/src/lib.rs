//! Command-line frontend for `orthosefe-core`: file formats, subcommands
//! and exit codes. `main` only forwards to [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod io;

/// Exit codes.
pub const FEASIBLE: i32 = 0;
pub const INFEASIBLE: i32 = 1;
pub const INPUT_ERROR: i32 = 2;
pub const INTERNAL_ERROR: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: INPUT_ERROR, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { code: INTERNAL_ERROR, message: message.into() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "orthosefe", version, about = "Simultaneous orthogonal embeddings with fixed edges")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide an instance: shared cycle with two graphs, or biconnected shared graph.
    Check(CheckArgs),
    /// Exhaustive side search for instances whose shared graph is a cycle.
    Oracle(OracleArgs),
    /// Apply one instance transformation until it no longer applies.
    Transform(TransformArgs),
    /// Write a generated instance as JSON.
    Generate(GenerateArgs),
    /// Draw a feasible instance on the grid and export SVG.
    Draw(DrawArgs),
    /// Print the SPQR-tree of the shared graph.
    Spqr(SpqrArgs),
    /// Check a side assignment or rotation system against an instance.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct Jobs {
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    A1x3,
    A1x4,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Write the witness: sides as JSON for cycle instances, a rotation system otherwise.
    #[arg(long)]
    pub emit_witness: Option<PathBuf>,
    /// Cycle-to-path gadget used for S-nodes of biconnected instances.
    #[arg(long, value_enum, default_value_t = Variant::A1x3)]
    pub variant: Variant,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub emit_witness: Option<PathBuf>,
    /// Refuse instances with more exclusive edges than this.
    #[arg(long, default_value_t = orthosefe_core::constraints::DEFAULT_ORACLE_CAP)]
    pub cap: usize,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformName {
    /// Remove alternating pairs of G1 edges.
    Outerplanarize,
    /// Remove G1 vertices of degree 4.
    ReduceDegree,
    /// Separate G1 degree-4 vertices from each other.
    IsolateDegreeFour,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(value_enum)]
    pub kind: TransformName,
    pub file: PathBuf,
    /// Transformed instance as JSON.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Applied steps as JSON.
    #[arg(long)]
    pub emit_trace: Option<PathBuf>,
    /// NAE formula of the transformed instance, DIMACS-like.
    #[arg(long)]
    pub emit_formula: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Positive NAE3SAT formula, one clause of three variable names per line.
    #[arg(long, conflicts_with = "random", requires = "theorem")]
    pub nae3sat: Option<PathBuf>,
    /// 3 for the three-graph construction, 4 for the two-graph one.
    #[arg(long, value_parser = clap::value_parser!(u8).range(3..=4))]
    pub theorem: Option<u8>,
    /// Random cycle instance, `n=.. m=.. seed=..` (also `k=`, `cap=`).
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub random: Option<Vec<String>>,
    /// With `--random`: grow a biconnected shared graph with this many extra shared edges.
    #[arg(long, requires = "random")]
    pub biconnected: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DrawArgs {
    pub file: PathBuf,
    /// Rotation system to draw; computed by `check` when absent.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Shared edge `u-v` drawn around the outside.
    #[arg(long)]
    pub root: Option<String>,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Args, Debug)]
pub struct SpqrArgs {
    pub file: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("certificate").required(true))]
pub struct ValidateArgs {
    pub file: PathBuf,
    #[arg(long, group = "certificate")]
    pub witness: Option<PathBuf>,
    #[arg(long, group = "certificate")]
    pub embedding: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand, writes the
/// report to `out` and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { FEASIBLE };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("orthosefe: {}", e.message);
            e.code
        }
    }
}
