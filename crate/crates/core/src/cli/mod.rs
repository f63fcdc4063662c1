//! Command-line front end.
//!
//! Every subcommand builds a parameter record from an optional JSON config
//! file overlaid with the flags given on the command line (flags win), hands
//! it to [`run`], and writes the resulting report.
//!
//! Exit codes: 0 success, 1 unknown or missing command, 2 invalid input,
//! 3 resource budget exhausted.

mod commands;

pub use commands::{run, COMMANDS};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Budget;
use crate::report::{rows_to_csv, serialize_report, ExperimentReport, Format};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "egeom", version, about = "Geometric measure of entanglement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
struct Common {
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Largest dense vector allowed, in amplitudes.
    #[arg(long)]
    budget_amps: Option<usize>,
    /// JSON object of parameters; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write per-sample rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interval for the geometric measure of one state.
    Gme(GmeArgs),
    /// Net certificate on the largest product overlap.
    NetBound(NetBoundArgs),
    /// Overlap tail of Haar vectors against the exact law.
    HaarTail(HaarTailArgs),
    /// Geometric measure of Haar-random qubit states.
    HaarGme(HaarGmeArgs),
    /// Entanglement threshold and its validity condition.
    #[command(name = "theorem2-threshold")]
    Theorem2Threshold(ThresholdArgs),
    /// Post-selected preparation ratio on Haar states.
    Cq(CqArgs),
    /// Resource size implied by inverse-polynomial correlations.
    CorrBound(CorrBoundArgs),
    /// Measurement strategies on a resource state.
    Mbqc {
        #[command(subcommand)]
        action: MbqcCommand,
    },
    /// Graph-state bounds.
    Graph {
        #[command(subcommand)]
        action: GraphCommand,
    },
    /// Tree tensor-network states.
    Mera(MeraArgs),
}

#[derive(Debug, Subcommand)]
enum MbqcCommand {
    /// Enumerate every outcome branch exactly.
    Enumerate(MbqcEnumerateArgs),
    /// Replace measurement outcomes by fair coins.
    Coinflip(MbqcCoinflipArgs),
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Lower bounds, optimizer estimate and Pauli persistency for one graph.
    Bounds(GraphBoundsArgs),
    /// The same bounds over every small connected graph.
    Corpus(GraphCorpusArgs),
}

#[derive(Debug, Args, Serialize)]
struct GmeArgs {
    /// State file, or `bell`, `ghz:N`, `w:N`, `zero:N[:D]`, `plus:N`, `haar:N[:D]:SEED`.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    net_max_nodes: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct NetBoundArgs {
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct HaarTailArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct HaarGmeArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    net_max_nodes: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct ThresholdArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct CqArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_subsets: Option<usize>,
    #[arg(long)]
    outer_restarts: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct CorrBoundArgs {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct MbqcEnumerateArgs {
    #[arg(long)]
    state: Option<String>,
    /// `z-readout`, `x-readout`, `adaptive-parity` or `random:SEED`.
    #[arg(long)]
    strategy: Option<String>,
    /// `accept-all`, `accept-none`, `all-equal`, `exact:BITS`,
    /// `subset-sum:T:W1,W2,..`, `factor:N`, `planted:DELTA`, `hashed:P[:SALT]`.
    #[arg(long)]
    verifier: Option<String>,
    #[arg(long)]
    check: Option<bool>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct MbqcCoinflipArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    verifier: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    pf: Option<f64>,
    #[arg(long)]
    runs: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct GraphBoundsArgs {
    /// Edge list file: one `u v` pair per line.
    #[arg(long, conflicts_with = "family")]
    #[serde(skip)]
    edges: Option<String>,
    /// `empty:N`, `star:N`, `path:N`, `cycle:N` or `complete:N`.
    #[arg(long)]
    #[serde(skip)]
    family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    partition: Option<Vec<usize>>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct GraphCorpusArgs {
    #[arg(long)]
    max_vertices: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

#[derive(Debug, Args, Serialize)]
struct MeraArgs {
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    per_layer: Option<bool>,
    #[arg(long)]
    als_restarts: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
}

/// Non-null fields of a flag struct.
fn given<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args).expect("flags serialize") {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

fn resolve(command: Command) -> (&'static str, Map<String, Value>, Common) {
    match command {
        Command::Gme(a) => ("gme", given(&a), a.common),
        Command::NetBound(a) => ("net-bound", given(&a), a.common),
        Command::HaarTail(a) => ("haar-tail", given(&a), a.common),
        Command::HaarGme(a) => ("haar-gme", given(&a), a.common),
        Command::Theorem2Threshold(a) => ("theorem2-threshold", given(&a), a.common),
        Command::Cq(a) => ("cq", given(&a), a.common),
        Command::CorrBound(a) => ("corr-bound", given(&a), a.common),
        Command::Mbqc { action: MbqcCommand::Enumerate(a) } => ("mbqc-enumerate", given(&a), a.common),
        Command::Mbqc { action: MbqcCommand::Coinflip(a) } => ("mbqc-coinflip", given(&a), a.common),
        Command::Graph { action: GraphCommand::Bounds(a) } => {
            let mut flags = given(&a);
            if let Some(g) = a.edges.clone().or_else(|| a.family.clone()) {
                flags.insert("graph".into(), Value::String(g));
            }
            ("graph-bounds", flags, a.common)
        }
        Command::Graph { action: GraphCommand::Corpus(a) } => ("graph-corpus", given(&a), a.common),
        Command::Mera(a) => ("mera", given(&a), a.common),
    }
}

/// Config file entries overlaid with the flags.
fn merge_params(config: Option<&PathBuf>, flags: Map<String, Value>, seed: Option<u64>) -> Result<Value> {
    let mut params = match config {
        None => Map::new(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid("config", format!("cannot read {}: {e}", path.display())))?;
            match serde_json::from_str(&text)? {
                Value::Object(m) => m,
                _ => return Err(Error::invalid("config", "must be a JSON object")),
            }
        }
    };
    params.extend(flags);
    if let Some(seed) = seed {
        params.insert("seed".into(), Value::from(seed));
    }
    Ok(Value::Object(params))
}

/// Runs `command` on `params` inside a pool of `threads` workers (the global
/// pool when `None`) and records the wall time.
pub fn run_with_threads(command: &str, params: &Value, budget: Budget, threads: Option<usize>) -> Result<ExperimentReport> {
    let start = Instant::now();
    let mut report = match threads {
        None => run(command, params, budget)?,
        Some(t) => {
            if t == 0 {
                return Err(Error::invalid("threads", "must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid("threads", e.to_string()))?;
            pool.install(|| run(command, params, budget))?
        }
    };
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

fn run_parsed(cli: Cli) -> Result<(&'static str, ExperimentReport, Common)> {
    let (command, flags, common) = resolve(cli.command);
    let params = merge_params(common.config.as_ref(), flags, common.seed)?;
    let budget = common.budget_amps.map(Budget::new).unwrap_or_else(Budget::from_env);
    let report = run_with_threads(command, &params, budget, common.threads)?;
    Ok((command, report, common))
}

/// Parses command-line arguments (without the program name) and returns the
/// report instead of writing it; `--out`, `--format` and `--csv` are ignored.
pub fn report_from_args<I, T>(args: I) -> Result<ExperimentReport>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv = std::iter::once(OsString::from("egeom")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::invalid("arguments", e.to_string()))?;
    Ok(run_parsed(cli)?.1)
}

fn execute(cli: Cli) -> Result<()> {
    let (command, report, common) = run_parsed(cli)?;
    let format = match common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let mut bytes = serialize_report(&report, format)?;
    if let Some(path) = &common.csv {
        let rows = report
            .rows
            .as_deref()
            .filter(|r| !r.is_empty())
            .ok_or_else(|| Error::invalid("csv", format!("`{command}` produces no per-sample rows")))?;
        std::fs::write(path, rows_to_csv(rows)?)?;
    }
    match &common.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            bytes.push(b'\n');
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::UnknownCommand(_) => 1,
        e if e.is_budget() => 3,
        _ => 2,
    }
}

/// Parses `args` (program name first), runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 1,
                _ => 2,
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
