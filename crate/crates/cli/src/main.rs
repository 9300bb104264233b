use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd;
mod output;
mod settings;

/// Bad flags or settings; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "graphhash", version, about = "Binary graph embeddings and Hamming-space link retrieval")]
struct Cli {
    /// key=value settings file (a manifest from an earlier run works);
    /// flags take precedence over it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hold out a random fraction of edges as a test set
    Split(cmd::split::SplitArgs),
    /// Fit node embeddings on a split's training edges
    Train(cmd::train::TrainArgs),
    /// Round a model to binary codes (LSH for real-valued models)
    ExportCodes(cmd::codes::ExportArgs),
    /// Build a hash index over binary codes
    Index(cmd::codes::IndexArgs),
    /// Rank nodes near a query node
    Query(cmd::codes::QueryArgs),
    /// Fit the neighborhood-feature link predictor used for reranking
    RerankTrain(cmd::rerank::RerankTrainArgs),
    /// Test-set MAP of a retrieval method
    Eval(cmd::eval::EvalArgs),
    /// Query latency on synthetic data
    Bench(cmd::bench::BenchArgs),
    /// Write a planted-partition edge list
    Synth(cmd::synth::SynthArgs),
}

fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    if err.downcast_ref::<UsageError>().is_some() {
        return (2, "usage");
    }
    match err.downcast_ref::<graphhash::Error>() {
        Some(graphhash::Error::InvalidArgument(_)) => (2, "usage"),
        Some(e) if e.is_numeric() => (4, "numeric"),
        _ => (3, "data"),
    }
}

fn threads() -> Result<usize, UsageError> {
    match std::env::var("GRAPHHASH_THREADS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(UsageError(format!("GRAPHHASH_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

fn report(category: &str, message: &str) {
    let one_line: String = message.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("graphhash: error: {category}: {one_line}");
}

fn fail(category: &str, message: &str, code: u8) -> ExitCode {
    report(category, message);
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match threads() {
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return fail("usage", &e.to_string(), 2);
            }
        }
        Err(e) => return fail("usage", &e.0, 2),
    }
    ExitCode::from(run(std::env::args_os()))
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status.
fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            report("usage", first);
            return 2;
        }
    };
    let config = cli.config.as_deref();
    let result = match cli.command {
        Command::Split(a) => cmd::split::run(a, config),
        Command::Train(a) => cmd::train::run(a, config),
        Command::ExportCodes(a) => cmd::codes::export(a, config),
        Command::Index(a) => cmd::codes::index(a, config),
        Command::Query(a) => cmd::codes::query(a, config),
        Command::RerankTrain(a) => cmd::rerank::run(a, config),
        Command::Eval(a) => cmd::eval::run(a, config),
        Command::Bench(a) => cmd::bench::run(a, config),
        Command::Synth(a) => cmd::synth::run(a, config),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let (code, category) = classify(&e);
            report(category, &format!("{e:#}"));
            code
        }
    }
}
