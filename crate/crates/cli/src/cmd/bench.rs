use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use graphhash::eval::{bench_retrieval, write_bench_tsv, BenchConfig, BenchMethod, BenchOutcome};

use crate::output::write_atomic;
use crate::settings::{List, Settings};

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated methods [default: hash,binaryBruteForce,realBruteForce]
    #[arg(long)]
    methods: Option<List<BenchMethod>>,
    /// Comma-separated collection sizes [default: 100000,1000000]
    #[arg(long)]
    nodes: Option<List<usize>>,
    /// Comma-separated code widths [default: 32]
    #[arg(long)]
    dims: Option<List<usize>>,
    /// Timed queries per configuration [default: 50]
    #[arg(long)]
    runs: Option<usize>,
    /// [default: 5]
    #[arg(long)]
    warmup: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// [default: 10]
    #[arg(long)]
    top_k: Option<usize>,
    /// Codes probed per hash query [default: 10000]
    #[arg(long)]
    locations: Option<usize>,
    /// Configurations needing more memory report OOM [default: 2048]
    #[arg(long)]
    memory_limit_mb: Option<usize>,
    /// Results TSV
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(args: BenchArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("bench", config)?;
    let all = List(vec![BenchMethod::Hash, BenchMethod::BinaryBruteForce, BenchMethod::RealBruteForce]);
    let methods = s.value("methods", args.methods, all)?;
    let nodes = s.value("nodes", args.nodes, List(vec![100_000, 1_000_000]))?;
    let dims = s.value("dims", args.dims, List(vec![32]))?;
    let runs = s.value("runs", args.runs, 50)?;
    let warmup = s.value("warmup", args.warmup, 5)?;
    let seed = s.value("seed", args.seed, 0)?;
    let top_k = s.value("top-k", args.top_k, 10)?;
    let locations = s.value("locations", args.locations, 10_000)?;
    let memory_limit_mb = s.value("memory-limit-mb", args.memory_limit_mb, 2048)?;
    let output = s.path("output", args.output)?;
    s.check_consumed()?;

    let config = BenchConfig {
        runs,
        warmup,
        seed,
        top_k,
        location_budget: locations,
        memory_limit: memory_limit_mb.saturating_mul(1 << 20),
    };
    let mut reports = Vec::new();
    for &n in &nodes.0 {
        for &d in &dims.0 {
            for r in bench_retrieval(&methods.0, n, d, &config)? {
                match &r.outcome {
                    BenchOutcome::Measured { mean_ms, .. } => {
                        eprintln!("{} N={} d={}: {mean_ms:.4} ms", r.method, n, d)
                    }
                    BenchOutcome::OutOfMemory => eprintln!("{} N={} d={}: OOM", r.method, n, d),
                    BenchOutcome::Unsupported(why) => eprintln!("{} N={} d={}: skipped ({why})", r.method, n, d),
                }
                reports.push(r);
            }
        }
    }
    write_atomic(&output, |w| write_bench_tsv(w, &reports))?;
    s.finish(&output)?;
    Ok(())
}
