use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use graphhash::graph::{load_edge_list, split};
use graphhash::SplitGraph;

use crate::cmd::directedness;
use crate::output::write_atomic;
use crate::settings::Settings;

#[derive(Args)]
pub struct SplitArgs {
    /// Edge list, one `src<TAB>dst` per line
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output stem: writes <stem>.train.tsv, <stem>.test.tsv, <stem>.vocab
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fraction of edges held out [default: 0.05]
    #[arg(long)]
    fraction: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Treat edges as directed
    #[arg(long)]
    directed: bool,
}

pub fn run(args: SplitArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("split", config)?;
    let input = s.path("input", args.input)?;
    let output = s.path("output", args.output)?;
    let fraction = s.value("fraction", args.fraction, 0.05)?;
    let seed = s.value("seed", args.seed, 0)?;
    let directed = s.switch("directed", args.directed)?;
    s.check_consumed()?;

    let loaded = load_edge_list(&input, directedness(directed)).with_context(|| format!("loading {}", input.display()))?;
    let parts = split(&loaded.graph, fraction, seed)?;
    let paths = SplitGraph::paths(&output);
    write_atomic(&paths.train, |w| parts.write_train(w, &loaded.vocab))?;
    write_atomic(&paths.test, |w| parts.write_test(w, &loaded.vocab))?;
    write_atomic(&paths.vocab, |w| loaded.vocab.write_to(w))?;
    s.finish(&output)?;
    println!(
        "nodes={} train_edges={} test_edges={}",
        parts.num_nodes(),
        parts.train.num_edges(),
        parts.test_edges.len()
    );
    Ok(())
}
