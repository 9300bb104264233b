use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use graphhash::graph::write_edge_list;
use graphhash::synthetic::planted_partition;
use graphhash::Vocabulary;

use crate::output::write_atomic;
use crate::settings::Settings;

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    /// [default: 200]
    #[arg(long)]
    nodes: Option<usize>,
    /// [default: 4]
    #[arg(long)]
    blocks: Option<usize>,
    /// Within-block edge probability [default: 0.2]
    #[arg(long)]
    p_in: Option<f64>,
    /// Across-block edge probability [default: 0.01]
    #[arg(long)]
    p_out: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(args: SynthArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("synth", config)?;
    let output = s.path("output", args.output)?;
    let nodes = s.value("nodes", args.nodes, 200)?;
    let blocks = s.value("blocks", args.blocks, 4)?;
    let p_in = s.value("p-in", args.p_in, 0.2)?;
    let p_out = s.value("p-out", args.p_out, 0.01)?;
    let seed = s.value("seed", args.seed, 0)?;
    s.check_consumed()?;

    let g = planted_partition(nodes, blocks, p_in, p_out, seed)?;
    let vocab = Vocabulary::numeric(nodes);
    let header = format!("planted partition n={nodes} blocks={blocks} p_in={p_in} p_out={p_out} seed={seed}");
    write_atomic(&output, |w| write_edge_list(w, g.edges(), &vocab, Some(&header)))?;
    s.finish(&output)?;
    println!("nodes={nodes} edges={}", g.num_edges());
    Ok(())
}
