use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use graphhash::observables::{heldout_auc, train_observable, FeatureSpec, Kernel, ObservableConfig};

use crate::cmd::{load_split, same_size};
use crate::output::write_atomic;
use crate::settings::{List, Settings};

#[derive(Args)]
pub struct RerankTrainArgs {
    /// Split stem written by `split`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Weights CSV to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Sampled non-edges per training edge [default: 5]
    #[arg(long)]
    negative_ratio: Option<usize>,
    /// Gradient steps [default: 1000]
    #[arg(long)]
    epochs: Option<usize>,
    /// Step multiplier [default: 1.0]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated degree kernels [default: count,raw,aa,pow_half,pow_three]
    #[arg(long)]
    kernels: Option<List<Kernel>>,
    #[arg(long)]
    directed: bool,
}

pub fn run(args: RerankTrainArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("rerank-train", config)?;
    let input = s.path("input", args.input)?;
    let output = s.path("output", args.output)?;
    let negative_ratio = s.value("negative-ratio", args.negative_ratio, 5)?;
    let epochs = s.value("epochs", args.epochs, 1000)?;
    let learning_rate = s.value("learning-rate", args.learning_rate, 1.0)?;
    let seed = s.value("seed", args.seed, 0)?;
    let kernels = s.value("kernels", args.kernels, List(Kernel::ALL.to_vec()))?;
    let directed = s.switch("directed", args.directed)?;
    s.check_consumed()?;

    let (split, vocab) = load_split(&input, directed)?;
    same_size("vocabulary vs graph nodes", split.num_nodes(), vocab.len())?;
    let spec = FeatureSpec::new(kernels.0)?;
    let config = ObservableConfig {
        negative_ratio,
        epochs,
        learning_rate,
        seed,
    };
    let model = train_observable(&split, &spec, &config)?;
    write_atomic(&output, |w| model.write_csv(w))?;
    s.finish(&output)?;
    if !split.test_edges.is_empty() {
        let negatives = split.test_edges.len() * negative_ratio.max(1);
        match heldout_auc(&model, &split, negatives, seed.wrapping_add(1)) {
            Ok(auc) => println!("heldout_auc={auc:.4}"),
            Err(e) => log::warn!("held-out AUC unavailable: {e}"),
        }
    }
    Ok(())
}
