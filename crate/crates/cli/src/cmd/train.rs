use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use graphhash::model::{train, train_distemb, write_checkpoint, ApproximationKind, NoiseSpec, ObjectiveKind, TrainConfig};

use crate::cmd::{choice, load_split, same_size};
use crate::output::write_atomic;
use crate::settings::{sibling, Settings};

choice!(Approx { Mean => "mean", Clt => "clt" });
choice!(Noise { Uniform => "uniform", Unigram => "unigram" });
choice!(Objective { Bernoulli => "bernoulli", DistEmb => "distemb_l2" });

#[derive(Args)]
pub struct TrainArgs {
    /// Split stem written by `split`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model checkpoint to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Per-epoch loss CSV [default: <output>.trace.csv]
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Embedding dimension [default: 25]
    #[arg(long)]
    dim: Option<usize>,
    /// [default: 60]
    #[arg(long)]
    epochs: Option<usize>,
    /// AdaGrad step size [default: 0.5]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// AdaGrad denominator offset [default: 1e-8]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Noise samples per edge [default: 1]
    #[arg(long)]
    negatives: Option<usize>,
    /// mean | clt [default: clt]
    #[arg(long)]
    approx: Option<Approx>,
    /// Quadrature points for clt [default: 5]
    #[arg(long)]
    quad: Option<usize>,
    /// uniform | unigram [default: uniform]
    #[arg(long)]
    noise: Option<Noise>,
    /// Degree exponent of the unigram noise [default: 0.75]
    #[arg(long)]
    alpha: Option<f64>,
    /// bernoulli | distemb_l2 [default: bernoulli]
    #[arg(long)]
    objective: Option<Objective>,
    /// Return the epoch with the lowest held-out loss [default: true]
    #[arg(long)]
    keep_best: Option<bool>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    directed: bool,
}

pub fn run(args: TrainArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("train", config)?;
    let input = s.path("input", args.input)?;
    let output = s.path("output", args.output)?;
    let trace = s.path_or("trace", args.trace, sibling(&output, ".trace.csv"))?;
    let dim = s.value("dim", args.dim, 25)?;
    let epochs = s.value("epochs", args.epochs, 60)?;
    let learning_rate = s.value("learning-rate", args.learning_rate, 0.5)?;
    let epsilon = s.value("epsilon", args.epsilon, 1e-8)?;
    let negatives = s.value("negatives", args.negatives, 1)?;
    let approx = s.value("approx", args.approx, Approx::Clt)?;
    let quad = s.value("quad", args.quad, 5)?;
    let noise = s.value("noise", args.noise, Noise::Uniform)?;
    let alpha = s.value("alpha", args.alpha, 0.75)?;
    let objective = s.value("objective", args.objective, Objective::Bernoulli)?;
    let keep_best = s.value("keep-best", args.keep_best, true)?;
    let seed = s.value("seed", args.seed, 0)?;
    let directed = s.switch("directed", args.directed)?;
    s.check_consumed()?;

    let (split, vocab) = load_split(&input, directed)?;
    same_size("vocabulary vs graph nodes", split.num_nodes(), vocab.len())?;
    let config = TrainConfig {
        dim,
        epochs,
        learning_rate,
        adagrad_epsilon: epsilon,
        seed,
        approximation: match approx {
            Approx::Mean => ApproximationKind::Mean,
            Approx::Clt => ApproximationKind::Clt,
        },
        quadrature_points: quad,
        objective: match objective {
            Objective::Bernoulli => ObjectiveKind::BernoulliHamming,
            Objective::DistEmb => ObjectiveKind::DistEmbL2,
        },
        noise: match noise {
            Noise::Uniform => NoiseSpec::uniform(negatives),
            Noise::Unigram => NoiseSpec::unigram(alpha, negatives),
        },
        keep_best,
    };
    let epoch = match objective {
        Objective::Bernoulli => {
            let out = train(&split, &config)?;
            write_atomic(&output, |w| write_checkpoint(w, &out.model))?;
            write_atomic(&trace, |w| out.write_trace_csv(w))?;
            out.epoch
        }
        Objective::DistEmb => {
            let out = train_distemb(&split, &config)?;
            write_atomic(&output, |w| write_checkpoint(w, &out.model))?;
            write_atomic(&trace, |w| out.write_trace_csv(w))?;
            out.epoch
        }
    };
    s.finish(&output)?;
    println!("epoch={epoch}");
    Ok(())
}
