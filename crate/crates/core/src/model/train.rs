use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SplitGraph};
use crate::model::{
    sample_loss, AdaGrad, Approximation, BernoulliModel, DistEmbModel, EmbeddingParams, Gradients, NceModel,
    NoiseDistribution, NoiseSpec, ObjectiveKind, QuadratureSpec, Sample, INIT_HALF_WIDTH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproximationKind {
    Mean,
    Clt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub adagrad_epsilon: f64,
    pub seed: u64,
    pub approximation: ApproximationKind,
    /// Quadrature points for the CLT approximation.
    pub quadrature_points: usize,
    pub objective: ObjectiveKind,
    pub noise: NoiseSpec,
    /// Return the epoch with the lowest held-out loss instead of the last one.
    pub keep_best: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 25,
            epochs: 60,
            learning_rate: 0.5,
            adagrad_epsilon: 1e-8,
            seed: 0,
            approximation: ApproximationKind::Clt,
            quadrature_points: 5,
            objective: ObjectiveKind::BernoulliHamming,
            noise: NoiseSpec::uniform(1),
            keep_best: true,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate must be > 0, got {}", self.learning_rate)));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if self.adagrad_epsilon.is_nan() || self.adagrad_epsilon < 0.0 {
            return Err(Error::InvalidArgument("AdaGrad epsilon must be >= 0".into()));
        }
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Ok(())
    }

    pub fn approximation(&self) -> Result<Approximation> {
        Ok(match self.approximation {
            ApproximationKind::Mean => Approximation::Mean,
            ApproximationKind::Clt => Approximation::Clt(QuadratureSpec::new(self.quadrature_points)?),
        })
    }
}

/// Mean per-edge loss after an epoch (epoch 0 is the initial model).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_loss: f64,
    pub heldout_loss: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<M> {
    pub model: M,
    pub trace: Vec<EpochLoss>,
    /// Epoch whose parameters were returned.
    pub epoch: usize,
}

impl<M> TrainOutcome<M> {
    /// CSV `epoch,train_loss,heldout_loss`; empty held-out column when there
    /// is no test set.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "epoch,train_loss,heldout_loss")?;
        for e in &self.trace {
            match e.heldout_loss {
                Some(h) => writeln!(w, "{},{},{}", e.epoch, e.train_loss, h)?,
                None => writeln!(w, "{},{},", e.epoch, e.train_loss)?,
            }
        }
        Ok(())
    }
}

/// Trains a Bernoulli embedding with SGD + AdaGrad, one positive edge and
/// its negatives per step.
pub fn train(split: &SplitGraph, config: &TrainConfig) -> Result<TrainOutcome<BernoulliModel>> {
    if config.objective != ObjectiveKind::BernoulliHamming {
        return Err(Error::InvalidArgument("train() needs the bernoulli objective".into()));
    }
    let params = EmbeddingParams::random(split.num_nodes(), config.dim, INIT_HALF_WIDTH, config.seed)?;
    run(BernoulliModel::from_params(params), split, config)
}

/// Real-valued ℓ² baseline under the same loop.
pub fn train_distemb(split: &SplitGraph, config: &TrainConfig) -> Result<TrainOutcome<DistEmbModel>> {
    if config.objective != ObjectiveKind::DistEmbL2 {
        return Err(Error::InvalidArgument("train_distemb() needs the distemb_l2 objective".into()));
    }
    let params = EmbeddingParams::random(split.num_nodes(), config.dim, INIT_HALF_WIDTH, config.seed)?;
    run(DistEmbModel::from_params(params), split, config)
}

// Independent ChaCha streams so evaluation draws never perturb training.
const TRAIN_STREAM: u64 = 1;
const EVAL_STREAM: u64 = 2;

fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn with_negatives(pairs: impl Iterator<Item = (NodeId, NodeId)>, noise: &NoiseDistribution, rng: &mut ChaCha8Rng) -> Vec<Sample> {
    pairs
        .map(|(i, j)| {
            let negatives = (0..noise.negatives_per_edge()).map(|_| noise.sample(rng)).collect();
            Sample::new(i, j, negatives)
        })
        .collect()
}

fn mean_loss<M: NceModel>(model: &M, samples: &[Sample], noise: &NoiseDistribution, approx: &Approximation) -> Result<f64> {
    let mut total = 0.0;
    for s in samples {
        total += sample_loss(model, s, noise, approx, None)?;
    }
    Ok(total / samples.len() as f64)
}

fn run<M: NceModel>(mut model: M, split: &SplitGraph, config: &TrainConfig) -> Result<TrainOutcome<M>> {
    config.validate()?;
    if split.train.num_edges() == 0 {
        return Err(Error::InvalidArgument("training graph has no edges".into()));
    }
    let approx = config.approximation()?;
    let noise = NoiseDistribution::new(&config.noise, &split.train)?;

    let mut rng = rng_stream(config.seed, TRAIN_STREAM);
    let mut eval_rng = rng_stream(config.seed, EVAL_STREAM);
    let mut instances: Vec<(NodeId, NodeId)> = split.train.edge_instances().collect();
    let train_eval = with_negatives(instances.iter().copied(), &noise, &mut eval_rng);
    let test_eval = with_negatives(split.test_instances(), &noise, &mut eval_rng);

    let evaluate = |model: &M, epoch: usize| -> Result<EpochLoss> {
        let diverged = |e: Error| Error::Divergence {
            epoch,
            step: 0,
            context: e.to_string(),
        };
        let train_loss = mean_loss(model, &train_eval, &noise, &approx).map_err(diverged)?;
        let heldout_loss = if test_eval.is_empty() {
            None
        } else {
            Some(mean_loss(model, &test_eval, &noise, &approx).map_err(diverged)?)
        };
        Ok(EpochLoss {
            epoch,
            train_loss,
            heldout_loss,
        })
    };

    let mut trace = vec![evaluate(&model, 0)?];
    let mut optimizer = AdaGrad::new(model.params(), config.learning_rate, config.adagrad_epsilon);
    let mut grads = Gradients::new(config.dim);
    let mut best: Option<(f64, usize, M)> = None;

    for epoch in 1..=config.epochs {
        instances.shuffle(&mut rng);
        for (step, &(i, j)) in instances.iter().enumerate() {
            let negatives = (0..noise.negatives_per_edge()).map(|_| noise.sample(&mut rng)).collect();
            let sample = Sample::new(i, j, negatives);
            grads.clear();
            sample_loss(&model, &sample, &noise, &approx, Some(&mut grads)).map_err(|e| Error::Divergence {
                epoch,
                step,
                context: e.to_string(),
            })?;
            if !grads.is_finite() {
                return Err(Error::Divergence {
                    epoch,
                    step,
                    context: format!("non-finite gradient for pair ({i}, {j})"),
                });
            }
            optimizer.step(model.params_mut(), &grads);
        }
        let loss = evaluate(&model, epoch)?;
        log::debug!("epoch {epoch}: train {:.6} heldout {:?}", loss.train_loss, loss.heldout_loss);
        if let Some(h) = loss.heldout_loss {
            if config.keep_best && best.as_ref().is_none_or(|(b, _, _)| h < *b) {
                best = Some((h, epoch, model.clone()));
            }
        }
        trace.push(loss);
    }
    model.params().check_finite()?;

    let (model, epoch) = match best {
        Some((_, epoch, m)) => (m, epoch),
        None => (model, config.epochs),
    };
    Ok(TrainOutcome { model, trace, epoch })
}
