use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::model::{Approximation, BernoulliModel, Gradients, NceModel, NoiseDistribution, QuadratureSpec, TermKind};

/// One positive edge and the noise samples drawn for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub source: NodeId,
    pub target: NodeId,
    pub negatives: Vec<NodeId>,
}

impl Sample {
    pub fn new(source: NodeId, target: NodeId, negatives: Vec<NodeId>) -> Self {
        Sample {
            source,
            target,
            negatives,
        }
    }
}

/// Positive term for `(source, target)` plus one negative term per noise
/// sample, optionally accumulating the gradient.
pub fn sample_loss<M: NceModel>(
    model: &M,
    sample: &Sample,
    noise: &NoiseDistribution,
    approx: &Approximation,
    mut grads: Option<&mut Gradients>,
) -> Result<f64> {
    let params = model.params();
    params.check_node(sample.source)?;
    params.check_node(sample.target)?;
    let mut loss = model.term(
        sample.source,
        sample.target,
        TermKind::Positive,
        noise.ln_scaled_prob(sample.target),
        approx,
        grads.as_deref_mut(),
    );
    for &k in &sample.negatives {
        params.check_node(k)?;
        loss += model.term(
            sample.source,
            k,
            TermKind::Negative,
            noise.ln_scaled_prob(k),
            approx,
            grads.as_deref_mut(),
        );
    }
    if !loss.is_finite() {
        return Err(Error::NonFinite {
            context: format!("loss for pair ({}, {})", sample.source, sample.target),
        });
    }
    Ok(loss)
}

/// Loss with the expected Hamming distance substituted for the random one.
pub fn loss_mean(model: &BernoulliModel, edge: (NodeId, NodeId), negative: NodeId, noise: &NoiseDistribution) -> Result<f64> {
    let sample = Sample::new(edge.0, edge.1, vec![negative]);
    sample_loss(model, &sample, noise, &Approximation::Mean, None)
}

/// Loss with the Hamming distance replaced by a moment-matched Gaussian and
/// integrated by the given quadrature rule.
pub fn loss_clt(
    model: &BernoulliModel,
    edge: (NodeId, NodeId),
    negative: NodeId,
    noise: &NoiseDistribution,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let sample = Sample::new(edge.0, edge.1, vec![negative]);
    sample_loss(model, &sample, noise, &Approximation::Clt(quad.clone()), None)
}

/// Summed loss and exact gradient over a batch.
pub fn gradients<M: NceModel>(
    model: &M,
    batch: &[Sample],
    noise: &NoiseDistribution,
    approx: &Approximation,
) -> Result<(f64, Gradients)> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let mut total_grads = Gradients::new(model.params().dim());
    let mut scratch = Gradients::new(model.params().dim());
    let mut total = 0.0;
    for sample in batch {
        scratch.clear();
        total += sample_loss(model, sample, noise, approx, Some(&mut scratch))?;
        if !scratch.is_finite() {
            return Err(Error::NonFinite {
                context: format!("gradient for pair ({}, {})", sample.source, sample.target),
            });
        }
        total_grads.add(&scratch);
    }
    Ok((total, total_grads))
}
