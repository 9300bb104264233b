//! Embedding distributions and their noise-contrastive training.
//!
//! A [`BernoulliModel`] holds one logit per node and bit; bit `k` of node `i`
//! is 1 with probability `logistic(θ_ik)`. Link scores are `a · D + b` where
//! `D` is the (random) Hamming distance between two nodes' codes, `a` the
//! learned scale and `b` the learned NCE normalizer. Training replaces `D`
//! by either its mean or a Gaussian with matching moments integrated by
//! quadrature.
//!
//! [`DistEmbModel`] is the real-valued baseline: same scaffold, `D` is the
//! Euclidean distance between unconstrained vectors.

mod adagrad;
mod checkpoint;
pub mod hamming;
pub mod nce;
mod noise;
mod objective;
mod quadrature;
mod train;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use adagrad::AdaGrad;
pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, ObjectiveKind};
pub use hamming::{expected_hamming, hamming_variance};
pub use nce::{nce_pair_loss, negative_term, positive_term, TermKind};
pub use noise::{NoiseDistribution, NoiseKind, NoiseSpec};
pub use objective::{gradients, loss_clt, loss_mean, sample_loss, Sample};
pub use quadrature::QuadratureSpec;
pub use train::{train, train_distemb, ApproximationKind, EpochLoss, TrainConfig, TrainOutcome};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::math::sigmoid;
use hamming::hamming_moments;
use nce::term_derivs;

/// Half-width of the uniform logit initialization; keeps starting
/// probabilities near 1/2.
pub const INIT_HALF_WIDTH: f64 = 0.1;

/// Row-major `N × d` parameter matrix plus the score scale and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingParams {
    num_nodes: usize,
    dim: usize,
    values: Vec<f64>,
    pub scale: f64,
    pub bias: f64,
}

impl EmbeddingParams {
    pub fn new(num_nodes: usize, dim: usize, values: Vec<f64>, scale: f64, bias: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be at least 1".into()));
        }
        if values.len() != num_nodes * dim {
            return Err(Error::DimensionMismatch {
                what: "parameter count",
                expected: num_nodes * dim,
                found: values.len(),
            });
        }
        let params = EmbeddingParams {
            num_nodes,
            dim,
            values,
            scale,
            bias,
        };
        params.check_finite()?;
        Ok(params)
    }

    /// Entries i.i.d. uniform on `[-half_width, half_width]`, `a = -1`, `b = 0`.
    pub fn random(num_nodes: usize, dim: usize, half_width: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..num_nodes * dim)
            .map(|_| rng.random_range(-half_width..=half_width))
            .collect();
        Self::new(num_nodes, dim, values, -1.0, 0.0)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: NodeId) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: NodeId) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn check_node(&self, i: NodeId) -> Result<()> {
        if i < self.num_nodes {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: i,
                num_nodes: self.num_nodes,
            })
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        if !self.scale.is_finite() || !self.bias.is_finite() {
            return Err(Error::NonFinite {
                context: "scale/bias".into(),
            });
        }
        if let Some(k) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("parameter row {} column {}", k / self.dim, k % self.dim),
            });
        }
        Ok(())
    }
}

/// How the random Hamming distance is replaced inside the loss.
#[derive(Debug, Clone, PartialEq)]
pub enum Approximation {
    /// Substitute the expected distance μ.
    Mean,
    /// Integrate over N(μ, σ²) with the given rule.
    Clt(QuadratureSpec),
}

/// Sparse gradient: only rows touched by the batch are present.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    dim: usize,
    rows: BTreeMap<NodeId, Vec<f64>>,
    pub scale: f64,
    pub bias: f64,
}

impl Gradients {
    pub fn new(dim: usize) -> Self {
        Gradients {
            dim,
            rows: BTreeMap::new(),
            scale: 0.0,
            bias: 0.0,
        }
    }

    pub(crate) fn row_mut(&mut self, i: NodeId) -> &mut [f64] {
        let dim = self.dim;
        self.rows.entry(i).or_insert_with(|| vec![0.0; dim])
    }

    /// Gradient for row `i`; `None` means identically zero.
    pub fn row(&self, i: NodeId) -> Option<&[f64]> {
        self.rows.get(&i).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (NodeId, &[f64])> {
        self.rows.iter().map(|(&i, r)| (i, r.as_slice()))
    }

    pub fn is_finite(&self) -> bool {
        self.scale.is_finite() && self.bias.is_finite() && self.rows.values().flatten().all(|v| v.is_finite())
    }

    pub fn add(&mut self, other: &Gradients) {
        for (i, row) in other.rows() {
            for (a, b) in self.row_mut(i).iter_mut().zip(row) {
                *a += b;
            }
        }
        self.scale += other.scale;
        self.bias += other.bias;
    }

    pub fn clear(&mut self) {
        self.rows.clear();
        self.scale = 0.0;
        self.bias = 0.0;
    }
}

/// A model trainable under the NCE scaffold.
pub trait NceModel: Clone {
    fn params(&self) -> &EmbeddingParams;
    fn params_mut(&mut self) -> &mut EmbeddingParams;

    /// Loss of one positive or negative term for the pair `(i, j)`, adding
    /// its gradient into `grads` when given. Bounds are the caller's job.
    fn term(
        &self,
        i: NodeId,
        j: NodeId,
        kind: TermKind,
        ln_noise: f64,
        approx: &Approximation,
        grads: Option<&mut Gradients>,
    ) -> f64;

    fn objective(&self) -> ObjectiveKind;
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliModel {
    params: EmbeddingParams,
}

impl BernoulliModel {
    pub fn new_random(num_nodes: usize, dim: usize, seed: u64) -> Result<Self> {
        Ok(BernoulliModel {
            params: EmbeddingParams::random(num_nodes, dim, INIT_HALF_WIDTH, seed)?,
        })
    }

    pub fn from_logits(num_nodes: usize, dim: usize, logits: Vec<f64>, scale: f64, bias: f64) -> Result<Self> {
        Ok(BernoulliModel {
            params: EmbeddingParams::new(num_nodes, dim, logits, scale, bias)?,
        })
    }

    pub fn from_params(params: EmbeddingParams) -> Self {
        BernoulliModel { params }
    }

    pub fn num_nodes(&self) -> usize {
        self.params.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn scale(&self) -> f64 {
        self.params.scale
    }

    pub fn bias(&self) -> f64 {
        self.params.bias
    }

    pub fn logits(&self) -> &[f64] {
        &self.params.values
    }

    pub fn probability(&self, i: NodeId, k: usize) -> f64 {
        sigmoid(self.params.row(i)[k])
    }

    pub fn probabilities(&self, i: NodeId) -> Vec<f64> {
        self.params.row(i).iter().map(|&t| sigmoid(t)).collect()
    }

    /// Expected Hamming distance between the codes of `i` and `j`.
    pub fn expected_distance(&self, i: NodeId, j: NodeId) -> f64 {
        hamming_moments(&self.probabilities(i), &self.probabilities(j)).0
    }
}

/// Loss and its derivatives with respect to the moments of the distance.
#[derive(Debug, Clone, Copy, Default)]
struct DistanceTerm {
    value: f64,
    d_mean: f64,
    d_var: f64,
    d_scale: f64,
    d_bias: f64,
}

fn distance_term(
    kind: TermKind,
    mean: f64,
    var: f64,
    scale: f64,
    bias: f64,
    ln_noise: f64,
    approx: &Approximation,
) -> DistanceTerm {
    let at_mean = || {
        let t = term_derivs(kind, scale * mean + bias, ln_noise);
        (
            t,
            DistanceTerm {
                value: t.value,
                d_mean: t.d_score * scale,
                d_var: 0.0,
                d_scale: t.d_score * mean,
                d_bias: t.d_score,
            },
        )
    };
    let quad = match approx {
        Approximation::Mean => return at_mean().1,
        Approximation::Clt(q) if q.points() == 1 => return at_mean().1,
        Approximation::Clt(q) => q,
    };
    let sigma = var.max(0.0).sqrt();
    let w = quad.weight();
    if sigma == 0.0 {
        // Degenerate Gaussian: the loss is f(μ) exactly; dL/dσ² keeps its
        // limit value a² f''(μ) E[z²] / 2.
        let (t, mut out) = at_mean();
        let second_moment: f64 = quad.abscissae().iter().map(|z| z * z).sum::<f64>() * w;
        out.d_var = 0.5 * t.d2_score * scale * scale * second_moment;
        return out;
    }
    let mut out = DistanceTerm::default();
    let mut d_sigma = 0.0;
    let mut curvature = 0.0;
    for &z in quad.abscissae() {
        let x = mean + sigma * z;
        let t = term_derivs(kind, scale * x + bias, ln_noise);
        out.value += t.value;
        out.d_scale += t.d_score * x;
        out.d_bias += t.d_score;
        out.d_mean += t.d_score * scale;
        d_sigma += t.d_score * scale * z;
        curvature += t.d2_score * scale * scale * z * z;
    }
    out.value *= w;
    out.d_scale *= w;
    out.d_bias *= w;
    out.d_mean *= w;
    out.d_var = if sigma > 1e-8 {
        d_sigma * w / (2.0 * sigma)
    } else {
        0.5 * curvature * w
    };
    out
}

impl NceModel for BernoulliModel {
    fn params(&self) -> &EmbeddingParams {
        &self.params
    }

    fn params_mut(&mut self) -> &mut EmbeddingParams {
        &mut self.params
    }

    fn objective(&self) -> ObjectiveKind {
        ObjectiveKind::BernoulliHamming
    }

    fn term(
        &self,
        i: NodeId,
        j: NodeId,
        kind: TermKind,
        ln_noise: f64,
        approx: &Approximation,
        grads: Option<&mut Gradients>,
    ) -> f64 {
        let pi = self.probabilities(i);
        let pj = self.probabilities(j);
        let (mean, var) = hamming_moments(&pi, &pj);
        let t = distance_term(kind, mean, var, self.params.scale, self.params.bias, ln_noise, approx);
        if let Some(g) = grads {
            g.scale += t.d_scale;
            g.bias += t.d_bias;
            // m_k = p_ik (1 - p_jk) + (1 - p_ik) p_jk
            // ∂L/∂m_k = ∂L/∂μ + ∂L/∂σ² (1 - 2 m_k); ∂m_k/∂p_ik = 1 - 2 p_jk; ∂p/∂θ = p (1 - p)
            let coef: Vec<f64> = pi
                .iter()
                .zip(&pj)
                .map(|(&a, &b)| t.d_mean + t.d_var * (1.0 - 2.0 * hamming::disagreement(a, b)))
                .collect();
            let gi = g.row_mut(i);
            for k in 0..coef.len() {
                gi[k] += coef[k] * (1.0 - 2.0 * pj[k]) * pi[k] * (1.0 - pi[k]);
            }
            let gj = g.row_mut(j);
            for k in 0..coef.len() {
                gj[k] += coef[k] * (1.0 - 2.0 * pi[k]) * pj[k] * (1.0 - pj[k]);
            }
        }
        t.value
    }
}

/// Real-valued distance embedding scored by Euclidean distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistEmbModel {
    params: EmbeddingParams,
}

impl DistEmbModel {
    pub fn new_random(num_nodes: usize, dim: usize, seed: u64) -> Result<Self> {
        Ok(DistEmbModel {
            params: EmbeddingParams::random(num_nodes, dim, INIT_HALF_WIDTH, seed)?,
        })
    }

    pub fn from_params(params: EmbeddingParams) -> Self {
        DistEmbModel { params }
    }

    pub fn num_nodes(&self) -> usize {
        self.params.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn embedding(&self, i: NodeId) -> &[f64] {
        self.params.row(i)
    }

    pub fn distance(&self, i: NodeId, j: NodeId) -> f64 {
        l2(self.params.row(i), self.params.row(j))
    }
}

fn l2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

impl NceModel for DistEmbModel {
    fn params(&self) -> &EmbeddingParams {
        &self.params
    }

    fn params_mut(&mut self) -> &mut EmbeddingParams {
        &mut self.params
    }

    fn objective(&self) -> ObjectiveKind {
        ObjectiveKind::DistEmbL2
    }

    fn term(
        &self,
        i: NodeId,
        j: NodeId,
        kind: TermKind,
        ln_noise: f64,
        _approx: &Approximation,
        grads: Option<&mut Gradients>,
    ) -> f64 {
        let (ei, ej) = (self.params.row(i), self.params.row(j));
        let dist = l2(ei, ej);
        let (a, b) = (self.params.scale, self.params.bias);
        let t = term_derivs(kind, a * dist + b, ln_noise);
        if let Some(g) = grads {
            g.scale += t.d_score * dist;
            g.bias += t.d_score;
            // Zero distance: take the zero subgradient.
            if dist > 0.0 {
                let coef = t.d_score * a / dist;
                let diff: Vec<f64> = ei.iter().zip(ej).map(|(x, y)| x - y).collect();
                for (gk, dk) in g.row_mut(i).iter_mut().zip(&diff) {
                    *gk += coef * dk;
                }
                for (gk, dk) in g.row_mut(j).iter_mut().zip(&diff) {
                    *gk -= coef * dk;
                }
            } else {
                g.row_mut(i);
                g.row_mut(j);
            }
        }
        t.value
    }
}
