use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, SplitGraph};
use crate::math::{sigmoid, softplus};
use crate::observables::{score_pair, FeatureSpec, ObservableModel};

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableConfig {
    /// Sampled non-edges per training edge.
    pub negative_ratio: usize,
    /// Full-batch gradient steps.
    pub epochs: usize,
    /// Multiplier on the step `4 / ncols`. With standardized columns the
    /// loss curvature never exceeds `ncols / 4`, so values up to 1 are stable.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for ObservableConfig {
    fn default() -> Self {
        ObservableConfig {
            negative_ratio: 5,
            epochs: 1000,
            learning_rate: 1.0,
            seed: 0,
        }
    }
}

/// Mean log loss of a logistic model over a row-major design matrix with
/// `ncols` columns, and its gradient with respect to `w`.
pub fn logistic_loss(x: &[f64], ncols: usize, y: &[f64], w: &[f64]) -> (f64, Vec<f64>) {
    let n = y.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; ncols];
    for (row, &label) in x.chunks_exact(ncols).zip(y) {
        let z: f64 = row.iter().zip(w).map(|(a, b)| a * b).sum();
        // -[y ln σ(z) + (1-y) ln(1-σ(z))]
        loss += label * softplus(-z) + (1.0 - label) * softplus(z);
        let r = sigmoid(z) - label;
        for (g, &a) in grad.iter_mut().zip(row) {
            *g += r * a;
        }
    }
    grad.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

/// Plain full-batch gradient descent from zero weights.
pub fn fit_logistic(x: &[f64], ncols: usize, y: &[f64], epochs: usize, learning_rate: f64) -> Vec<f64> {
    let mut w = vec![0.0; ncols];
    for _ in 0..epochs {
        let (_, grad) = logistic_loss(x, ncols, y, &w);
        for (wi, gi) in w.iter_mut().zip(&grad) {
            *wi -= learning_rate * gi;
        }
    }
    w
}

/// Uniform node pairs `x != y` that are not adjacent in `g` and not
/// rejected by `also_skip`.
fn sample_non_edges(
    g: &Graph,
    count: usize,
    rng: &mut ChaCha8Rng,
    also_skip: impl Fn(NodeId, NodeId) -> bool,
) -> Result<Vec<(NodeId, NodeId)>> {
    let n = g.num_nodes();
    let mut out = Vec::with_capacity(count);
    let max_tries = count.saturating_mul(1000).max(10_000);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > max_tries || n < 2 {
            return Err(Error::InvalidArgument("graph is too dense to sample non-edges".into()));
        }
        let x = rng.random_range(0..n);
        let y = rng.random_range(0..n);
        if x != y && !g.is_adjacent(x, y) && !also_skip(x, y) {
            out.push((x, y));
        }
    }
    Ok(out)
}

/// Fits the link predictor on the training graph: training edges are
/// positives, `negative_ratio` uniform non-edges per edge are negatives.
///
/// Columns are standardized before fitting and the scaling is folded back
/// into the stored weights. Constant columns are dropped (weight 0).
pub fn train_observable(split: &SplitGraph, spec: &FeatureSpec, config: &ObservableConfig) -> Result<ObservableModel> {
    let g = &split.train;
    if g.num_edges() == 0 {
        return Err(Error::InvalidArgument("training graph has no edges".into()));
    }
    if config.negative_ratio == 0 {
        return Err(Error::InvalidArgument("negative ratio must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let negatives = sample_non_edges(g, g.num_edges() * config.negative_ratio, &mut rng, |_, _| false)?;
    let nfeat = spec.len() - 1;
    let mut raw = Vec::with_capacity((g.num_edges() + negatives.len()) * nfeat);
    let mut labels = Vec::with_capacity(g.num_edges() + negatives.len());
    for (pairs, label) in [(g.edges(), 1.0), (&negatives[..], 0.0)] {
        for &(x, y) in pairs {
            let f = score_pair(g, spec, x, y)?;
            raw.extend_from_slice(&f[..nfeat]);
            labels.push(label);
        }
    }
    let rows = labels.len();
    let names = spec.names();
    let mut kept = Vec::new();
    let mut means = Vec::new();
    let mut sds = Vec::new();
    for c in 0..nfeat {
        let col = || raw.iter().skip(c).step_by(nfeat);
        let first = raw[c];
        if col().all(|&v| v == first) {
            log::warn!("feature {} is constant ({first}) on the training pairs; dropped", names[c]);
            continue;
        }
        let mean = col().sum::<f64>() / rows as f64;
        let var = col().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows as f64;
        kept.push(c);
        means.push(mean);
        sds.push(var.sqrt());
    }
    let ncols = kept.len() + 1;
    let mut design = Vec::with_capacity(rows * ncols);
    for row in raw.chunks_exact(nfeat) {
        for (t, &c) in kept.iter().enumerate() {
            design.push((row[c] - means[t]) / sds[t]);
        }
        design.push(1.0);
    }
    let step = config.learning_rate * 4.0 / ncols as f64;
    let w = fit_logistic(&design, ncols, &labels, config.epochs, step);
    let mut weights = vec![0.0; spec.len()];
    let mut intercept = w[ncols - 1];
    for (t, &c) in kept.iter().enumerate() {
        weights[c] = w[t] / sds[t];
        intercept -= w[t] * means[t] / sds[t];
    }
    weights[nfeat] = intercept;
    let (final_loss, _) = logistic_loss(&design, ncols, &labels, &w);
    log::info!("observable model: {rows} pairs, {} features kept, log loss {final_loss:.4}", kept.len());
    let mut model = ObservableModel::new(spec.clone(), weights)?;
    model.seed = config.seed;
    model.negative_ratio = config.negative_ratio;
    model.epochs = config.epochs;
    Ok(model)
}

/// Area under the ROC curve; tied scores count one half.
pub fn auc(positives: &[f64], negatives: &[f64]) -> Option<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return None;
    }
    let mut all: Vec<(f64, bool)> = positives.iter().map(|&s| (s, true)).chain(negatives.iter().map(|&s| (s, false))).collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // 1-based mid-rank of the tie group
        let mid = (i + j + 1) as f64 / 2.0;
        rank_sum += mid * all[i..j].iter().filter(|p| p.1).count() as f64;
        i = j;
    }
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    Some((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

/// AUC of the model on held-out edges against `num_negatives` uniform pairs
/// that are edges in neither the training nor the test set. Features are
/// computed on the training graph.
pub fn heldout_auc(model: &ObservableModel, split: &SplitGraph, num_negatives: usize, seed: u64) -> Result<f64> {
    let g = &split.train;
    let full = split.full_graph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let negatives = sample_non_edges(g, num_negatives, &mut rng, |x, y| full.is_adjacent(x, y))?;
    let pos = split
        .test_edges
        .iter()
        .map(|&(x, y)| model.logit_pair(g, x, y))
        .collect::<Result<Vec<_>>>()?;
    let neg = negatives
        .iter()
        .map(|&(x, y)| model.logit_pair(g, x, y))
        .collect::<Result<Vec<_>>>()?;
    auc(&pos, &neg).ok_or(Error::NoEligibleQueries)
}
