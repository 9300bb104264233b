//! Neighborhood link-prediction features, a logistic-regression predictor
//! over them, and shortlist reranking.

mod features;
mod regression;

use std::io::{BufRead, Write};

pub use features::{score_pair, transforms, FeatureSpec, Kernel, TRANSFORM_NAMES};
pub use regression::{auc, heldout_auc, logistic_loss, train_observable, ObservableConfig};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::math::sigmoid;

/// Logistic link predictor over raw (unstandardized) features.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableModel {
    spec: FeatureSpec,
    weights: Vec<f64>,
    pub seed: u64,
    pub negative_ratio: usize,
    pub epochs: usize,
}

impl ObservableModel {
    pub fn new(spec: FeatureSpec, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != spec.len() {
            return Err(Error::DimensionMismatch {
                what: "observable weights",
                expected: spec.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite {
                context: "observable weights".into(),
            });
        }
        Ok(ObservableModel {
            spec,
            weights,
            seed: 0,
            negative_ratio: 0,
            epochs: 0,
        })
    }

    pub fn zeros(spec: FeatureSpec) -> Self {
        let weights = vec![0.0; spec.len()];
        Self::new(spec, weights).expect("zero weights are valid")
    }

    pub fn spec(&self) -> &FeatureSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Linear score w · x.
    pub fn logit(&self, features: &[f64]) -> f64 {
        self.weights.iter().zip(features).map(|(w, x)| w * x).sum()
    }

    pub fn logit_pair(&self, g: &Graph, x: NodeId, y: NodeId) -> Result<f64> {
        Ok(self.logit(&score_pair(g, &self.spec, x, y)?))
    }

    pub fn probability(&self, g: &Graph, x: NodeId, y: NodeId) -> Result<f64> {
        Ok(sigmoid(self.logit_pair(g, x, y)?))
    }

    /// `feature_name,weight` CSV, preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# seed={} negative_ratio={} epochs={}",
            self.seed, self.negative_ratio, self.epochs
        )?;
        writeln!(w, "feature_name,weight")?;
        for (name, weight) in self.spec.names().iter().zip(&self.weights) {
            writeln!(w, "{name},{weight:?}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut names = Vec::new();
        let mut weights = Vec::new();
        let mut meta = Vec::new();
        let mut saw_header = false;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if let Some(m) = line.strip_prefix('#') {
                meta.extend(m.split_whitespace().filter_map(|kv| kv.split_once('=')).map(|(k, v)| (k.to_owned(), v.to_owned())));
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if !saw_header {
                if line != "feature_name,weight" {
                    return Err(Error::Format(format!("expected `feature_name,weight` header, got {line:?}")));
                }
                saw_header = true;
                continue;
            }
            let (name, weight) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("line {}: expected `name,weight`", idx + 1)))?;
            let weight: f64 = weight
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad weight {weight:?}", idx + 1)))?;
            names.push(name.to_owned());
            weights.push(weight);
        }
        let spec = FeatureSpec::from_names(&names)?;
        let mut model = ObservableModel::new(spec, weights)?;
        for (k, v) in meta {
            let parsed = v.parse().map_err(|_| Error::Format(format!("bad metadata {k}={v}")))?;
            match k.as_str() {
                "seed" => model.seed = parsed as u64,
                "negative_ratio" => model.negative_ratio = parsed,
                "epochs" => model.epochs = parsed,
                _ => {}
            }
        }
        Ok(model)
    }
}

/// Limits for the hash-then-rerank cascade.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RerankBudget {
    /// Codes probed by the hash lookup.
    pub location_budget: usize,
    /// Shortlist length handed to the reranker.
    pub candidate_cap: usize,
}

impl Default for RerankBudget {
    fn default() -> Self {
        RerankBudget {
            location_budget: 10_000,
            candidate_cap: 1_000,
        }
    }
}

impl RerankBudget {
    pub fn new(location_budget: usize, candidate_cap: usize) -> Result<Self> {
        if location_budget == 0 || candidate_cap == 0 {
            return Err(Error::InvalidArgument("rerank budgets must be at least 1".into()));
        }
        Ok(RerankBudget {
            location_budget,
            candidate_cap,
        })
    }
}

/// Reorders the first `candidate_cap` shortlist entries by descending
/// model score; equal scores keep their incoming order. Returns
/// `(node, logit)` pairs.
pub fn rerank(
    g: &Graph,
    query: NodeId,
    shortlist: &[NodeId],
    model: &ObservableModel,
    budget: &RerankBudget,
) -> Result<Vec<(NodeId, f64)>> {
    let kept = &shortlist[..shortlist.len().min(budget.candidate_cap)];
    let mut scored = kept
        .iter()
        .map(|&c| Ok((c, model.logit_pair(g, query, c)?)))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(scored)
}
