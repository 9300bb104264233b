use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Uniform,
    /// Probability proportional to `degree^power`.
    UnigramPower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub power: f64,
    pub negatives_per_edge: usize,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            kind: NoiseKind::Uniform,
            power: 0.75,
            negatives_per_edge: 1,
        }
    }
}

impl NoiseSpec {
    pub fn uniform(negatives_per_edge: usize) -> Self {
        NoiseSpec {
            kind: NoiseKind::Uniform,
            power: 0.0,
            negatives_per_edge,
        }
    }

    pub fn unigram(power: f64, negatives_per_edge: usize) -> Self {
        NoiseSpec {
            kind: NoiseKind::UnigramPower,
            power,
            negatives_per_edge,
        }
    }
}

/// The noise distribution `p_K(·|i)` materialized for one graph. Neither
/// variant depends on the source node.
///
/// Samples may coincide with the source or the true target; they are not
/// rejected, since rejection would change `p_K`.
#[derive(Debug, Clone)]
pub struct NoiseDistribution {
    num_nodes: usize,
    negatives: usize,
    probs: Option<Vec<f64>>,
    sampler: Option<WeightedIndex<f64>>,
}

impl NoiseDistribution {
    pub fn new(spec: &NoiseSpec, graph: &Graph) -> Result<Self> {
        let n = graph.num_nodes();
        if n < 2 {
            return Err(Error::InvalidArgument("noise sampling needs at least two nodes".into()));
        }
        if spec.negatives_per_edge == 0 {
            return Err(Error::InvalidArgument("negatives per edge must be at least 1".into()));
        }
        match spec.kind {
            NoiseKind::Uniform => Ok(NoiseDistribution {
                num_nodes: n,
                negatives: spec.negatives_per_edge,
                probs: None,
                sampler: None,
            }),
            NoiseKind::UnigramPower => {
                if !(spec.power >= 0.0 && spec.power.is_finite()) {
                    return Err(Error::InvalidArgument(format!("unigram power must be >= 0, got {}", spec.power)));
                }
                let weights: Vec<f64> = (0..n).map(|x| (graph.degree(x) as f64).powf(spec.power)).collect();
                let total: f64 = weights.iter().sum();
                if total <= 0.0 || !total.is_finite() {
                    return Err(Error::InvalidArgument("unigram noise needs at least one edge".into()));
                }
                let sampler = WeightedIndex::new(&weights)
                    .map_err(|e| Error::InvalidArgument(format!("unigram noise weights: {e}")))?;
                let probs = weights.iter().map(|w| w / total).collect();
                Ok(NoiseDistribution {
                    num_nodes: n,
                    negatives: spec.negatives_per_edge,
                    probs: Some(probs),
                    sampler: Some(sampler),
                })
            }
        }
    }

    pub fn negatives_per_edge(&self) -> usize {
        self.negatives
    }

    pub fn prob(&self, node: NodeId) -> f64 {
        match &self.probs {
            Some(p) => p[node],
            None => 1.0 / self.num_nodes as f64,
        }
    }

    /// `ln(k · p_K(node))`, the noise log-mass seen by the loss when `k`
    /// negatives are drawn per positive. `-inf` for nodes with zero mass.
    pub fn ln_scaled_prob(&self, node: NodeId) -> f64 {
        (self.negatives as f64 * self.prob(node)).ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        match &self.sampler {
            Some(s) => s.sample(rng),
            None => rng.random_range(0..self.num_nodes),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Directedness;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn star(n: usize) -> Graph {
        Graph::from_edges(n, Directedness::Undirected, (1..n).map(|i| (0, i))).unwrap().0
    }

    fn frequencies(noise: &NoiseDistribution, n: usize, draws: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            counts[noise.sample(&mut rng)] += 1;
        }
        counts.iter().map(|&c| c as f64 / draws as f64).collect()
    }

    fn within_binomial_3sigma(freq: &[f64], expected: &[f64], draws: usize) {
        for (f, p) in freq.iter().zip(expected) {
            let sigma = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((f - p).abs() <= 3.0 * sigma, "freq {f} vs {p}");
        }
    }

    #[test]
    fn uniform_frequencies() {
        let g = star(4);
        let noise = NoiseDistribution::new(&NoiseSpec::uniform(1), &g).unwrap();
        let draws = 100_000;
        within_binomial_3sigma(&frequencies(&noise, 4, draws, 1), &[0.25; 4], draws);
        assert_eq!(noise.prob(2), 0.25);
    }

    #[test]
    fn power_zero_is_uniform() {
        let g = star(6);
        let noise = NoiseDistribution::new(&NoiseSpec::unigram(0.0, 1), &g).unwrap();
        for x in 0..6 {
            assert!((noise.prob(x) - 1.0 / 6.0).abs() < 1e-15);
        }
        let draws = 100_000;
        within_binomial_3sigma(&frequencies(&noise, 6, draws, 2), &[1.0 / 6.0; 6], draws);
    }

    #[test]
    fn star_center_gets_half_the_mass() {
        let n = 9;
        let g = star(n);
        let noise = NoiseDistribution::new(&NoiseSpec::unigram(1.0, 1), &g).unwrap();
        // Degrees: center n-1, leaves 1 each; total 2(n-1).
        assert!((noise.prob(0) - 0.5).abs() < 1e-15);
        let total: f64 = (0..n).map(|x| noise.prob(x)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let draws = 100_000;
        let mut expected = vec![0.5 / (n - 1) as f64; n];
        expected[0] = 0.5;
        within_binomial_3sigma(&frequencies(&noise, n, draws, 3), &expected, draws);
    }

    #[test]
    fn scaled_log_mass() {
        let g = star(4);
        let noise = NoiseDistribution::new(&NoiseSpec::uniform(3), &g).unwrap();
        assert!((noise.ln_scaled_prob(1) - (0.75f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let g = star(4);
        assert!(NoiseDistribution::new(&NoiseSpec::uniform(0), &g).is_err());
        assert!(NoiseDistribution::new(&NoiseSpec::unigram(-1.0, 1), &g).is_err());
        let single = Graph::from_edges(1, Directedness::Undirected, []).unwrap().0;
        assert!(NoiseDistribution::new(&NoiseSpec::uniform(1), &single).is_err());
        let empty = Graph::from_edges(3, Directedness::Undirected, []).unwrap().0;
        assert!(NoiseDistribution::new(&NoiseSpec::unigram(1.0, 1), &empty).is_err());
    }
}
