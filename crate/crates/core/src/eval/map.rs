use std::collections::HashSet;
use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SplitGraph};

/// AP of a ranking: mean over relevant items of the precision at their
/// rank, with unretrieved relevant items contributing 0. `None` when
/// nothing is relevant.
pub fn average_precision(ranking: &[NodeId], relevant: &HashSet<NodeId>) -> Option<f64> {
    if relevant.is_empty() {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (r, node) in ranking.iter().enumerate() {
        if relevant.contains(node) {
            hits += 1;
            sum += hits as f64 / (r + 1) as f64;
        }
    }
    Some(sum / relevant.len() as f64)
}

/// Per-node relevant sets: the other endpoints of each node's test edges,
/// in either direction.
pub fn test_relevance(split: &SplitGraph) -> Vec<HashSet<NodeId>> {
    let mut rel = vec![HashSet::new(); split.num_nodes()];
    for &(a, b) in &split.test_edges {
        if a != b {
            rel[a].insert(b);
            rel[b].insert(a);
        }
    }
    rel
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub num_queries: usize,
    pub seed: u64,
    /// Ranking positions scored per query.
    pub depth: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            num_queries: 1000,
            seed: 0,
            depth: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub cutoff: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapReport {
    pub map: f64,
    /// `(query, AP)` in evaluation order.
    pub per_query: Vec<(NodeId, f64)>,
    /// Nodes never queried because they have no test edge.
    pub skipped: usize,
    /// Precision and recall at each cutoff, averaged over queries.
    pub curve: Vec<PrPoint>,
}

impl MapReport {
    pub fn num_queries(&self) -> usize {
        self.per_query.len()
    }
}

/// The queries [`map_eval`] will issue, in order.
pub fn eval_queries(split: &SplitGraph, config: &EvalConfig) -> Result<Vec<NodeId>> {
    sample_queries(&test_relevance(split), config)
}

fn sample_queries(relevance: &[HashSet<NodeId>], config: &EvalConfig) -> Result<Vec<NodeId>> {
    if config.num_queries == 0 || config.depth == 0 {
        return Err(Error::InvalidArgument("num_queries and depth must be at least 1".into()));
    }
    let eligible: Vec<NodeId> = (0..relevance.len()).filter(|&i| !relevance[i].is_empty()).collect();
    if eligible.is_empty() {
        return Err(Error::NoEligibleQueries);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let count = config.num_queries.min(eligible.len());
    Ok(sample(&mut rng, eligible.len(), count).into_iter().map(|k| eligible[k]).collect())
}

/// Test-set MAP of `retriever`, which is called as `retriever(query, depth)`
/// and returns a ranking best-first.
///
/// Queries are drawn without replacement from the nodes that have at least
/// one test edge (all of them when fewer than `num_queries` exist). The query
/// node is dropped from its own ranking; training neighbors stay in and are
/// non-relevant.
pub fn map_eval<F>(mut retriever: F, split: &SplitGraph, config: &EvalConfig) -> Result<MapReport>
where
    F: FnMut(NodeId, usize) -> Result<Vec<NodeId>>,
{
    let relevance = test_relevance(split);
    let queries = sample_queries(&relevance, config)?;
    let count = queries.len();
    let eligible = relevance.iter().filter(|r| !r.is_empty()).count();

    let depth = config.depth;
    let mut per_query = Vec::with_capacity(count);
    let mut precision = vec![0.0; depth];
    let mut recall = vec![0.0; depth];
    for &q in &queries {
        let mut ranking = retriever(q, depth)?;
        ranking.retain(|&v| v != q);
        ranking.truncate(depth);
        let rel = &relevance[q];
        let ap = average_precision(&ranking, rel).expect("eligible queries have relevant items");
        per_query.push((q, ap));
        let mut hits = 0usize;
        for k in 0..depth {
            if ranking.get(k).is_some_and(|v| rel.contains(v)) {
                hits += 1;
            }
            precision[k] += hits as f64 / (k + 1) as f64;
            recall[k] += hits as f64 / rel.len() as f64;
        }
    }
    let n = count as f64;
    let map = per_query.iter().map(|p| p.1).sum::<f64>() / n;
    let curve = (0..depth)
        .map(|k| PrPoint {
            cutoff: k + 1,
            precision: precision[k] / n,
            recall: recall[k] / n,
        })
        .collect();
    Ok(MapReport {
        map,
        per_query,
        skipped: split.num_nodes() - eligible,
        curve,
    })
}

/// One row of the MAP table.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRow {
    pub method: String,
    pub dim: usize,
    pub num_queries: usize,
    pub map: f64,
}

pub fn write_map_tsv<W: Write>(mut w: W, rows: &[MapRow]) -> Result<()> {
    writeln!(w, "method\tdim\tnum_queries\tmap")?;
    for r in rows {
        writeln!(w, "{}\t{}\t{}\t{:.6}", r.method, r.dim, r.num_queries, r.map)?;
    }
    w.flush()?;
    Ok(())
}

/// Macro-averaged precision/recall by cutoff.
pub fn write_pr_tsv<W: Write>(mut w: W, curve: &[PrPoint]) -> Result<()> {
    writeln!(w, "cutoff\tprecision\trecall")?;
    for p in curve {
        writeln!(w, "{}\t{:.6}\t{:.6}", p.cutoff, p.precision, p.recall)?;
    }
    w.flush()?;
    Ok(())
}
