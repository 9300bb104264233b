//! Seeded random graphs for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Directedness, Graph, NodeId};

/// Block of node `i` when `n` nodes are cut into `blocks` contiguous runs.
pub fn block_of(i: NodeId, n: usize, blocks: usize) -> usize {
    i * blocks / n
}

/// Undirected planted-partition graph: each pair is joined with probability
/// `p_in` inside a block and `p_out` across blocks.
pub fn planted_partition(n: usize, blocks: usize, p_in: f64, p_out: f64, seed: u64) -> Result<Graph> {
    if blocks == 0 || blocks > n {
        return Err(Error::InvalidArgument(format!("cannot cut {n} nodes into {blocks} blocks")));
    }
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block_of(i, n, blocks) == block_of(j, n, blocks) { p_in } else { p_out };
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_edges(n, Directedness::Undirected, edges)?.0)
}
