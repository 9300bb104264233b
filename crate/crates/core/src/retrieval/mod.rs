//! Binary codes and nearest-node search over them.

mod brute;
mod codebook;
mod index;
mod lsh;

use std::fmt::Display;
use std::io::Write;

pub use brute::{query_brute_binary, query_brute_real, RealEmbeddings};
pub use codebook::{discretize, BinaryCodebook};
pub use index::{HammingBall, HashIndex};
pub use lsh::LshQuantizer;

use crate::error::Result;
use crate::graph::{NodeId, Vocabulary};

/// A retrieved node and its Hamming distance to the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HammingHit {
    pub distance: u32,
    pub node: NodeId,
}

/// A retrieved node and its Euclidean distance to the query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealHit {
    pub node: NodeId,
    pub distance: f64,
}

pub fn build_index(codebook: &BinaryCodebook) -> Result<HashIndex> {
    HashIndex::build(codebook)
}

/// See [`HashIndex::query`].
pub fn query_hash(
    index: &HashIndex,
    query_code: u64,
    location_budget: usize,
    result_cap: usize,
    exclude: Option<NodeId>,
) -> Vec<HammingHit> {
    index.query(query_code, location_budget, result_cap, exclude)
}

/// Writes `rank<TAB>node_id<TAB><value_name>` rows, ranks starting at 1.
pub fn write_ranking_tsv<W: Write, V: Display>(
    mut w: W,
    value_name: &str,
    rows: impl IntoIterator<Item = (NodeId, V)>,
    vocab: &Vocabulary,
) -> Result<()> {
    writeln!(w, "rank\tnode_id\t{value_name}")?;
    for (rank, (node, value)) in rows.into_iter().enumerate() {
        let label = vocab.label(node).map_or_else(|| node.to_string(), str::to_owned);
        writeln!(w, "{}\t{label}\t{value}", rank + 1)?;
    }
    w.flush()?;
    Ok(())
}
