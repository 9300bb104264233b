use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::model::DistEmbModel;
use crate::retrieval::codebook::hamming_words;
use crate::retrieval::{BinaryCodebook, HammingHit, RealHit};

/// Dense `N × d` single-precision embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct RealEmbeddings {
    num_nodes: usize,
    dim: usize,
    values: Vec<f32>,
}

impl RealEmbeddings {
    pub fn new(num_nodes: usize, dim: usize, values: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be at least 1".into()));
        }
        if values.len() != num_nodes * dim {
            return Err(Error::DimensionMismatch {
                what: "embedding values",
                expected: num_nodes * dim,
                found: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("embedding row {} column {}", k / dim, k % dim),
            });
        }
        Ok(RealEmbeddings { num_nodes, dim, values })
    }

    /// Standard normal entries.
    pub fn random(num_nodes: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..num_nodes * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::new(num_nodes, dim, values)
    }

    pub fn from_model(model: &DistEmbModel) -> Result<Self> {
        let values = (0..model.num_nodes())
            .flat_map(|i| model.embedding(i).iter().map(|&v| v as f32))
            .collect();
        Self::new(model.num_nodes(), model.dim(), values)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: NodeId) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn heap_bytes(&self) -> usize {
        self.values.len() * std::mem::size_of::<f32>()
    }
}

/// Max-heap entry ordered by (key, node); the root is the current worst.
struct Entry<K>(K, NodeId);

impl<K: PartialOrd> PartialEq for Entry<K> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<K: PartialOrd> Eq for Entry<K> {}

impl<K: PartialOrd> PartialOrd for Entry<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: PartialOrd> Ord for Entry<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(Ordering::Equal)
            .then(self.1.cmp(&other.1))
    }
}

/// The `k` smallest `(key, node)` pairs of a stream visited in ascending
/// node order, sorted ascending.
fn smallest_k<K: PartialOrd + Copy>(items: impl Iterator<Item = (K, NodeId)>, k: usize) -> Vec<(K, NodeId)> {
    let mut heap: BinaryHeap<Entry<K>> = BinaryHeap::with_capacity(k.min(1 << 16) + 1);
    if k == 0 {
        return Vec::new();
    }
    for (key, node) in items {
        if heap.len() < k {
            heap.push(Entry(key, node));
        } else if let Some(mut top) = heap.peek_mut() {
            // nodes arrive in ascending order, so an equal key never wins
            if key < top.0 {
                *top = Entry(key, node);
            }
        }
    }
    heap.into_sorted_vec().into_iter().map(|Entry(k, n)| (k, n)).collect()
}

/// Full popcount scan for the `top_k` nodes closest to `query`, ordered by
/// (distance, node id).
pub fn query_brute_binary(
    codebook: &BinaryCodebook,
    query: &[u64],
    top_k: usize,
    exclude: Option<NodeId>,
) -> Result<Vec<HammingHit>> {
    codebook.check_code(query)?;
    let skip = exclude.unwrap_or(usize::MAX);
    let hits = if codebook.words_per_row() == 1 {
        let q = query[0];
        let scan = codebook
            .words()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(i, &w)| ((w ^ q).count_ones(), i));
        smallest_k(scan, top_k)
    } else {
        let scan = codebook
            .words()
            .chunks_exact(codebook.words_per_row())
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(i, row)| (hamming_words(row, query), i));
        smallest_k(scan, top_k)
    };
    Ok(hits.into_iter().map(|(distance, node)| HammingHit { node, distance }).collect())
}

/// Full Euclidean scan for the `top_k` nearest rows, ordered by (distance,
/// node id).
pub fn query_brute_real(
    embeddings: &RealEmbeddings,
    query: &[f32],
    top_k: usize,
    exclude: Option<NodeId>,
) -> Result<Vec<RealHit>> {
    if query.len() != embeddings.dim {
        return Err(Error::DimensionMismatch {
            what: "query vector",
            expected: embeddings.dim,
            found: query.len(),
        });
    }
    if query.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "query vector".into(),
        });
    }
    let skip = exclude.unwrap_or(usize::MAX);
    let scan = embeddings
        .values
        .chunks_exact(embeddings.dim)
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(i, row)| {
            let d2: f32 = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        });
    Ok(smallest_k(scan, top_k)
        .into_iter()
        .map(|(d2, node)| RealHit {
            node,
            distance: f64::from(d2).sqrt(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn single_node_excluded_is_empty() {
        let cb = BinaryCodebook::random(1, 8, 0).unwrap();
        let q = cb.row(0).to_vec();
        assert!(query_brute_binary(&cb, &q, 5, Some(0)).unwrap().is_empty());
    }

    #[test]
    fn ties_go_to_lower_id() {
        let cb = BinaryCodebook::from_words(3, 4, vec![0b0011, 0b0001, 0b0010]).unwrap();
        let hits = query_brute_binary(&cb, &[0b0011], 3, Some(0)).unwrap();
        assert_eq!(hits, vec![HammingHit { node: 1, distance: 1 }, HammingHit { node: 2, distance: 1 }]);
    }

    #[test]
    fn matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [5, 64, 100, 130] {
            let cb = BinaryCodebook::random(300, d, d as u64).unwrap();
            for _ in 0..5 {
                let q = rng.random_range(0..300);
                let code = cb.row(q).to_vec();
                let mut naive: Vec<(u32, usize)> = (0..300)
                    .filter(|&i| i != q)
                    .map(|i| ((0..d).filter(|&k| cb.bit(i, k) != cb.bit(q, k)).count() as u32, i))
                    .collect();
                naive.sort();
                naive.truncate(17);
                let got: Vec<(u32, usize)> = query_brute_binary(&cb, &code, 17, Some(q))
                    .unwrap()
                    .iter()
                    .map(|h| (h.distance, h.node))
                    .collect();
                assert_eq!(got, naive);
            }
        }
    }

    #[test]
    fn real_toy_distances() {
        let emb = RealEmbeddings::new(3, 2, vec![0.0, 0.0, 3.0, 4.0, 6.0, 8.0]).unwrap();
        let hits = query_brute_real(&emb, &[0.0, 0.0], 10, None).unwrap();
        let got: Vec<(usize, f64)> = hits.iter().map(|h| (h.node, h.distance)).collect();
        assert_eq!(got, vec![(0, 0.0), (1, 5.0), (2, 10.0)]);
        assert!(matches!(query_brute_real(&emb, &[0.0], 1, None), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn real_ranking_is_order_independent() {
        let emb = RealEmbeddings::random(40, 6, 3).unwrap();
        let perm: Vec<usize> = (0..40).rev().collect();
        let values: Vec<f32> = perm.iter().flat_map(|&i| emb.row(i).to_vec()).collect();
        let permuted = RealEmbeddings::new(40, 6, values).unwrap();
        let q = emb.row(7).to_vec();
        let a: Vec<usize> = query_brute_real(&emb, &q, 40, None).unwrap().iter().map(|h| h.node).collect();
        let b: Vec<usize> = query_brute_real(&permuted, &q, 40, None)
            .unwrap()
            .iter()
            .map(|h| perm[h.node])
            .collect();
        assert_eq!(a, b);
        assert_eq!(a[0], 7);
    }
}
