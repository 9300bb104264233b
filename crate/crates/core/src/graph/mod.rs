//! Immutable adjacency store.
//!
//! Edges are kept sorted and deduplicated. Every node has three sorted
//! neighbor lists: out, in, and the union of both. For undirected graphs all
//! three coincide and each edge is stored once as `(min, max)`.

mod io;
mod split;
mod vocab;

pub use io::{load_edge_list, parse_edge_list, write_edge_list, LoadedGraph};
pub use split::{split, SplitGraph, SplitPaths};
pub use vocab::Vocabulary;

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Directedness {
    Directed,
    Undirected,
}

impl Directedness {
    pub fn is_directed(self) -> bool {
        self == Directedness::Directed
    }
}

/// Counts of what was dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Compressed sparse rows: `targets[offsets[i]..offsets[i + 1]]` are the
/// sorted neighbors of node `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Adjacency {
    fn build(num_nodes: usize, pairs: impl Iterator<Item = (NodeId, NodeId)> + Clone) -> Self {
        let mut offsets = vec![0usize; num_nodes + 1];
        for (src, _) in pairs.clone() {
            offsets[src + 1] += 1;
        }
        for i in 0..num_nodes {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0; offsets[num_nodes]];
        for (src, dst) in pairs {
            targets[cursor[src]] = dst;
            cursor[src] += 1;
        }
        for i in 0..num_nodes {
            let row = &mut targets[offsets[i]..offsets[i + 1]];
            row.sort_unstable();
        }
        let mut adj = Adjacency { offsets, targets };
        adj.dedup_rows();
        adj
    }

    fn dedup_rows(&mut self) {
        let num_nodes = self.offsets.len() - 1;
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        let mut targets = Vec::with_capacity(self.targets.len());
        offsets.push(0);
        for i in 0..num_nodes {
            let row = &self.targets[self.offsets[i]..self.offsets[i + 1]];
            for (k, &t) in row.iter().enumerate() {
                if k == 0 || row[k - 1] != t {
                    targets.push(t);
                }
            }
            offsets.push(targets.len());
        }
        self.offsets = offsets;
        self.targets = targets;
    }

    fn row(&self, i: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    directedness: Directedness,
    edges: Vec<(NodeId, NodeId)>,
    out_adj: Adjacency,
    in_adj: Option<Adjacency>,
    both_adj: Option<Adjacency>,
}

impl Graph {
    /// Builds a graph over `num_nodes` nodes, dropping self-loops and
    /// duplicate edges. For undirected graphs `(a, b)` and `(b, a)` are the
    /// same edge.
    pub fn from_edges<I>(num_nodes: usize, directedness: Directedness, edges: I) -> Result<(Self, IngestReport)>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut report = IngestReport::default();
        let mut kept = Vec::new();
        for (a, b) in edges {
            for node in [a, b] {
                if node >= num_nodes {
                    return Err(Error::NodeOutOfRange { node, num_nodes });
                }
            }
            if a == b {
                report.self_loops += 1;
                continue;
            }
            kept.push(match directedness {
                Directedness::Directed => (a, b),
                Directedness::Undirected => (a.min(b), a.max(b)),
            });
        }
        let before = kept.len();
        kept.sort_unstable();
        kept.dedup();
        report.duplicates = before - kept.len();
        Ok((Self::from_canonical(num_nodes, directedness, kept), report))
    }

    /// `edges` must already be sorted, deduplicated, loop-free and (for
    /// undirected graphs) oriented `(min, max)`.
    fn from_canonical(num_nodes: usize, directedness: Directedness, edges: Vec<(NodeId, NodeId)>) -> Self {
        match directedness {
            Directedness::Undirected => {
                let both = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]);
                let out_adj = Adjacency::build(num_nodes, both);
                Graph {
                    num_nodes,
                    directedness,
                    edges,
                    out_adj,
                    in_adj: None,
                    both_adj: None,
                }
            }
            Directedness::Directed => {
                let out_adj = Adjacency::build(num_nodes, edges.iter().copied());
                let in_adj = Adjacency::build(num_nodes, edges.iter().map(|&(a, b)| (b, a)));
                let both_adj = Adjacency::build(num_nodes, edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]));
                Graph {
                    num_nodes,
                    directedness,
                    edges,
                    out_adj,
                    in_adj: Some(in_adj),
                    both_adj: Some(both_adj),
                }
            }
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    /// Sorted edge list. Undirected edges appear once, as `(min, max)`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Every stored edge in each direction it can be traversed: directed
    /// edges once, undirected edges twice.
    pub fn edge_instances(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let undirected = !self.directedness.is_directed();
        self.edges.iter().flat_map(move |&(a, b)| {
            let reverse = if undirected { Some((b, a)) } else { None };
            std::iter::once((a, b)).chain(reverse)
        })
    }

    pub fn out_neighbors(&self, x: NodeId) -> &[NodeId] {
        self.out_adj.row(x)
    }

    pub fn in_neighbors(&self, x: NodeId) -> &[NodeId] {
        match &self.in_adj {
            Some(adj) => adj.row(x),
            None => self.out_adj.row(x),
        }
    }

    /// Γ(x): neighbors ignoring direction (in ∪ out for directed graphs).
    pub fn neighbors(&self, x: NodeId) -> &[NodeId] {
        match &self.both_adj {
            Some(adj) => adj.row(x),
            None => self.out_adj.row(x),
        }
    }

    /// |Γ(x)|
    pub fn degree(&self, x: NodeId) -> usize {
        self.neighbors(x).len()
    }

    pub fn out_degree(&self, x: NodeId) -> usize {
        self.out_neighbors(x).len()
    }

    /// True if `x` and `y` are joined by an edge in either direction.
    pub fn is_adjacent(&self, x: NodeId, y: NodeId) -> bool {
        self.neighbors(x).binary_search(&y).is_ok()
    }

    pub fn has_edge(&self, x: NodeId, y: NodeId) -> bool {
        self.out_neighbors(x).binary_search(&y).is_ok()
    }

    fn check_node(&self, x: NodeId) -> Result<()> {
        if x < self.num_nodes {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: x,
                num_nodes: self.num_nodes,
            })
        }
    }

    /// Γ(x) ∩ Γ(y), sorted ascending.
    pub fn common_neighbors(&self, x: NodeId, y: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(x)?;
        self.check_node(y)?;
        let mut out = Vec::new();
        self.for_each_common_neighbor(x, y, |z| out.push(z));
        Ok(out)
    }

    /// Merge-walk over the two sorted neighbor lists. Callers must have
    /// checked the bounds.
    pub(crate) fn for_each_common_neighbor(&self, x: NodeId, y: NodeId, mut visit: impl FnMut(NodeId)) {
        let (mut a, mut b) = (self.neighbors(x), self.neighbors(y));
        if a.len() > b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        // Galloping pays off once the lists are badly unbalanced.
        if a.len() * 16 < b.len() {
            for &z in a {
                if b.binary_search(&z).is_ok() {
                    visit(z);
                }
            }
            return;
        }
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    visit(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}
