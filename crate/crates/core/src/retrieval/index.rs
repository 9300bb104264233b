use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::retrieval::codebook::tail_mask;
use crate::retrieval::{BinaryCodebook, HammingHit};

/// Hash table from a whole code (as one word) to the nodes carrying it.
/// Buckets are contiguous runs of one node array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashIndex {
    dim: usize,
    nodes: Vec<NodeId>,
    table: HashMap<u64, (usize, usize)>,
}

impl HashIndex {
    /// Buckets every node by its code. Fails for codes wider than 64 bits.
    pub fn build(codebook: &BinaryCodebook) -> Result<Self> {
        if codebook.dim() > 64 {
            return Err(Error::CodeTooWide(codebook.dim()));
        }
        let codes = codebook.words();
        let mut nodes: Vec<NodeId> = (0..codebook.num_nodes()).collect();
        nodes.sort_by_key(|&i| codes[i]);
        Ok(Self::from_sorted(codebook.dim(), nodes, |i| codes[i]))
    }

    /// `nodes` grouped by code, ascending within each group.
    fn from_sorted(dim: usize, nodes: Vec<NodeId>, code_of: impl Fn(NodeId) -> u64) -> Self {
        let mut table = HashMap::new();
        let mut start = 0;
        while start < nodes.len() {
            let code = code_of(nodes[start]);
            let mut end = start + 1;
            while end < nodes.len() && code_of(nodes[end]) == code {
                end += 1;
            }
            table.insert(code, (start, end));
            start = end;
        }
        HashIndex { dim, nodes, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_buckets(&self) -> usize {
        self.table.len()
    }

    /// Nodes with exactly this code, ascending.
    pub fn bucket(&self, code: u64) -> &[NodeId] {
        self.table.get(&code).map_or(&[], |&(a, b)| &self.nodes[a..b])
    }

    /// Buckets in ascending code order.
    pub fn buckets(&self) -> Vec<(u64, &[NodeId])> {
        let mut out: Vec<_> = self.table.iter().map(|(&c, &(a, b))| (c, &self.nodes[a..b])).collect();
        out.sort_unstable_by_key(|&(c, _)| c);
        out
    }

    /// Probes codes around `query` by increasing Hamming radius.
    ///
    /// At most `location_budget` codes are probed. Once `result_cap` nodes
    /// are collected the current radius is finished and the rest skipped, so
    /// the cap keeps exactly the nodes a full scan would rank first. The
    /// result is ordered by (distance, node id) and may be shorter than
    /// `result_cap`, or empty, when the budget runs out first.
    pub fn query(&self, query: u64, location_budget: usize, result_cap: usize, exclude: Option<NodeId>) -> Vec<HammingHit> {
        let query = query & tail_mask(self.dim);
        let mut hits = Vec::new();
        if result_cap == 0 {
            return hits;
        }
        let mut filled_at = None;
        for (radius, mask) in HammingBall::new(self.dim).take(location_budget) {
            if filled_at.is_some_and(|r| radius > r) {
                break;
            }
            for &node in self.bucket(query ^ mask) {
                if Some(node) != exclude {
                    hits.push(HammingHit { node, distance: radius });
                }
            }
            if filled_at.is_none() && hits.len() >= result_cap {
                filled_at = Some(radius);
            }
        }
        hits.sort_unstable();
        hits.truncate(result_cap);
        hits
    }

    /// `<code bits, bit 0 first><TAB><comma-separated node ids>` per bucket,
    /// after a `# index dim=D nodes=N` header.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# index dim={} nodes={}", self.dim, self.num_nodes())?;
        for (code, nodes) in self.buckets() {
            let bits: String = (0..self.dim).map(|k| if code >> k & 1 == 1 { '1' } else { '0' }).collect();
            let ids: Vec<String> = nodes.iter().map(ToString::to_string).collect();
            writeln!(w, "{bits}\t{}", ids.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let (dim, num_nodes) = parse_header(&header).ok_or_else(|| Error::Format(format!("bad index header {header:?}")))?;
        if dim == 0 || dim > 64 {
            return Err(Error::Format(format!("index dimension {dim} outside 1..=64")));
        }
        let mut codes = vec![0u64; num_nodes];
        let mut seen_codes = std::collections::HashSet::new();
        let mut seen = vec![false; num_nodes];
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let bad = |m: &str| Error::Format(format!("index line {}: {m}", idx + 2));
            let (bits, ids) = line.split_once('\t').ok_or_else(|| bad("expected two tab-separated fields"))?;
            if bits.len() != dim || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(bad("code is not a string of dim bits"));
            }
            let code = bits.bytes().enumerate().fold(0u64, |c, (k, b)| c | (u64::from(b - b'0') << k));
            for id in ids.split(',') {
                let node: NodeId = id.parse().map_err(|_| bad("bad node id"))?;
                if node >= num_nodes || std::mem::replace(&mut seen[node], true) {
                    return Err(bad("node id out of range or repeated"));
                }
                codes[node] = code;
            }
            if !seen_codes.insert(code) {
                return Err(bad("repeated code"));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Format("index does not cover every node".into()));
        }
        let mut nodes: Vec<NodeId> = (0..num_nodes).collect();
        nodes.sort_by_key(|&i| codes[i]);
        Ok(Self::from_sorted(dim, nodes, |i| codes[i]))
    }

    /// Approximate bytes held by the table.
    pub fn heap_bytes(&self) -> usize {
        let per_bucket = std::mem::size_of::<(u64, (usize, usize))>() + 1;
        self.table.capacity() * per_bucket + self.nodes.capacity() * std::mem::size_of::<NodeId>()
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.trim().strip_prefix("# index ")?;
    let mut dim = None;
    let mut nodes = None;
    for kv in rest.split_whitespace() {
        match kv.split_once('=')? {
            ("dim", v) => dim = v.parse().ok(),
            ("nodes", v) => nodes = v.parse().ok(),
            _ => {}
        }
    }
    Some((dim?, nodes?))
}

/// Flip masks over `dim` bits: radius 0, then every radius-1 mask, and so
/// on, with the flipped index sets of one radius in lexicographic order.
/// Yields `(radius, mask)`.
#[derive(Debug, Clone)]
pub struct HammingBall {
    dim: usize,
    combo: Vec<usize>,
    done: bool,
}

impl HammingBall {
    pub fn new(dim: usize) -> Self {
        assert!(dim <= 64, "ball enumeration is limited to 64 bits");
        HammingBall {
            dim,
            combo: Vec::new(),
            done: false,
        }
    }

    fn advance(&mut self) {
        let (n, r) = (self.dim, self.combo.len());
        if let Some(i) = (0..r).rev().find(|&i| self.combo[i] < n - r + i) {
            self.combo[i] += 1;
            for t in i + 1..r {
                self.combo[t] = self.combo[t - 1] + 1;
            }
        } else if r < n {
            self.combo = (0..=r).collect();
        } else {
            self.done = true;
        }
    }
}

impl Iterator for HammingBall {
    type Item = (u32, u64);

    fn next(&mut self) -> Option<(u32, u64)> {
        if self.done {
            return None;
        }
        let mask = self.combo.iter().fold(0u64, |m, &k| m | 1 << k);
        let item = (self.combo.len() as u32, mask);
        self.advance();
        Some(item)
    }
}
