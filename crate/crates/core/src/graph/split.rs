use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, write_edge_list, Directedness, Graph, NodeId, Vocabulary};

/// Training graph plus the held-out test edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitGraph {
    pub train: Graph,
    pub test_edges: Vec<(NodeId, NodeId)>,
    pub holdout_fraction: f64,
    pub seed: u64,
}

/// Moves a uniformly random `round(fraction * |E|)` edges into the test set.
///
/// Edges are held in sorted order, so the result depends only on the edge
/// set and the seed. Every node stays in the training graph even if all of
/// its edges were held out.
pub fn split(g: &Graph, fraction: f64, seed: u64) -> Result<SplitGraph> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("holdout fraction must be in (0, 1), got {fraction}")));
    }
    let num_test = (fraction * g.num_edges() as f64).round() as usize;
    if num_test == 0 {
        return Err(Error::InvalidArgument(format!(
            "holdout fraction {fraction} of {} edges selects no test edge",
            g.num_edges()
        )));
    }
    let mut order: Vec<usize> = (0..g.num_edges()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut held = vec![false; g.num_edges()];
    for &k in &order[..num_test] {
        held[k] = true;
    }
    let mut train_edges = Vec::with_capacity(g.num_edges() - num_test);
    let mut test_edges = Vec::with_capacity(num_test);
    for (k, &e) in g.edges().iter().enumerate() {
        if held[k] {
            test_edges.push(e);
        } else {
            train_edges.push(e);
        }
    }
    let train = Graph::from_canonical(g.num_nodes(), g.directedness(), train_edges);
    Ok(SplitGraph {
        train,
        test_edges,
        holdout_fraction: fraction,
        seed,
    })
}

impl SplitGraph {
    /// Wraps a graph with an empty test set.
    pub fn without_holdout(train: Graph) -> Self {
        SplitGraph {
            train,
            test_edges: Vec::new(),
            holdout_fraction: 0.0,
            seed: 0,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.train.num_nodes()
    }

    /// Test edges in each traversable direction (both for undirected graphs).
    pub fn test_instances(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        let undirected = !self.train.directedness().is_directed();
        self.test_edges.iter().flat_map(move |&(a, b)| {
            let reverse = if undirected { Some((b, a)) } else { None };
            std::iter::once((a, b)).chain(reverse)
        })
    }

    /// Rebuilds the unsplit graph.
    pub fn full_graph(&self) -> Graph {
        let edges = self.train.edges().iter().chain(&self.test_edges).copied();
        Graph::from_edges(self.num_nodes(), self.train.directedness(), edges)
            .expect("split edges are in range")
            .0
    }

    pub fn paths(stem: &Path) -> SplitPaths {
        let with = |suffix: &str| {
            let mut s = stem.as_os_str().to_owned();
            s.push(suffix);
            PathBuf::from(s)
        };
        SplitPaths {
            train: with(".train.tsv"),
            test: with(".test.tsv"),
            vocab: with(".vocab"),
        }
    }

    fn header(&self) -> String {
        format!("split fraction={} seed={}", self.holdout_fraction, self.seed)
    }

    pub fn write_train<W: Write>(&self, w: W, vocab: &Vocabulary) -> Result<()> {
        write_edge_list(w, self.train.edges(), vocab, Some(&self.header()))
    }

    pub fn write_test<W: Write>(&self, w: W, vocab: &Vocabulary) -> Result<()> {
        write_edge_list(w, &self.test_edges, vocab, Some(&self.header()))
    }

    /// Loads `<stem>.train.tsv`, `<stem>.test.tsv` and `<stem>.vocab`. The
    /// vocabulary fixes N, so nodes isolated in training survive the trip.
    pub fn load(stem: &Path, directedness: Directedness) -> Result<(Self, Vocabulary)> {
        let paths = Self::paths(stem);
        let mut vocab = Vocabulary::load(&paths.vocab)?;
        type Read = (Vec<(NodeId, NodeId)>, Option<(f64, u64)>);
        let read = |path: &Path, vocab: &mut Vocabulary| -> Result<Read> {
            let mut first = String::new();
            let mut reader = BufReader::new(File::open(path)?);
            reader.read_line(&mut first)?;
            let meta = parse_header(&first);
            let pairs = parse_edge_list(first.as_bytes().chain(reader), path, vocab, false)?;
            Ok((pairs, meta))
        };
        let (train_pairs, meta) = read(&paths.train, &mut vocab)?;
        let (test_pairs, _) = read(&paths.test, &mut vocab)?;
        let (train, _) = Graph::from_edges(vocab.len(), directedness, train_pairs)?;
        let (test_graph, _) = Graph::from_edges(vocab.len(), directedness, test_pairs)?;
        if let Some(&e) = test_graph.edges().iter().find(|&&(a, b)| train.has_edge(a, b)) {
            return Err(Error::Format(format!(
                "edge {:?} appears in both {} and {}",
                e,
                paths.train.display(),
                paths.test.display()
            )));
        }
        let (holdout_fraction, seed) = meta.unwrap_or_else(|| {
            let total = train.num_edges() + test_graph.num_edges();
            (test_graph.num_edges() as f64 / total.max(1) as f64, 0)
        });
        let test_edges = test_graph.edges().to_vec();
        Ok((
            SplitGraph {
                train,
                test_edges,
                holdout_fraction,
                seed,
            },
            vocab,
        ))
    }
}

#[derive(Debug, Clone)]
pub struct SplitPaths {
    pub train: PathBuf,
    pub test: PathBuf,
    pub vocab: PathBuf,
}

fn parse_header(line: &str) -> Option<(f64, u64)> {
    let rest = line.trim().strip_prefix("# split ")?;
    let mut fraction = None;
    let mut seed = None;
    for kv in rest.split_whitespace() {
        match kv.split_once('=')? {
            ("fraction", v) => fraction = v.parse().ok(),
            ("seed", v) => seed = v.parse().ok(),
            _ => {}
        }
    }
    Some((fraction?, seed?))
}
