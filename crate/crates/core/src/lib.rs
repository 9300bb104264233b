//! Binary (Bernoulli) node embeddings for link retrieval.
//!
//! Nodes get independent Bernoulli bit vectors whose expected Hamming
//! distances are fit to the graph by noise-contrastive estimation. The
//! rounded codes then serve as hash addresses for fast neighbor lookup,
//! optionally followed by reranking with neighborhood features.

pub mod error;
pub mod eval;
pub mod graph;
mod math;
pub mod model;
pub mod observables;
pub mod retrieval;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::{Directedness, Graph, NodeId, SplitGraph, Vocabulary};
pub use model::{BernoulliModel, DistEmbModel, TrainConfig};
pub use retrieval::{BinaryCodebook, HashIndex};
