use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Maps external node labels to dense ids in first-appearance order.
///
/// On disk: one label per line, line number (from 0) is the dense id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    labels: Vec<String>,
    ids: HashMap<String, NodeId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get_or_insert(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn id(&self, label: &str) -> Option<NodeId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Identity vocabulary `"0", "1", ..., "n-1"`.
    pub fn numeric(n: usize) -> Self {
        let mut vocab = Self::new();
        for i in 0..n {
            vocab.get_or_insert(&i.to_string());
        }
        vocab
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for label in &self.labels {
            writeln!(w, "{label}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R, path: &Path) -> Result<Self> {
        let mut vocab = Self::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let label = line.trim_end_matches('\r');
            if label.is_empty() || label.contains('\t') {
                return Err(Error::parse(path, idx + 1, "vocabulary entry must be a non-empty label without tabs"));
            }
            if vocab.id(label).is_some() {
                return Err(Error::parse(path, idx + 1, format!("duplicate label {label:?}")));
            }
            vocab.get_or_insert(label);
        }
        Ok(vocab)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file), path)
    }
}
