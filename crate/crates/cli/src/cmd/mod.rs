pub mod bench;
pub mod codes;
pub mod eval;
pub mod rerank;
pub mod split;
pub mod synth;
pub mod train;

use std::path::Path;

use anyhow::{Context, Result};
use graphhash::model::{read_checkpoint, Checkpoint};
use graphhash::retrieval::{BinaryCodebook, HashIndex};
use graphhash::{Directedness, SplitGraph, Vocabulary};

use crate::output::open;

/// Enum setting spelled as fixed strings.
macro_rules! choice {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name {
            $($variant),+
        }

        impl std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(match self {
                    $($name::$variant => $text),+
                })
            }
        }
    };
}
pub(crate) use choice;

pub fn directedness(directed: bool) -> Directedness {
    if directed {
        Directedness::Directed
    } else {
        Directedness::Undirected
    }
}

pub fn load_split(stem: &Path, directed: bool) -> Result<(SplitGraph, Vocabulary)> {
    SplitGraph::load(stem, directedness(directed)).with_context(|| format!("loading split {}", stem.display()))
}

pub fn load_codebook(path: &Path) -> Result<BinaryCodebook> {
    BinaryCodebook::read_from(open(path)?).with_context(|| format!("reading codes {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<Checkpoint> {
    read_checkpoint(open(path)?).with_context(|| format!("reading model {}", path.display()))
}

pub fn load_index(path: &Path) -> Result<HashIndex> {
    HashIndex::read_tsv(open(path)?).with_context(|| format!("reading index {}", path.display()))
}

pub fn load_vocab(path: &Path) -> Result<Vocabulary> {
    Vocabulary::load(path).with_context(|| format!("reading vocabulary {}", path.display()))
}

/// Fails unless two artifacts agree on a size.
pub fn same_size(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(graphhash::Error::DimensionMismatch { what, expected, found }.into())
    }
}
