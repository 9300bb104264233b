use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use graphhash::model::Checkpoint;
use graphhash::retrieval::{
    discretize, query_brute_binary, query_brute_real, write_ranking_tsv, BinaryCodebook, HashIndex, LshQuantizer,
    RealEmbeddings,
};
use graphhash::{NodeId, Vocabulary};

use crate::cmd::{choice, load_codebook, load_index, load_model, load_vocab, same_size};
use crate::output::write_atomic;
use crate::settings::Settings;
use crate::UsageError;

#[derive(Args)]
pub struct ExportArgs {
    /// Model checkpoint written by `train`
    #[arg(long)]
    model: Option<PathBuf>,
    /// Codebook file to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Code width for real-valued models (random-hyperplane LSH)
    #[arg(long)]
    lsh_bits: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    lsh_seed: Option<u64>,
}

/// Binary codes of a model: maximum-likelihood rounding for Bernoulli
/// models, LSH for real-valued ones.
pub fn codes_of(model: &Checkpoint, lsh_bits: Option<usize>, lsh_seed: u64) -> Result<BinaryCodebook> {
    match model {
        Checkpoint::Bernoulli(m) => {
            if lsh_bits.is_some() {
                return Err(UsageError("--lsh-bits applies only to real-valued models".into()).into());
            }
            Ok(discretize(m))
        }
        Checkpoint::DistEmb(m) => {
            let bits = lsh_bits.ok_or_else(|| UsageError("real-valued model: --lsh-bits is required".into()))?;
            let emb = RealEmbeddings::from_model(m)?;
            Ok(LshQuantizer::new(emb.dim(), bits, lsh_seed)?.quantize(&emb)?)
        }
    }
}

pub fn export(args: ExportArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("export-codes", config)?;
    let model_path = s.path("model", args.model)?;
    let output = s.path("output", args.output)?;
    let lsh_bits = s.optional("lsh-bits", args.lsh_bits)?;
    let lsh_seed = s.value("lsh-seed", args.lsh_seed, 0)?;
    s.check_consumed()?;

    let model = load_model(&model_path)?;
    let codes = codes_of(&model, lsh_bits, lsh_seed)?;
    write_atomic(&output, |w| codes.write_to(w))?;
    s.finish(&output)?;
    println!("nodes={} bits={}", codes.num_nodes(), codes.dim());
    Ok(())
}

#[derive(Args)]
pub struct IndexArgs {
    /// Codebook written by `export-codes`
    #[arg(long)]
    codes: Option<PathBuf>,
    /// Index file to write
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn index(args: IndexArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("index", config)?;
    let codes_path = s.path("codes", args.codes)?;
    let output = s.path("output", args.output)?;
    s.check_consumed()?;

    let codes = load_codebook(&codes_path)?;
    let index = HashIndex::build(&codes)?;
    write_atomic(&output, |w| index.write_tsv(w))?;
    s.finish(&output)?;
    println!("nodes={} buckets={}", index.num_nodes(), index.num_buckets());
    Ok(())
}

choice!(QueryMode { Hash => "hash", Binary => "binary", Real => "real" });

#[derive(Args)]
pub struct QueryArgs {
    /// Query node label (or numeric id without --vocab)
    #[arg(long)]
    node: Option<String>,
    /// hash | binary | real [default: hash]
    #[arg(long)]
    mode: Option<QueryMode>,
    /// Codebook (hash and binary modes)
    #[arg(long)]
    codes: Option<PathBuf>,
    /// Prebuilt index for hash mode; built from --codes when absent
    #[arg(long)]
    index: Option<PathBuf>,
    /// Real-valued model checkpoint (real mode)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Vocabulary mapping labels to ids (the split's <stem>.vocab)
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// Results to return [default: 10]
    #[arg(long)]
    top_k: Option<usize>,
    /// Codes probed in hash mode [default: 10000]
    #[arg(long)]
    locations: Option<usize>,
    /// TSV of rank, node_id, distance
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn resolve_node(label: &str, vocab: Option<&Vocabulary>, num_nodes: usize) -> Result<NodeId> {
    let id = match vocab {
        Some(v) => v
            .id(label)
            .ok_or_else(|| graphhash::Error::Format(format!("unknown node label {label:?}")))?,
        None => label
            .parse()
            .map_err(|_| UsageError(format!("node {label:?} is not a numeric id; pass --vocab to use labels")))?,
    };
    if id >= num_nodes {
        return Err(graphhash::Error::NodeOutOfRange { node: id, num_nodes }.into());
    }
    Ok(id)
}

pub fn query(args: QueryArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("query", config)?;
    let node = s.required("node", args.node)?;
    let mode = s.value("mode", args.mode, QueryMode::Hash)?;
    let codes_path = s.optional_path("codes", args.codes)?;
    let index_path = s.optional_path("index", args.index)?;
    let model_path = s.optional_path("model", args.model)?;
    let vocab_path = s.optional_path("vocab", args.vocab)?;
    let top_k = s.value("top-k", args.top_k, 10)?;
    let locations = s.value("locations", args.locations, 10_000)?;
    let output = s.path("output", args.output)?;
    s.check_consumed()?;
    if top_k == 0 || locations == 0 {
        return Err(UsageError("--top-k and --locations must be at least 1".into()).into());
    }

    let vocab = vocab_path.as_deref().map(load_vocab).transpose()?;
    let need = |p: Option<PathBuf>, flag: &str| p.ok_or_else(|| UsageError(format!("{mode} mode needs --{flag}")));
    match mode {
        QueryMode::Hash | QueryMode::Binary => {
            let codes = load_codebook(&need(codes_path, "codes")?)?;
            if let Some(v) = &vocab {
                same_size("vocabulary vs codebook nodes", codes.num_nodes(), v.len())?;
            }
            let q = resolve_node(&node, vocab.as_ref(), codes.num_nodes())?;
            let hits = if mode == QueryMode::Hash {
                let index = match index_path {
                    Some(p) => {
                        let index = load_index(&p)?;
                        same_size("index vs codebook nodes", codes.num_nodes(), index.num_nodes())?;
                        same_size("index vs codebook bits", codes.dim(), index.dim())?;
                        index
                    }
                    None => HashIndex::build(&codes)?,
                };
                index.query(codes.code(q)?, locations, top_k, Some(q))
            } else {
                query_brute_binary(&codes, codes.row(q), top_k, Some(q))?
            };
            let labels = vocab.unwrap_or_else(|| Vocabulary::numeric(codes.num_nodes()));
            write_atomic(&output, |w| write_ranking_tsv(w, "distance", hits.iter().map(|h| (h.node, h.distance)), &labels))?;
        }
        QueryMode::Real => {
            let model = match load_model(&need(model_path, "model")?)? {
                Checkpoint::DistEmb(m) => m,
                Checkpoint::Bernoulli(_) => {
                    return Err(UsageError("real mode needs a distemb_l2 model".into()).into());
                }
            };
            let emb = RealEmbeddings::from_model(&model)?;
            if let Some(v) = &vocab {
                same_size("vocabulary vs model nodes", emb.num_nodes(), v.len())?;
            }
            let q = resolve_node(&node, vocab.as_ref(), emb.num_nodes())?;
            let hits = query_brute_real(&emb, emb.row(q), top_k, Some(q))?;
            let labels = vocab.unwrap_or_else(|| Vocabulary::numeric(emb.num_nodes()));
            write_atomic(&output, |w| write_ranking_tsv(w, "distance", hits.iter().map(|h| (h.node, h.distance)), &labels))?;
        }
    }
    s.finish(&output)?;
    Ok(())
}
