use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use graphhash::eval::{eval_queries, map_eval, write_map_tsv, write_pr_tsv, EvalConfig, MapRow};
use graphhash::model::Checkpoint;
use graphhash::observables::{rerank, ObservableModel, RerankBudget};
use graphhash::retrieval::{query_brute_binary, query_brute_real, BinaryCodebook, HashIndex, RealEmbeddings};
use graphhash::NodeId;
use rayon::prelude::*;

use crate::cmd::{choice, load_codebook, load_index, load_model, load_split, same_size};
use crate::output::{open, write_atomic};
use crate::settings::{sibling, Settings};
use crate::UsageError;

choice!(Method { Hash => "hash", Rerank => "rerank", Binary => "binary", Real => "real" });

#[derive(Args)]
pub struct EvalArgs {
    /// Split stem written by `split`
    #[arg(long)]
    input: Option<PathBuf>,
    /// hash | rerank | binary | real [default: hash]
    #[arg(long)]
    method: Option<Method>,
    /// Codebook (hash, rerank, binary)
    #[arg(long)]
    codes: Option<PathBuf>,
    /// Prebuilt index; built from --codes when absent
    #[arg(long)]
    index: Option<PathBuf>,
    /// Real-valued model checkpoint (real)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Weights CSV from `rerank-train` (rerank)
    #[arg(long)]
    observable: Option<PathBuf>,
    /// Codes probed per hash lookup [default: 10000]
    #[arg(long)]
    locations: Option<usize>,
    /// Shortlist length handed to the reranker [default: 1000]
    #[arg(long)]
    candidates: Option<usize>,
    /// Query nodes sampled [default: 1000]
    #[arg(long)]
    queries: Option<usize>,
    /// Ranking depth scored per query [default: 1000]
    #[arg(long)]
    depth: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// MAP table to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Precision/recall curve [default: <output>.pr.tsv]
    #[arg(long)]
    pr: Option<PathBuf>,
    /// Method column of the MAP table [default: the method name]
    #[arg(long)]
    label: Option<String>,
    #[arg(long)]
    directed: bool,
}

enum Retriever {
    Hash(HashIndex, BinaryCodebook),
    Rerank(HashIndex, BinaryCodebook, ObservableModel, RerankBudget),
    Binary(BinaryCodebook),
    Real(RealEmbeddings),
}

pub fn run(args: EvalArgs, config: Option<&Path>) -> Result<()> {
    let mut s = Settings::new("eval", config)?;
    let input = s.path("input", args.input)?;
    let method = s.value("method", args.method, Method::Hash)?;
    let codes_path = s.optional_path("codes", args.codes)?;
    let index_path = s.optional_path("index", args.index)?;
    let model_path = s.optional_path("model", args.model)?;
    let observable_path = s.optional_path("observable", args.observable)?;
    let locations = s.value("locations", args.locations, 10_000)?;
    let candidates = s.value("candidates", args.candidates, 1000)?;
    let num_queries = s.value("queries", args.queries, 1000)?;
    let depth = s.value("depth", args.depth, 1000)?;
    let seed = s.value("seed", args.seed, 0)?;
    let output = s.path("output", args.output)?;
    let pr = s.path_or("pr", args.pr, sibling(&output, ".pr.tsv"))?;
    let label = s.value("label", args.label, method.to_string())?;
    let directed = s.switch("directed", args.directed)?;
    s.check_consumed()?;
    if locations == 0 {
        return Err(UsageError("--locations must be at least 1".into()).into());
    }

    let (split, _) = load_split(&input, directed)?;
    let n = split.num_nodes();
    let need = |p: &Option<PathBuf>, flag: &str| {
        p.clone().ok_or_else(|| UsageError(format!("{method} evaluation needs --{flag}")))
    };
    let load_codes = || -> Result<BinaryCodebook> {
        let codes = load_codebook(&need(&codes_path, "codes")?)?;
        same_size("codebook vs graph nodes", n, codes.num_nodes())?;
        Ok(codes)
    };
    let load_hash = |codes: &BinaryCodebook| -> Result<HashIndex> {
        match &index_path {
            Some(p) => {
                let index = load_index(p)?;
                same_size("index vs graph nodes", n, index.num_nodes())?;
                same_size("index vs codebook bits", codes.dim(), index.dim())?;
                Ok(index)
            }
            None => Ok(HashIndex::build(codes)?),
        }
    };
    let retriever = match method {
        Method::Hash => {
            let codes = load_codes()?;
            Retriever::Hash(load_hash(&codes)?, codes)
        }
        Method::Rerank => {
            let codes = load_codes()?;
            let index = load_hash(&codes)?;
            let observable = ObservableModel::read_csv(open(&need(&observable_path, "observable")?)?)?;
            Retriever::Rerank(index, codes, observable, RerankBudget::new(locations, candidates)?)
        }
        Method::Binary => Retriever::Binary(load_codes()?),
        Method::Real => match load_model(&need(&model_path, "model")?)? {
            Checkpoint::DistEmb(m) => {
                let emb = RealEmbeddings::from_model(&m)?;
                same_size("model vs graph nodes", n, emb.num_nodes())?;
                Retriever::Real(emb)
            }
            Checkpoint::Bernoulli(_) => return Err(UsageError("real evaluation needs a distemb_l2 model".into()).into()),
        },
    };
    let dim = match &retriever {
        Retriever::Hash(_, c) | Retriever::Rerank(_, c, _, _) | Retriever::Binary(c) => c.dim(),
        Retriever::Real(e) => e.dim(),
    };

    let rank = |q: NodeId| -> graphhash::Result<Vec<NodeId>> {
        Ok(match &retriever {
            Retriever::Hash(index, codes) => {
                index.query(codes.code(q)?, locations, depth, Some(q)).into_iter().map(|h| h.node).collect()
            }
            Retriever::Rerank(index, codes, model, budget) => {
                let shortlist: Vec<NodeId> = index
                    .query(codes.code(q)?, budget.location_budget, budget.candidate_cap, Some(q))
                    .into_iter()
                    .map(|h| h.node)
                    .collect();
                rerank(&split.train, q, &shortlist, model, budget)?.into_iter().map(|p| p.0).collect()
            }
            Retriever::Binary(codes) => {
                query_brute_binary(codes, codes.row(q), depth, Some(q))?.into_iter().map(|h| h.node).collect()
            }
            Retriever::Real(emb) => {
                query_brute_real(emb, emb.row(q), depth, Some(q))?.into_iter().map(|h| h.node).collect()
            }
        })
    };

    let eval_config = EvalConfig {
        num_queries,
        seed,
        depth,
    };
    let queries = eval_queries(&split, &eval_config)?;
    let mut rankings: HashMap<NodeId, Vec<NodeId>> = queries
        .par_iter()
        .map(|&q| Ok((q, rank(q)?)))
        .collect::<graphhash::Result<_>>()?;
    let report = map_eval(
        |q, _| Ok(rankings.remove(&q).expect("ranking precomputed for every query")),
        &split,
        &eval_config,
    )?;

    let row = MapRow {
        method: label,
        dim,
        num_queries: report.num_queries(),
        map: report.map,
    };
    write_atomic(&output, |w| write_map_tsv(w, std::slice::from_ref(&row)))?;
    write_atomic(&pr, |w| write_pr_tsv(w, &report.curve))?;
    s.finish(&output)?;
    println!("map={:.6} queries={} skipped={}", report.map, report.num_queries(), report.skipped);
    Ok(())
}
