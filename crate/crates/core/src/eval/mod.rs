//! Test-set MAP and retrieval latency measurement.

mod bench;
mod map;

pub use bench::{bench_retrieval, write_bench_tsv, BenchConfig, BenchMethod, BenchOutcome, BenchReport};
pub use map::{average_precision, eval_queries, map_eval, test_relevance, write_map_tsv, write_pr_tsv, EvalConfig, MapReport, MapRow, PrPoint};
