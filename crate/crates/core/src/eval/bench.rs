use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::retrieval::{query_brute_binary, query_brute_real, BinaryCodebook, HashIndex, RealEmbeddings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchMethod {
    Hash,
    BinaryBruteForce,
    RealBruteForce,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 3] = [BenchMethod::Hash, BenchMethod::BinaryBruteForce, BenchMethod::RealBruteForce];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Hash => "hash",
            BenchMethod::BinaryBruteForce => "binaryBruteForce",
            BenchMethod::RealBruteForce => "realBruteForce",
        }
    }

    /// Bytes the method's data structure needs for `n` items of width `d`.
    fn footprint(self, n: usize, d: usize) -> usize {
        let words = n.saturating_mul(d.div_ceil(64) * 8);
        match self {
            // codebook + node array + table with load-factor slack
            BenchMethod::Hash => words.saturating_add(n.saturating_mul(8 + 2 * 32)),
            BenchMethod::BinaryBruteForce => words,
            BenchMethod::RealBruteForce => n.saturating_mul(d).saturating_mul(4),
        }
    }
}

impl fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hash" => Ok(BenchMethod::Hash),
            "binaryBruteForce" | "binary-brute" | "binary" => Ok(BenchMethod::BinaryBruteForce),
            "realBruteForce" | "real-brute" | "real" => Ok(BenchMethod::RealBruteForce),
            _ => Err(Error::InvalidArgument(format!("unknown bench method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Timed queries per method.
    pub runs: usize,
    /// Untimed queries before the timed ones.
    pub warmup: usize,
    pub seed: u64,
    /// Neighbors requested per query.
    pub top_k: usize,
    /// Codes probed per hash query.
    pub location_budget: usize,
    /// Methods whose data would exceed this many bytes report OOM.
    pub memory_limit: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            runs: 50,
            warmup: 5,
            seed: 0,
            top_k: 10,
            location_budget: 10_000,
            memory_limit: 2 << 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BenchOutcome {
    Measured {
        mean_ms: f64,
        median_ms: f64,
        /// Sample standard deviation of the per-query latencies.
        spread_ms: f64,
        peak_mb: f64,
    },
    OutOfMemory,
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub method: BenchMethod,
    pub num_nodes: usize,
    pub dim: usize,
    pub runs: usize,
    pub outcome: BenchOutcome,
}

impl BenchReport {
    pub fn mean_ms(&self) -> Option<f64> {
        match self.outcome {
            BenchOutcome::Measured { mean_ms, .. } => Some(mean_ms),
            _ => None,
        }
    }
}

fn summarize(mut ms: Vec<f64>, bytes: usize) -> BenchOutcome {
    let n = ms.len() as f64;
    let mean = ms.iter().sum::<f64>() / n;
    let spread = (ms.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt();
    ms.sort_by(f64::total_cmp);
    let mid = ms.len() / 2;
    let median = if ms.len().is_multiple_of(2) { (ms[mid - 1] + ms[mid]) / 2.0 } else { ms[mid] };
    BenchOutcome::Measured {
        mean_ms: mean,
        median_ms: median,
        spread_ms: spread,
        peak_mb: bytes as f64 / (1024.0 * 1024.0),
    }
}

/// Times `query(k)` for `warmup + runs` query indices, keeping the last `runs`.
fn time_queries(runs: usize, warmup: usize, mut query: impl FnMut(usize) -> Result<usize>) -> Result<Vec<f64>> {
    let mut sink = 0usize;
    let mut ms = Vec::with_capacity(runs);
    for k in 0..warmup + runs {
        let start = Instant::now();
        sink = sink.wrapping_add(query(k)?);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        if k >= warmup {
            ms.push(elapsed);
        }
    }
    std::hint::black_box(sink);
    Ok(ms)
}

/// Query latency of each method on synthetic data of `num_nodes` items and
/// width `dim`: uniform random codes for the binary methods, standard normal
/// vectors for the real one. Each query asks for the neighbors of a random
/// stored item, chosen before timing starts.
pub fn bench_retrieval(methods: &[BenchMethod], num_nodes: usize, dim: usize, config: &BenchConfig) -> Result<Vec<BenchReport>> {
    if config.runs < 10 {
        return Err(Error::InvalidArgument(format!("benchmark needs at least 10 timed runs, got {}", config.runs)));
    }
    if num_nodes == 0 || dim == 0 {
        return Err(Error::InvalidArgument("benchmark needs at least one node and one dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let picks: Vec<usize> = (0..config.runs + config.warmup).map(|_| rng.random_range(0..num_nodes)).collect();
    let mut reports = Vec::new();
    for &method in methods {
        let report = |outcome| BenchReport {
            method,
            num_nodes,
            dim,
            runs: config.runs,
            outcome,
        };
        if method == BenchMethod::Hash && dim > 64 {
            reports.push(report(BenchOutcome::Unsupported(format!("hash mode needs d <= 64, got {dim}"))));
            continue;
        }
        let need = method.footprint(num_nodes, dim);
        if need > config.memory_limit || probe_allocation(need).is_err() {
            log::warn!("{method} at N={num_nodes} d={dim} needs ~{need} bytes; reporting OOM");
            reports.push(report(BenchOutcome::OutOfMemory));
            continue;
        }
        let outcome = match method {
            BenchMethod::Hash => {
                let cb = BinaryCodebook::random(num_nodes, dim, config.seed)?;
                let index = HashIndex::build(&cb)?;
                let codes: Vec<u64> = picks.iter().map(|&i| cb.words()[i]).collect();
                let bytes = cb.heap_bytes() + index.heap_bytes();
                drop(cb);
                let ms = time_queries(config.runs, config.warmup, |k| {
                    Ok(index.query(codes[k], config.location_budget, config.top_k, Some(picks[k])).len())
                })?;
                summarize(ms, bytes)
            }
            BenchMethod::BinaryBruteForce => {
                let cb = BinaryCodebook::random(num_nodes, dim, config.seed)?;
                let codes: Vec<Vec<u64>> = picks.iter().map(|&i| cb.row(i).to_vec()).collect();
                let ms = time_queries(config.runs, config.warmup, |k| {
                    Ok(query_brute_binary(&cb, &codes[k], config.top_k, Some(picks[k]))?.len())
                })?;
                summarize(ms, cb.heap_bytes())
            }
            BenchMethod::RealBruteForce => {
                let emb = RealEmbeddings::random(num_nodes, dim, config.seed)?;
                let rows: Vec<Vec<f32>> = picks.iter().map(|&i| emb.row(i).to_vec()).collect();
                let ms = time_queries(config.runs, config.warmup, |k| {
                    Ok(query_brute_real(&emb, &rows[k], config.top_k, Some(picks[k]))?.len())
                })?;
                summarize(ms, emb.heap_bytes())
            }
        };
        reports.push(report(outcome));
    }
    Ok(reports)
}

fn probe_allocation(bytes: usize) -> Result<()> {
    let mut v: Vec<u8> = Vec::new();
    v.try_reserve_exact(bytes).map_err(|_| Error::OutOfMemory(bytes))
}

/// `method  N  d  mean_ms  median_ms  peak_mb`, with `OOM` or `n/a` in the
/// measurement columns when nothing was timed.
pub fn write_bench_tsv<W: Write>(mut w: W, reports: &[BenchReport]) -> Result<()> {
    writeln!(w, "method\tN\td\tmean_ms\tmedian_ms\tpeak_mb")?;
    for r in reports {
        match &r.outcome {
            BenchOutcome::Measured {
                mean_ms,
                median_ms,
                peak_mb,
                ..
            } => writeln!(w, "{}\t{}\t{}\t{mean_ms:.4}\t{median_ms:.4}\t{peak_mb:.1}", r.method, r.num_nodes, r.dim)?,
            BenchOutcome::OutOfMemory => writeln!(w, "{}\t{}\t{}\tOOM\tOOM\tOOM", r.method, r.num_nodes, r.dim)?,
            BenchOutcome::Unsupported(_) => writeln!(w, "{}\t{}\t{}\tn/a\tn/a\tn/a", r.method, r.num_nodes, r.dim)?,
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_reports_everything() {
        let config = BenchConfig {
            runs: 10,
            ..BenchConfig::default()
        };
        let reports = bench_retrieval(&BenchMethod::ALL, 2000, 32, &config).unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            match r.outcome {
                BenchOutcome::Measured { mean_ms, median_ms, .. } => assert!(mean_ms > 0.0 && median_ms > 0.0),
                ref other => panic!("unexpected {other:?}"),
            }
        }
        let mut buf = Vec::new();
        write_bench_tsv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("method\tN\td\tmean_ms\tmedian_ms\tpeak_mb\nhash\t2000\t32\t"));
    }

    #[test]
    fn limits() {
        let config = BenchConfig {
            runs: 10,
            memory_limit: 1000,
            ..BenchConfig::default()
        };
        let r = bench_retrieval(&[BenchMethod::RealBruteForce, BenchMethod::Hash], 1000, 100, &config).unwrap();
        assert_eq!(r[0].outcome, BenchOutcome::OutOfMemory);
        assert!(matches!(r[1].outcome, BenchOutcome::Unsupported(_)));
        assert!(bench_retrieval(&[BenchMethod::Hash], 10, 8, &BenchConfig { runs: 9, ..config }).is_err());
    }

    #[test]
    fn method_names() {
        for m in BenchMethod::ALL {
            assert_eq!(m.name().parse::<BenchMethod>().unwrap(), m);
        }
        assert!("fast".parse::<BenchMethod>().is_err());
    }
}
