//! Acceptance criteria, one test each. Every test writes a single
//! `ACCEPTANCE <id> PASS|FAIL ...` line to stderr (bypassing the test
//! harness capture) before asserting.
//!
//! The tests share a lock so that timings and runtimes are measured without
//! interference from each other.

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use graphhash::eval::{bench_retrieval, map_eval, BenchConfig, BenchMethod, EvalConfig};
use graphhash::graph::split;
use graphhash::model::{
    gradients, hamming_variance, loss_clt, loss_mean, sample_loss, train, Approximation, NoiseDistribution, NoiseSpec,
    QuadratureSpec, Sample,
};
use graphhash::observables::{heldout_auc, rerank, train_observable, FeatureSpec, Kernel, ObservableConfig, RerankBudget};
use graphhash::retrieval::{discretize, query_brute_binary, LshQuantizer, RealEmbeddings};
use graphhash::synthetic::planted_partition;
use graphhash::{BernoulliModel, BinaryCodebook, Directedness, Graph, HashIndex, NodeId, SplitGraph, TrainConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: &str, pass: bool, detail: String) {
    let line = format!("ACCEPTANCE {id} {} {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {id} failed: {detail}");
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Graph::from_edges(n, Directedness::Undirected, edges).unwrap().0
}

fn random_model(rng: &mut ChaCha8Rng, n: usize, d: usize, logit_range: f64) -> BernoulliModel {
    let logits = (0..n * d).map(|_| rng.random_range(-logit_range..logit_range)).collect();
    BernoulliModel::from_logits(n, d, logits, rng.random_range(-2.0..-0.5), rng.random_range(-1.0..1.0)).unwrap()
}

fn with_params(model: &BernoulliModel, logits: Vec<f64>, scale: f64, bias: f64) -> BernoulliModel {
    BernoulliModel::from_logits(model.num_nodes(), model.dim(), logits, scale, bias).unwrap()
}

#[test]
fn criterion_01_gradients_match_finite_differences() {
    let _guard = serial();
    let start = Instant::now();
    let n = 20;
    let noise = NoiseDistribution::new(&NoiseSpec::uniform(2), &complete(n)).unwrap();
    let approxes = [
        ("mean", Approximation::Mean),
        ("clt1", Approximation::Clt(QuadratureSpec::new(1).unwrap())),
        ("clt3", Approximation::Clt(QuadratureSpec::new(3).unwrap())),
        ("clt5", Approximation::Clt(QuadratureSpec::new(5).unwrap())),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for instance in 0..100 {
        let d = [4, 10, 25][instance % 3];
        let model = random_model(&mut rng, n, d, 2.0);
        let batch: Vec<Sample> = (0..3)
            .map(|_| {
                let i = rng.random_range(0..n);
                let j = (i + rng.random_range(1..n)) % n;
                Sample::new(i, j, (0..2).map(|_| rng.random_range(0..n)).collect())
            })
            .collect();
        for (_, approx) in &approxes {
            let (_, g) = gradients(&model, &batch, &noise, approx).unwrap();
            let loss = |m: &BernoulliModel| -> f64 { batch.iter().map(|s| sample_loss(m, s, &noise, approx, None).unwrap()).sum() };
            let h = 1e-5;
            let mut analytic = Vec::new();
            let mut numeric = Vec::new();
            for idx in 0..n * d {
                let mut plus = model.logits().to_vec();
                let mut minus = plus.clone();
                plus[idx] += h;
                minus[idx] -= h;
                let fd = (loss(&with_params(&model, plus, model.scale(), model.bias()))
                    - loss(&with_params(&model, minus, model.scale(), model.bias())))
                    / (2.0 * h);
                numeric.push(fd);
                analytic.push(g.row(idx / d).map_or(0.0, |r| r[idx % d]));
            }
            let logits = model.logits().to_vec();
            numeric.push(
                (loss(&with_params(&model, logits.clone(), model.scale() + h, model.bias()))
                    - loss(&with_params(&model, logits.clone(), model.scale() - h, model.bias())))
                    / (2.0 * h),
            );
            analytic.push(g.scale);
            numeric.push(
                (loss(&with_params(&model, logits.clone(), model.scale(), model.bias() + h))
                    - loss(&with_params(&model, logits, model.scale(), model.bias() - h)))
                    / (2.0 * h),
            );
            analytic.push(g.bias);
            let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
            let rel = norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-12);
            worst = worst.max(rel);
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "1",
        worst <= 1e-4 && secs < 30.0,
        format!("{checked} gradient checks, worst relative error {worst:.2e} (<= 1e-4), {secs:.1}s (< 30s)"),
    );
}

/// Expected loss over the exact discrete distance, estimated by sampling both
/// bit vectors.
fn monte_carlo_loss(model: &BernoulliModel, i: NodeId, j: NodeId, k: NodeId, ln_q: f64, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let d = model.dim();
    let p = |r: NodeId| model.probabilities(r);
    let histogram = |a: &[f64], b: &[f64], rng: &mut ChaCha8Rng| {
        let mut counts = vec![0usize; d + 1];
        for _ in 0..samples {
            let mut dist = 0;
            for t in 0..d {
                let x = rng.random::<f64>() < a[t];
                let y = rng.random::<f64>() < b[t];
                dist += (x != y) as usize;
            }
            counts[dist] += 1;
        }
        counts
    };
    let (pi, pj, pk) = (p(i), p(j), p(k));
    let pos = histogram(&pi, &pj, rng);
    let neg = histogram(&pi, &pk, rng);
    let score = |dist: usize| model.scale() * dist as f64 + model.bias();
    let expect = |counts: &[usize], f: &dyn Fn(f64) -> f64| -> f64 {
        counts.iter().enumerate().map(|(dist, &c)| c as f64 * f(score(dist))).sum::<f64>() / samples as f64
    };
    expect(&pos, &|s| softplus(ln_q - s)) + expect(&neg, &|s| softplus(s - ln_q))
}

#[test]
fn criterion_02_quadrature_beats_mean_against_monte_carlo() {
    let _guard = serial();
    let start = Instant::now();
    let (n, d) = (3, 10);
    let noise = NoiseDistribution::new(&NoiseSpec::uniform(1), &complete(n)).unwrap();
    let ln_q = (1.0 / n as f64).ln();
    let quad = QuadratureSpec::new(5).unwrap();
    let per_model: Vec<(f64, f64)> = (0..100u64)
        .into_par_iter()
        .map(|m| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + m);
            let model = random_model(&mut rng, n, d, 2.0);
            let truth = monte_carlo_loss(&model, 0, 1, 2, ln_q, 1_000_000, &mut rng);
            let clt = loss_clt(&model, (0, 1), 2, &noise, &quad).unwrap();
            let mean = loss_mean(&model, (0, 1), 2, &noise).unwrap();
            ((clt - truth).abs(), (mean - truth).abs())
        })
        .collect();
    let clt_err = per_model.iter().map(|e| e.0).sum::<f64>() / 100.0;
    let mean_err = per_model.iter().map(|e| e.1).sum::<f64>() / 100.0;
    let secs = start.elapsed().as_secs_f64();
    verdict(
        "2",
        clt_err < mean_err && secs < 300.0,
        format!("mean |L_clt5 - L_true| = {clt_err:.5} vs mean |L_mean - L_true| = {mean_err:.5} over 100 models, {secs:.1}s (< 300s)"),
    );
}

#[test]
fn criterion_03_degenerate_quadrature_equals_mean() {
    let _guard = serial();
    let n = 20;
    let noise = NoiseDistribution::new(&NoiseSpec::uniform(1), &complete(n)).unwrap();
    let q1 = QuadratureSpec::new(1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_q1 = 0.0f64;
    for t in 0..1000 {
        let d = 1 + t % 40;
        let model = random_model(&mut rng, n, d, 4.0);
        let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        let a = loss_clt(&model, (i, j), k, &noise, &q1).unwrap();
        let b = loss_mean(&model, (i, j), k, &noise).unwrap();
        worst_q1 = worst_q1.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
    }
    // Saturated logits give p in {0, 1} exactly, hence σ = 0.
    let mut sigma_zero_mismatches = 0;
    for _ in 0..200 {
        let d = rng.random_range(1..30);
        let logits = (0..n * d).map(|_| if rng.random_bool(0.5) { 800.0 } else { -800.0 }).collect();
        let model = BernoulliModel::from_logits(n, d, logits, rng.random_range(-2.0..-0.1), rng.random_range(-1.0..1.0)).unwrap();
        let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        assert_eq!(hamming_variance(&model.probabilities(i), &model.probabilities(j)).unwrap(), 0.0);
        let base = loss_mean(&model, (i, j), k, &noise).unwrap();
        for points in 1..=9 {
            let q = QuadratureSpec::new(points).unwrap();
            if loss_clt(&model, (i, j), k, &noise, &q).unwrap() != base {
                sigma_zero_mismatches += 1;
            }
        }
    }
    verdict(
        "3",
        worst_q1 <= f64::EPSILON && sigma_zero_mismatches == 0,
        format!("Q=1 worst relative gap {worst_q1:.1e} over 1000 inputs; sigma=0 mismatches {sigma_zero_mismatches}/1800"),
    );
}

#[test]
fn criterion_04_normalized_distance_concentrates() {
    let _guard = serial();
    let samples = 2000;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut empirical = Vec::new();
    let mut analytic = Vec::new();
    for d in [10usize, 100, 1000] {
        let mut emp_sum = 0.0;
        let mut ana_sum = 0.0;
        for _ in 0..50 {
            let p: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let q: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let cb = BinaryCodebook::from_fn(2 * samples, d, |row, k| rng.random::<f64>() < if row % 2 == 0 { p[k] } else { q[k] })
                .unwrap();
            let x: Vec<f64> = (0..samples).map(|s| cb.hamming(2 * s, 2 * s + 1).unwrap() as f64 / d as f64).collect();
            let m = x.iter().sum::<f64>() / samples as f64;
            emp_sum += x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (samples - 1) as f64;
            ana_sum += hamming_variance(&p, &q).unwrap() / (d * d) as f64;
        }
        empirical.push(emp_sum / 50.0);
        analytic.push(ana_sum / 50.0);
    }
    let decreasing = empirical.windows(2).all(|w| w[1] < w[0]);
    let worst = empirical
        .iter()
        .zip(&analytic)
        .map(|(e, a)| (e - a).abs() / a)
        .fold(0.0f64, f64::max);
    verdict(
        "4",
        decreasing && worst <= 0.05,
        format!(
            "Var(D/d) at d=10,100,1000: {:.3e} {:.3e} {:.3e} (analytic {:.3e} {:.3e} {:.3e}), worst relative gap {:.3}",
            empirical[0], empirical[1], empirical[2], analytic[0], analytic[1], analytic[2], worst
        ),
    );
}

#[test]
fn criterion_05_hash_index_matches_brute_force() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatched_queries = 0;
    let mut queries = 0;
    for c in 0..200u64 {
        let n = rng.random_range(1..=256);
        let d = rng.random_range(1..=12);
        let cb = BinaryCodebook::random(n, d, c).unwrap();
        let index = HashIndex::build(&cb).unwrap();
        for q in 0..n {
            let hashed = index.query(cb.code(q).unwrap(), 1 << d, n, Some(q));
            let brute = query_brute_binary(&cb, cb.row(q), n, Some(q)).unwrap();
            let same = hashed.iter().map(|h| h.node).eq(brute.iter().map(|h| h.node));
            mismatched_queries += (!same) as usize;
            queries += 1;
        }
    }
    // Every pair of codes of every width up to 16; the row index is the code.
    let popcount_mismatches: usize = (1..=16usize)
        .map(|d| {
            let size = 1usize << d;
            let cb = BinaryCodebook::from_fn(size, d, |row, k| (row >> k) & 1 == 1).unwrap();
            (0..size)
                .into_par_iter()
                .map(|i| {
                    (0..size)
                        .filter(|&j| {
                            let naive = (0..d).filter(|&k| (i >> k) & 1 != (j >> k) & 1).count() as u32;
                            cb.hamming(i, j).unwrap() != naive
                        })
                        .count()
                })
                .sum::<usize>()
        })
        .sum();
    verdict(
        "5",
        mismatched_queries == 0 && popcount_mismatches == 0,
        format!(
            "{mismatched_queries}/{queries} hash-vs-brute rankings differ; {popcount_mismatches} popcount mismatches over all code pairs with d <= 16"
        ),
    );
}

struct PlantedRun {
    hash_map: f64,
    rerank_map: f64,
    random_map: f64,
    random_sem: f64,
    auc: f64,
    train_secs: f64,
}

fn planted_run() -> &'static PlantedRun {
    static RUN: OnceLock<PlantedRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let g = planted_partition(200, 4, 0.2, 0.01, 0).unwrap();
        let s: SplitGraph = split(&g, 0.05, 0).unwrap();
        let config = TrainConfig {
            dim: 16,
            epochs: 60,
            learning_rate: 0.1,
            noise: NoiseSpec::uniform(5),
            ..TrainConfig::default()
        };
        let model = train(&s, &config).unwrap().model;
        let codes = discretize(&model);
        let index = HashIndex::build(&codes).unwrap();
        let eval = EvalConfig::default();
        let budget = RerankBudget::default();
        let shortlist = |q: NodeId, cap: usize| -> Vec<NodeId> {
            index
                .query(codes.code(q).unwrap(), budget.location_budget, cap, Some(q))
                .into_iter()
                .map(|h| h.node)
                .collect()
        };
        let hash_map = map_eval(|q, depth| Ok(shortlist(q, depth)), &s, &eval).unwrap().map;
        let train_secs = start.elapsed().as_secs_f64();

        let spec = FeatureSpec::new(vec![Kernel::Aa, Kernel::PowHalf, Kernel::PowThree]).unwrap();
        let observable = train_observable(&s, &spec, &ObservableConfig::default()).unwrap();
        let rerank_map = map_eval(
            |q, _| Ok(rerank(&s.train, q, &shortlist(q, budget.candidate_cap), &observable, &budget)?.into_iter().map(|p| p.0).collect()),
            &s,
            &eval,
        )
        .unwrap()
        .map;
        let auc = heldout_auc(&observable, &s, 1000, 0).unwrap();

        // Monte Carlo baseline: uniformly shuffled rankings.
        let trials: Vec<f64> = (0..200u64)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(10_000 + t);
                map_eval(
                    |q, _| {
                        let mut all: Vec<NodeId> = (0..s.num_nodes()).filter(|&v| v != q).collect();
                        all.shuffle(&mut rng);
                        Ok(all)
                    },
                    &s,
                    &eval,
                )
                .unwrap()
                .map
            })
            .collect();
        let random_map = trials.iter().sum::<f64>() / trials.len() as f64;
        let var = trials.iter().map(|m| (m - random_map).powi(2)).sum::<f64>() / (trials.len() - 1) as f64;
        PlantedRun {
            hash_map,
            rerank_map,
            random_map,
            random_sem: (var / trials.len() as f64).sqrt(),
            auc,
            train_secs,
        }
    })
}

#[test]
fn criterion_06_planted_partition_beats_random_fivefold() {
    let _guard = serial();
    let run = planted_run();
    let ratio = run.hash_map / run.random_map;
    verdict(
        "6",
        ratio >= 5.0 && run.train_secs < 120.0,
        format!(
            "hash MAP {:.4} vs random MAP {:.4} (+/- {:.4}): ratio {ratio:.2} (>= 5), train+eval {:.1}s (< 120s)",
            run.hash_map, run.random_map, run.random_sem, run.train_secs
        ),
    );
}

#[test]
fn criterion_07_reranking_helps() {
    let _guard = serial();
    let run = planted_run();
    let helps = run.rerank_map >= run.hash_map;
    verdict(
        "7",
        helps && run.auc > 0.8,
        format!(
            "reranked MAP {:.4} vs hash MAP {:.4} ({}); observable held-out AUC {:.4} (> 0.8)",
            run.rerank_map,
            run.hash_map,
            if helps { "ok" } else { "worse" },
            run.auc
        ),
    );
}

fn bench_mean(method: BenchMethod, n: usize, d: usize) -> Option<f64> {
    let config = BenchConfig {
        runs: 30,
        warmup: 5,
        ..BenchConfig::default()
    };
    bench_retrieval(&[method], n, d, &config).unwrap()[0].mean_ms()
}

#[test]
fn criterion_08_latency_trends() {
    let _guard = serial();
    let hash_small = bench_mean(BenchMethod::Hash, 100_000, 32).unwrap();
    let hash_large = bench_mean(BenchMethod::Hash, 1_000_000, 32).unwrap();
    let hash_ratio = hash_large / hash_small;
    let a = (0.5..=2.0).contains(&hash_ratio);

    let binary = bench_mean(BenchMethod::BinaryBruteForce, 100_000, 100).unwrap();
    let real = bench_mean(BenchMethod::RealBruteForce, 100_000, 100).unwrap();
    let speedup = real / binary;
    let b = speedup >= 5.0;

    let sizes = [100_000, 1_000_000, 10_000_000];
    let times: Vec<Option<f64>> = sizes.iter().map(|&n| bench_mean(BenchMethod::BinaryBruteForce, n, 100)).collect();
    let ratios: Vec<f64> = times.windows(2).filter_map(|w| Some(w[1]? / w[0]?)).collect();
    let c = !ratios.is_empty() && ratios.iter().all(|r| (5.0..=20.0).contains(r));
    let fmt = |t: &Option<f64>| t.map_or("OOM".to_string(), |v| format!("{v:.3}ms"));

    verdict(
        "8",
        a && b && c,
        format!(
            "(a) hash N=1e5 {hash_small:.4}ms, N=1e6 {hash_large:.4}ms, ratio {hash_ratio:.2} in [0.5, 2]: {a}; \
             (b) d=100 N=1e5 binary {binary:.3}ms vs real {real:.3}ms, speedup {speedup:.1} (>= 5): {b}; \
             (c) binary brute N=1e5/1e6/1e7 {} {} {}, ratios {ratios:.2?} in [5, 20]: {c}",
            fmt(&times[0]),
            fmt(&times[1]),
            fmt(&times[2])
        ),
    );
}

#[test]
fn criterion_09_lsh_disagreement_matches_angle() {
    let _guard = serial();
    let bits = 10_000;
    let source_dim = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for pair in 0..50u64 {
        let mut values: Vec<f32> = (0..2 * source_dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        // Mix the second vector toward the first to cover small angles too.
        let mix = rng.random_range(0.0f32..1.0);
        for k in 0..source_dim {
            values[source_dim + k] = mix * values[k] + (1.0 - mix) * values[source_dim + k];
        }
        let emb = RealEmbeddings::new(2, source_dim, values).unwrap();
        let (x, y) = (emb.row(0), emb.row(1));
        let dot: f64 = x.iter().zip(y).map(|(a, b)| *a as f64 * *b as f64).sum();
        let norm = |v: &[f32]| v.iter().map(|a| (*a as f64).powi(2)).sum::<f64>().sqrt();
        let angle = (dot / (norm(x) * norm(y))).clamp(-1.0, 1.0).acos();
        let codes = LshQuantizer::new(source_dim, bits, pair).unwrap().quantize(&emb).unwrap();
        let fraction = codes.hamming(0, 1).unwrap() as f64 / bits as f64;
        worst = worst.max((fraction - angle / std::f64::consts::PI).abs());
    }
    verdict(
        "9",
        worst <= 0.02,
        format!("worst |disagreement - angle/pi| over 50 pairs at {bits} hyperplanes: {worst:.4} (<= 0.02)"),
    );
}

fn graphhash(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_graphhash"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success(), "graphhash {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn files(dir: &Path) -> HashMap<PathBuf, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (PathBuf::from(p.file_name().unwrap()), std::fs::read(&p).unwrap())
        })
        .collect()
}

#[test]
fn criterion_10_manifests_reproduce_outputs() {
    let _guard = serial();
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    // (subcommand, flags, output whose manifest replays the step)
    let steps: &[(&str, &[&str], &str)] = &[
        ("synth", &["--output", "g.tsv", "--nodes", "120", "--seed", "3"], "g.tsv"),
        ("split", &["--input", "g.tsv", "--output", "s", "--seed", "4"], "s"),
        ("train", &["--input", "s", "--output", "m.bin", "--dim", "12", "--epochs", "5"], "m.bin"),
        ("train", &["--input", "s", "--output", "r.bin", "--dim", "6", "--epochs", "3", "--objective", "distemb_l2"], "r.bin"),
        ("export-codes", &["--model", "m.bin", "--output", "c.bin"], "c.bin"),
        ("export-codes", &["--model", "r.bin", "--output", "rc.bin", "--lsh-bits", "24", "--lsh-seed", "2"], "rc.bin"),
        ("index", &["--codes", "c.bin", "--output", "i.tsv"], "i.tsv"),
        ("query", &["--codes", "c.bin", "--index", "i.tsv", "--vocab", "s.vocab", "--node", "7", "--output", "q.tsv"], "q.tsv"),
        ("query", &["--mode", "real", "--model", "r.bin", "--node", "7", "--output", "qr.tsv"], "qr.tsv"),
        ("rerank-train", &["--input", "s", "--output", "o.csv", "--epochs", "50"], "o.csv"),
        ("eval", &["--input", "s", "--codes", "c.bin", "--output", "e.tsv"], "e.tsv"),
        ("eval", &["--input", "s", "--method", "rerank", "--codes", "c.bin", "--observable", "o.csv", "--output", "er.tsv"], "er.tsv"),
        ("eval", &["--input", "s", "--method", "real", "--model", "r.bin", "--output", "ereal.tsv"], "ereal.tsv"),
    ];
    for (sub, flags, _) in steps {
        let mut args = vec![*sub];
        args.extend_from_slice(flags);
        graphhash(first.path(), &args);
    }
    for (sub, _, output) in steps {
        let manifest = format!("{output}.manifest");
        std::fs::copy(first.path().join(&manifest), second.path().join(&manifest)).unwrap();
        graphhash(second.path(), &[sub, "--config", &manifest]);
    }
    let a = files(first.path());
    let b = files(second.path());
    let mut differing: Vec<_> = a.keys().filter(|k| b.get(*k) != a.get(*k)).cloned().collect();
    differing.extend(b.keys().filter(|k| !a.contains_key(*k)).cloned());
    differing.sort();
    verdict(
        "10",
        differing.is_empty(),
        format!("{} files from {} subcommand runs replayed from manifests; differing: {differing:?}", a.len(), steps.len()),
    );
}
