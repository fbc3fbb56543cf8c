//! Seeded Monte Carlo experiment driver.
//!
//! Trials are keyed by (n, trial index): each trial derives its own seed
//! from the master seed, so results never depend on scheduling. Records
//! come back sorted by (n, trial) and serialize to CSV byte-identically
//! across thread counts as long as timing is left off.

use crate::exact::exact_block_twins;
use crate::heur::{build_block_graph, default_block_size, es_split_twins, matching_twins, BlockMode, MatchingStrategy};
use crate::perm::{pattern_key, verify_twin_pair, PatternKey, Permutation, TwinPair};
use crate::rng::{derive_trial_seed, random_permutation};
use crate::tight::tight_twins_scan;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Exhaustive block-twin evaluation is quadratic in the worst case; this
/// cap keeps a single trial comfortably under a second.
pub const BT_EXACT_LIMIT: usize = 200_000;

/// Tight-twin profiles branch over balanced splits of every window, which
/// is only tractable for short hosts.
pub const TT_PROFILE_LIMIT: usize = 40;

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("cost guard: stat {stat} refuses n = {n} (limit {limit})")]
    CostGuard { stat: String, n: usize, limit: usize },
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("log-log fit needs at least {needed} distinct sizes, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
    #[error("log-log fit needs positive means")]
    NonpositiveMean,
}

/// Statistic evaluated per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    /// Twin length from the block-graph matching heuristic.
    MatchingLen,
    /// Twin length from splitting the longest monotone subsequence.
    EsLen,
    /// Exact longest block twins.
    BtExact,
    /// Longest tight twins over all windows.
    TtProfile,
    /// Edge count of the block graph.
    EdgeCount,
    /// Maximum degree of the block graph.
    MaxDegree,
}

impl fmt::Display for StatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StatKind::MatchingLen => "matching_len",
            StatKind::EsLen => "es_len",
            StatKind::BtExact => "bt_exact",
            StatKind::TtProfile => "tt_profile",
            StatKind::EdgeCount => "edge_count",
            StatKind::MaxDegree => "max_degree",
        };
        f.write_str(name)
    }
}

fn default_trials() -> usize {
    1
}

fn default_c() -> f64 {
    3.0
}

fn default_strategy() -> MatchingStrategy {
    MatchingStrategy::Maximum
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub stat: StatKind,
    /// Permutation sizes to sample, each at least 4.
    pub ns: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Block size override for graph-based statistics; derived from
    /// `block_mode` and `c` when absent.
    #[serde(default)]
    pub a: Option<usize>,
    #[serde(default)]
    pub block_mode: BlockMode,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_strategy")]
    pub strategy: MatchingStrategy,
    /// Record wall-clock millis per trial. Off by default so output stays
    /// byte-identical across thread counts.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub stat: StatKind,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub value: f64,
    pub millis: f64,
}

fn check_guards(cfg: &ExperimentConfig) -> Result<(), ExperimentError> {
    if cfg.trials == 0 {
        return Err(ExperimentError::BadConfig(
            "trials must be at least 1".to_string(),
        ));
    }
    if cfg.ns.is_empty() {
        return Err(ExperimentError::BadConfig(
            "at least one permutation size is required".to_string(),
        ));
    }
    let limit = match cfg.stat {
        StatKind::BtExact => Some(BT_EXACT_LIMIT),
        StatKind::TtProfile => Some(TT_PROFILE_LIMIT),
        _ => None,
    };
    for &n in &cfg.ns {
        if n < 4 {
            return Err(ExperimentError::BadConfig(format!(
                "permutation sizes must be at least 4, got {n}"
            )));
        }
        if let Some(limit) = limit {
            if n > limit {
                return Err(ExperimentError::CostGuard {
                    stat: cfg.stat.to_string(),
                    n,
                    limit,
                });
            }
        }
    }
    Ok(())
}

fn verified_len(p: &Permutation, pair: &TwinPair) -> f64 {
    assert!(
        verify_twin_pair(p, pair).unwrap_or(false),
        "statistic produced an invalid twin witness"
    );
    pair.len() as f64
}

fn eval_stat(cfg: &ExperimentConfig, p: &Permutation) -> f64 {
    let n = p.len();
    let a = cfg
        .a
        .unwrap_or_else(|| default_block_size(n, cfg.block_mode, cfg.c));
    match cfg.stat {
        StatKind::MatchingLen => {
            let pair = matching_twins(p, Some(a), cfg.strategy).expect("block size was validated");
            if pair.is_empty() {
                0.0
            } else {
                verified_len(p, &pair)
            }
        }
        StatKind::EsLen => {
            let pair = es_split_twins(p);
            if pair.is_empty() {
                0.0
            } else {
                verified_len(p, &pair)
            }
        }
        StatKind::BtExact => {
            let result = exact_block_twins(p);
            if let Some((s1, s2)) = result.starts {
                let k = result.length as u32;
                let pair = TwinPair {
                    first: (s1..s1 + k).collect(),
                    second: (s2..s2 + k).collect(),
                };
                assert!(
                    verify_twin_pair(p, &pair).unwrap_or(false),
                    "block windows failed twin verification"
                );
            }
            result.length as f64
        }
        StatKind::TtProfile => {
            let report = tight_twins_scan(p);
            if let Some(w) = &report.witness {
                assert!(
                    verify_twin_pair(p, &w.pair).unwrap_or(false),
                    "tight witness failed twin verification"
                );
            }
            report.max_length as f64
        }
        StatKind::EdgeCount => {
            let g = build_block_graph(p, a).expect("block size was validated");
            g.edges.len() as f64
        }
        StatKind::MaxDegree => {
            let g = build_block_graph(p, a).expect("block size was validated");
            g.max_degree() as f64
        }
    }
}

/// Run every (n, trial) cell with hosts drawn by `host`, in parallel, and
/// return records sorted by (n, trial). `host` receives the size and the
/// per-trial seed; substituting a fixed permutation is the supported
/// testing hook.
pub fn run_trials_with<F>(
    cfg: &ExperimentConfig,
    host: F,
) -> Result<Vec<TrialRecord>, ExperimentError>
where
    F: Fn(usize, u64) -> Permutation + Sync,
{
    check_guards(cfg)?;
    for &n in &cfg.ns {
        // Graph-based statistics validate the block size eagerly so a bad
        // override fails before any trial runs.
        if matches!(
            cfg.stat,
            StatKind::MatchingLen | StatKind::EdgeCount | StatKind::MaxDegree
        ) {
            if let Some(a) = cfg.a {
                if a == 0 || a > n {
                    return Err(ExperimentError::BadConfig(format!(
                        "block size {a} is invalid for n = {n}"
                    )));
                }
            }
        }
    }
    let jobs: Vec<(usize, usize)> = cfg
        .ns
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let mut records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let seed = derive_trial_seed(cfg.seed, n, trial);
            let started = std::time::Instant::now();
            let p = host(n, seed);
            assert_eq!(p.len(), n, "host generator returned the wrong size");
            let value = eval_stat(cfg, &p);
            let millis = if cfg.timing {
                started.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            TrialRecord {
                stat: cfg.stat,
                n,
                trial,
                seed,
                value,
                millis,
            }
        })
        .collect();
    records.sort_by_key(|r| (r.n, r.trial));
    Ok(records)
}

/// Run the experiment on uniformly random permutations.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, ExperimentError> {
    run_trials_with(cfg, random_permutation)
}

/// CSV serialization: fixed header, LF line endings, floats with 17
/// significant digits so records survive a round trip exactly.
pub fn to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("stat,n,trial,seed,value,millis\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e}\n",
            r.stat, r.n, r.trial, r.seed, r.value, r.millis
        ));
    }
    out
}

/// Group records by n and return (n, mean value) pairs sorted by n.
pub fn mean_by_n(records: &[TrialRecord]) -> Vec<(f64, f64)> {
    let mut sums: Vec<(usize, f64, usize)> = Vec::new();
    for r in records {
        match sums.iter_mut().find(|(n, _, _)| *n == r.n) {
            Some((_, sum, count)) => {
                *sum += r.value;
                *count += 1;
            }
            None => sums.push((r.n, r.value, 1)),
        }
    }
    sums.sort_by_key(|&(n, _, _)| n);
    sums.into_iter()
        .map(|(n, sum, count)| (n as f64, sum / count as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Sum of squared residuals in log space.
    pub residual: f64,
}

/// Least-squares fit of ln(mean) against ln(n). Needs at least three
/// distinct sizes and strictly positive means.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit, ExperimentError> {
    let mut xs: Vec<f64> = points.iter().map(|&(n, _)| n).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("sizes are finite"));
    xs.dedup();
    if xs.len() < 3 {
        return Err(ExperimentError::NotEnoughPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    if points.iter().any(|&(n, y)| n <= 0.0 || y <= 0.0) {
        return Err(ExperimentError::NonpositiveMean);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, y)| (n.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mean_x = logs.iter().map(|&(x, _)| x).sum::<f64>() / m;
    let mean_y = logs.iter().map(|&(_, y)| y).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|&(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|&(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = logs
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(LogLogFit {
        slope,
        intercept,
        residual,
    })
}

/// Observed mean block-twin length divided by the 2 ln n / ln ln n growth
/// benchmark. Requires n >= 16 so the denominator is safely positive.
pub fn theory_ratio_bt(n: usize, observed: f64) -> f64 {
    assert!(n >= 16, "benchmark ratio needs n >= 16, got {n}");
    let ln_n = (n as f64).ln();
    observed / (2.0 * ln_n / ln_n.ln())
}

/// First pattern collision among the floor(n/k) disjoint length-k blocks,
/// as one-based start positions. With floor(n/k) > k! a collision is
/// guaranteed; otherwise None reports that none exists.
pub fn pigeonhole_block_finder(p: &Permutation, k: usize) -> Option<(u32, u32)> {
    if k == 0 || k > p.len() {
        return None;
    }
    let values = p.as_slice();
    let mut seen: HashMap<PatternKey, usize> = HashMap::new();
    for b in 0..p.len() / k {
        let block = &values[b * k..(b + 1) * k];
        let key = pattern_key(block).expect("block of distinct entries");
        match seen.get(&key) {
            Some(&b0) => return Some(((b0 * k + 1) as u32, (b * k + 1) as u32)),
            None => {
                seen.insert(key, b);
            }
        }
    }
    None
}
