//! Command-line front end: every library operation behind one binary with
//! stable JSON/CSV output and CI-friendly exit codes.
//!
//! Exit codes: 0 success, 1 property violated (a failed verification, a
//! certificate that does not hold, a collision that does not exist),
//! 2 usage error, 3 refusal on budget or cost-guard grounds.

use clap::{Parser, Subcommand, ValueEnum};
use permtwin_core::cert::{
    edge_prob_asymptotic, edge_prob_exact, gawron_certificate, lll_block_instance_n,
    lll_symmetric_block, lll_tight_certificate, tau_certificate, CertError, Schedule,
};
use permtwin_core::exact::{
    exact_block_twins, exact_twins, exact_twins_avoiding, extremal_search, oracle_twins_3color,
    ExactError, ExactOutcome, ExtremalStat,
};
use permtwin_core::experiments::{
    pigeonhole_block_finder, run_trials, to_csv, ExperimentConfig, ExperimentError,
};
use permtwin_core::heur::{
    default_block_size, default_cprime, es_split_twins, matching_twins, BlockMode,
    MatchingStrategy,
};
use permtwin_core::perm::{parse_values, pattern_key, verify_twin_pair, Permutation, TwinPair};
use permtwin_core::tight::{tight_block_scan, tight_twins_scan, tight_window_split};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "permtwin",
    version,
    about = "Find, certify, and experiment with twins in permutations"
)]
struct Cli {
    /// Inline permutation in one-line notation, e.g. "6 1 4 7 3 9 8 2 5".
    #[arg(long, global = true)]
    perm: Option<String>,

    /// File holding the permutation in one-line notation.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Write machine output here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (overrides the PERMTWIN_THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format; csv applies to `mc` only (and is its default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Twin search on a host permutation.
    Twins {
        #[command(subcommand)]
        cmd: TwinsCmd,
    },
    /// Block twins (contiguous windows).
    Block {
        #[command(subcommand)]
        cmd: BlockCmd,
    },
    /// Tight twins (the union fills a window).
    Tight {
        #[command(subcommand)]
        cmd: TightCmd,
    },
    /// Tight block twins (adjacent windows).
    Tightblock {
        #[command(subcommand)]
        cmd: TightBlockCmd,
    },
    /// Minimum of a statistic over all n-permutations.
    Extremal {
        #[arg(long, value_enum)]
        stat: ExtremalArg,
        #[arg(long)]
        n: usize,
    },
    /// Numeric certificates.
    Cert {
        #[command(subcommand)]
        cmd: CertCmd,
    },
    /// Monte Carlo experiments from a JSON config (inline or a file path).
    Mc {
        #[arg(long)]
        config: String,
    },
    /// Check a twin pair against the host permutation.
    Verify {
        /// Pair JSON: {"first": [...], "second": [...]}, or any object
        /// with such a pair under a "pair" key (inline or a file path).
        #[arg(long)]
        pair: String,
    },
}

#[derive(Subcommand)]
enum TwinsCmd {
    /// Exact longest twins (needs --budget above 16 elements).
    Exact {
        /// Node budget for the bounded search.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Brute-force three-coloring reference (tiny hosts only).
    Oracle,
    /// Exact longest twins whose shape avoids a pattern.
    Avoiding {
        /// Forbidden pattern in one-line notation.
        #[arg(long)]
        tau: String,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Scalable heuristics.
    Heur {
        #[arg(long, value_enum)]
        method: HeurMethod,
        #[arg(long, value_enum, default_value_t = BlockModeArg::Plain)]
        block_mode: BlockModeArg,
        /// Block size override for the matching method.
        #[arg(long)]
        a: Option<usize>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Maximum)]
        strategy: StrategyArg,
        /// Degree cutoff for the truncated strategy.
        #[arg(long)]
        cprime: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HeurMethod {
    Es,
    Matching,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockModeArg {
    Plain,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Greedy,
    Maximum,
    Truncated,
}

#[derive(Subcommand)]
enum BlockCmd {
    /// Exact longest block twins.
    Exact,
    /// First pattern collision among the disjoint length-k blocks.
    Pigeonhole {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum TightCmd {
    /// Longest tight twins over all windows.
    Scan,
    /// Split the whole input (any distinct values) into tight twins.
    Split,
}

#[derive(Subcommand)]
enum TightBlockCmd {
    /// Longest pair of adjacent similar windows.
    Scan,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExtremalArg {
    T,
    Bt,
    Tt,
}

#[derive(Subcommand)]
enum CertCmd {
    /// First-moment bound on plain twins.
    Gawron {
        #[arg(long)]
        n: u64,
    },
    /// First-moment bound on pattern-avoiding twins.
    Tau {
        #[arg(long)]
        n: u64,
        /// Growth constant of the avoidance class.
        #[arg(long, default_value_t = 4.0)]
        c: f64,
    },
    /// Block-graph edge probability.
    Edgeprob {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, value_enum, default_value_t = EdgeMode::Exact)]
        mode: EdgeMode,
    },
    /// Symmetric local-lemma condition for block twins.
    LllBlock {
        #[arg(long)]
        k: u32,
        /// Host size; defaults to the tight instance floor((k-1)!/(4e)).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Segment-length local-lemma certificate for tight twins.
    LllTight {
        /// Schedule JSON (inline or a file path); defaults to the
        /// geometric (2/3)^s schedule.
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long, default_value_t = 13)]
        r_min: u32,
        #[arg(long, default_value_t = 10_000)]
        r_max: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EdgeMode {
    Exact,
    Asymptotic,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<ExactError> for Failure {
    fn from(e: ExactError) -> Self {
        // Every exact-search error is a size/budget refusal.
        fail(3, e.to_string())
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match &e {
            ExperimentError::CostGuard { .. } => fail(3, e.to_string()),
            _ => fail(2, e.to_string()),
        }
    }
}

impl From<CertError> for Failure {
    fn from(e: CertError) -> Self {
        fail(2, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("permtwin: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    init_threads(cli.threads)?;
    if let Some(Format::Csv) = cli.format {
        if !matches!(cli.cmd, Cmd::Mc { .. }) {
            return Err(fail(2, "csv output is only available for `mc`"));
        }
    }
    match &cli.cmd {
        Cmd::Twins { cmd } => run_twins(&cli, cmd),
        Cmd::Block { cmd } => run_block(&cli, cmd),
        Cmd::Tight { cmd } => run_tight(&cli, cmd),
        Cmd::Tightblock { cmd } => run_tightblock(&cli, cmd),
        Cmd::Extremal { stat, n } => run_extremal(&cli, *stat, *n),
        Cmd::Cert { cmd } => run_cert(&cli, cmd),
        Cmd::Mc { config } => run_mc(&cli, config),
        Cmd::Verify { pair } => run_verify(&cli, pair),
    }
}

fn init_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match flag {
        Some(t) => Some(t),
        None => match std::env::var("PERMTWIN_THREADS") {
            Ok(text) => Some(text.parse().map_err(|_| {
                fail(2, format!("PERMTWIN_THREADS is not a thread count: {text}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(fail(2, "thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| fail(2, format!("thread pool: {e}")))?;
    }
    Ok(())
}

/// Inline text or file contents: flag values starting with '{' are taken
/// verbatim, anything else is read as a path.
fn inline_or_file(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| fail(2, format!("cannot read {arg}: {e}")))
    }
}

fn host_text(cli: &Cli) -> Result<String, Failure> {
    match (&cli.perm, &cli.input) {
        (Some(text), None) => Ok(text.clone()),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display()))),
        (Some(_), Some(_)) => Err(fail(2, "give either --perm or --input, not both")),
        (None, None) => Err(fail(2, "this command needs a permutation: --perm or --input")),
    }
}

fn load_host(cli: &Cli) -> Result<Permutation, Failure> {
    Permutation::parse(&host_text(cli)?).map_err(|e| fail(2, e.to_string()))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, value: &serde_json::Value) -> Result<(), Failure> {
    emit(
        cli,
        &serde_json::to_string_pretty(value).expect("serializable value"),
    )
}

fn outcome_json(outcome: &ExactOutcome) -> serde_json::Value {
    serde_json::to_value(outcome).expect("serializable outcome")
}

fn run_twins(cli: &Cli, cmd: &TwinsCmd) -> Result<u8, Failure> {
    match cmd {
        TwinsCmd::Exact { budget } => {
            let p = load_host(cli)?;
            let outcome = exact_twins(&p, *budget)?;
            describe_outcome("twins exact", &outcome);
            emit_json(cli, &outcome_json(&outcome))?;
            Ok(0)
        }
        TwinsCmd::Oracle => {
            let p = load_host(cli)?;
            let length = oracle_twins_3color(&p)?;
            eprintln!("twins oracle: length {length}");
            emit_json(cli, &serde_json::json!({ "length": length }))?;
            Ok(0)
        }
        TwinsCmd::Avoiding { tau, budget } => {
            let p = load_host(cli)?;
            let tau = Permutation::parse(tau).map_err(|e| fail(2, format!("--tau: {e}")))?;
            let outcome = exact_twins_avoiding(&p, &tau, *budget)?;
            describe_outcome("twins avoiding", &outcome);
            let mut value = outcome_json(&outcome);
            value["tau"] = serde_json::to_value(&tau).expect("serializable");
            emit_json(cli, &value)?;
            Ok(0)
        }
        TwinsCmd::Heur {
            method,
            block_mode,
            a,
            strategy,
            cprime,
        } => {
            let p = load_host(cli)?;
            let (label, pair, extra) = match method {
                HeurMethod::Es => ("es", es_split_twins(&p), serde_json::json!({})),
                HeurMethod::Matching => {
                    let mode = match block_mode {
                        BlockModeArg::Plain => BlockMode::Plain,
                        BlockModeArg::Log => BlockMode::Log,
                    };
                    let size = a.unwrap_or_else(|| default_block_size(p.len(), mode, 3.0));
                    let strat = match strategy {
                        StrategyArg::Greedy => MatchingStrategy::Greedy,
                        StrategyArg::Maximum => MatchingStrategy::Maximum,
                        StrategyArg::Truncated => MatchingStrategy::Truncated {
                            cprime: cprime.unwrap_or_else(|| default_cprime(3.0)),
                        },
                    };
                    let pair =
                        matching_twins(&p, Some(size), strat).map_err(|e| fail(2, e.to_string()))?;
                    (
                        "matching",
                        pair,
                        serde_json::json!({
                            "a": size,
                            "strategy": serde_json::to_value(strat).expect("serializable"),
                        }),
                    )
                }
            };
            eprintln!("twins heur ({label}): length {}", pair.len());
            let mut value = serde_json::json!({
                "method": label,
                "length": pair.len(),
                "pair": serde_json::to_value(&pair).expect("serializable"),
            });
            if let Some(obj) = extra.as_object() {
                for (k, v) in obj {
                    value[k] = v.clone();
                }
            }
            emit_json(cli, &value)?;
            Ok(0)
        }
    }
}

fn describe_outcome(label: &str, outcome: &ExactOutcome) {
    match outcome {
        ExactOutcome::Optimal { length, .. } => eprintln!("{label}: optimal length {length}"),
        ExactOutcome::BestSoFar { length, upper, .. } => {
            eprintln!("{label}: budget exhausted, best found {length}, upper bound {upper}")
        }
    }
}

fn run_block(cli: &Cli, cmd: &BlockCmd) -> Result<u8, Failure> {
    let p = load_host(cli)?;
    match cmd {
        BlockCmd::Exact => {
            let result = exact_block_twins(&p);
            eprintln!("block exact: length {}", result.length);
            emit_json(cli, &serde_json::to_value(&result).expect("serializable"))?;
            Ok(0)
        }
        BlockCmd::Pigeonhole { k } => {
            let hit = pigeonhole_block_finder(&p, *k);
            let value = serde_json::json!({ "k": k, "starts": hit });
            emit_json(cli, &value)?;
            match hit {
                Some((s1, s2)) => {
                    eprintln!("block pigeonhole: collision at starts {s1} and {s2}");
                    Ok(0)
                }
                None => {
                    eprintln!("block pigeonhole: no collision among the length-{k} blocks");
                    Ok(1)
                }
            }
        }
    }
}

fn run_tight(cli: &Cli, cmd: &TightCmd) -> Result<u8, Failure> {
    match cmd {
        TightCmd::Scan => {
            let p = load_host(cli)?;
            let report = tight_twins_scan(&p);
            eprintln!("tight scan: max length {}", report.max_length);
            emit_json(cli, &serde_json::to_value(&report).expect("serializable"))?;
            Ok(0)
        }
        TightCmd::Split => {
            // Splitting makes sense for any window of distinct values, so
            // the input is not required to be a permutation. The emitted
            // host_pattern is one, for verify round trips.
            let values = parse_values(&host_text(cli)?).map_err(|e| fail(2, e.to_string()))?;
            let split = tight_window_split(&values).map_err(|e| fail(2, e.to_string()))?;
            let host_pattern = pattern_key(&values).expect("distinct values").0;
            let value = serde_json::json!({
                "pair": split,
                "host_pattern": host_pattern,
            });
            emit_json(cli, &value)?;
            match &split {
                Some(pair) => {
                    eprintln!("tight split: halves of length {}", pair.len());
                    Ok(0)
                }
                None => {
                    eprintln!("tight split: the window admits no balanced split");
                    Ok(1)
                }
            }
        }
    }
}

fn run_tightblock(cli: &Cli, cmd: &TightBlockCmd) -> Result<u8, Failure> {
    let TightBlockCmd::Scan = cmd;
    let p = load_host(cli)?;
    let result = tight_block_scan(&p);
    eprintln!("tightblock scan: length {}", result.length);
    emit_json(cli, &serde_json::to_value(&result).expect("serializable"))?;
    Ok(0)
}

fn run_extremal(cli: &Cli, stat: ExtremalArg, n: usize) -> Result<u8, Failure> {
    let stat = match stat {
        ExtremalArg::T => ExtremalStat::T,
        ExtremalArg::Bt => ExtremalStat::Bt,
        ExtremalArg::Tt => ExtremalStat::TtMax,
    };
    let result = extremal_search(n, stat, true)?;
    eprintln!(
        "extremal {stat}: minimum {} over {} evaluated permutations",
        result.value, result.examined
    );
    let mut value = serde_json::to_value(&result).expect("serializable");
    value["stat"] = serde_json::to_value(stat).expect("serializable");
    value["n"] = serde_json::json!(n);
    emit_json(cli, &value)?;
    Ok(0)
}

fn report_exit(cli: &Cli, report: &permtwin_core::cert::CertificateReport) -> Result<u8, Failure> {
    eprintln!(
        "cert {}: {} ({})",
        report.certificate,
        if report.overall { "holds" } else { "FAILS" },
        report.range
    );
    emit_json(cli, &serde_json::to_value(report).expect("serializable"))?;
    Ok(if report.overall { 0 } else { 1 })
}

fn run_cert(cli: &Cli, cmd: &CertCmd) -> Result<u8, Failure> {
    match cmd {
        CertCmd::Gawron { n } => report_exit(cli, &gawron_certificate(*n)),
        CertCmd::Tau { n, c } => {
            if *c <= 0.0 {
                return Err(fail(2, "--c must be positive"));
            }
            report_exit(cli, &tau_certificate(*n, *c))
        }
        CertCmd::Edgeprob { n, a, mode } => {
            let value = match mode {
                EdgeMode::Exact => {
                    let p = edge_prob_exact(*n, *a)?;
                    eprintln!("cert edgeprob: exact P(X >= 2) = {:.6e}", p.p_at_least_two);
                    serde_json::json!({
                        "n": n, "a": a, "mode": "exact",
                        "p0": p.p0, "p1": p.p1, "p_at_least_two": p.p_at_least_two,
                    })
                }
                EdgeMode::Asymptotic => {
                    let p = edge_prob_asymptotic(*n, *a);
                    eprintln!("cert edgeprob: asymptotic P(X >= 2) = {p:.6e}");
                    serde_json::json!({
                        "n": n, "a": a, "mode": "asymptotic",
                        "p_at_least_two": p,
                    })
                }
            };
            emit_json(cli, &value)?;
            Ok(0)
        }
        CertCmd::LllBlock { k, n } => {
            let n = match n {
                Some(n) => *n,
                None => lll_block_instance_n(*k)?,
            };
            report_exit(cli, &lll_symmetric_block(*k, n)?)
        }
        CertCmd::LllTight {
            schedule,
            r_min,
            r_max,
        } => {
            let schedule = match schedule {
                Some(arg) => serde_json::from_str::<Schedule>(&inline_or_file(arg)?)
                    .map_err(|e| fail(2, format!("--schedule: {e}")))?,
                None => Schedule::default_two_thirds(),
            };
            report_exit(cli, &lll_tight_certificate(&schedule, *r_min, *r_max)?)
        }
    }
}

fn run_mc(cli: &Cli, config: &str) -> Result<u8, Failure> {
    let cfg: ExperimentConfig = serde_json::from_str(&inline_or_file(config)?)
        .map_err(|e| fail(2, format!("--config: {e}")))?;
    let records = run_trials(&cfg)?;
    eprintln!(
        "mc: {} records for stat {} over {} sizes",
        records.len(),
        cfg.stat,
        cfg.ns.len()
    );
    match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(cli, &to_csv(&records))?,
        Format::Json => emit(
            cli,
            &serde_json::to_string_pretty(&records).expect("serializable records"),
        )?,
    }
    Ok(0)
}

fn run_verify(cli: &Cli, pair_arg: &str) -> Result<u8, Failure> {
    let p = load_host(cli)?;
    let text = inline_or_file(pair_arg)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| fail(2, format!("--pair: {e}")))?;
    let pair_value = if value.get("first").is_some() {
        value.clone()
    } else if let Some(inner) = value.get("pair") {
        inner.clone()
    } else {
        return Err(fail(
            2,
            "--pair JSON needs first/second arrays, directly or under a \"pair\" key",
        ));
    };
    let pair: TwinPair = serde_json::from_value(pair_value)
        .map_err(|e| fail(2, format!("--pair: {e}")))?;
    let (valid, reason) = match verify_twin_pair(&p, &pair) {
        Ok(true) => (true, None),
        Ok(false) => (false, Some("not a twin pair".to_string())),
        Err(e) => (false, Some(e.to_string())),
    };
    emit_json(
        cli,
        &serde_json::json!({ "valid": valid, "reason": reason }),
    )?;
    if valid {
        eprintln!("verify: valid twin pair of length {}", pair.len());
        Ok(0)
    } else {
        eprintln!("verify: INVALID ({})", reason.unwrap_or_default());
        Ok(1)
    }
}
