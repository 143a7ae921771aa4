//! `oritile`: batch driver for graph generation, degree-preserving
//! equipartitions, oriented Hamilton search, cycle-factors, and Monte Carlo
//! experiments.
//!
//! Every output embeds the effective run configuration (including the seed),
//! so re-running the embedded config reproduces the file byte-for-byte except
//! for the single `run_meta` line, which carries the timestamp and timing.
//!
//! Exit codes: 0 success/found; 1 i/o or parse error; 2 usage error;
//! 3 divisibility error; 4 partition attempts exhausted; 5 certified
//! not-found; 6 search budget exhausted (inconclusive); 7 experiment bound
//! violated; 8 internal verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use oritile_core::edgelist::{canonical_hash, read_edge_list, write_edge_list};
use oritile_core::experiments::{
    split_success_experiment, tail_experiment, TailParams,
};
use oritile_core::factor::{
    cycle_factor, threshold_report, verify_factor, FactorFailure, FactorRequest, PatternSpec,
};
use oritile_core::generate::{random_oriented, random_tournament};
use oritile_core::graph::{DegreeMode, OrientedGraph};
use oritile_core::hamilton::{
    find_cycle_backtrack, find_cycle_dp, OrientationPattern, SearchOutcome,
    DEFAULT_BACKTRACK_BUDGET, DEFAULT_DP_CAP,
};
use oritile_core::partition::{
    recursive_equipartition, verify_partition, PartitionError, SplitPolicy,
};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DIVISIBILITY: u8 = 3;
const EXIT_ATTEMPTS_EXHAUSTED: u8 = 4;
const EXIT_NOT_FOUND: u8 = 5;
const EXIT_BUDGET_EXHAUSTED: u8 = 6;
const EXIT_EXPERIMENT_FAILED: u8 = 7;
const EXIT_VERIFY_FAILED: u8 = 8;

#[derive(Parser)]
#[command(
    name = "oritile",
    version,
    about = "Oriented-graph equipartitions and cycle-factors",
    after_help = "Exit codes: 0 ok, 1 i/o, 2 usage, 3 divisibility, \
                  4 attempts exhausted, 5 not found, 6 budget exhausted, \
                  7 experiment failed, 8 verification failed"
)]
struct Cli {
    /// Cap the worker thread pool (0 = one thread per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it in the edge-list format.
    Gen {
        #[command(subcommand)]
        spec: GenSpec,
    },
    /// Print degree statistics of a graph.
    Degree {
        /// Edge-list file ('-' for stdin).
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recursively equipartition a graph into blocks of size ell.
    Partition {
        input: String,
        #[arg(long)]
        ell: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Semi)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_attempts: usize,
        /// On attempt exhaustion, continue with the best-scoring sample.
        #[arg(long)]
        best_effort: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a spanning cycle with the given orientation pattern.
    Hamilton {
        input: String,
        /// Pattern over {+,-}, length = graph order, e.g. +++-+.
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = DEFAULT_DP_CAP)]
        dp_cap: usize,
        #[arg(long, default_value_t = DEFAULT_BACKTRACK_BUDGET)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition and search every part: produce a verified cycle-factor.
    Factor {
        input: String,
        #[arg(long)]
        ell: usize,
        /// Comma-separated patterns: one for all parts, or one per part.
        #[arg(long)]
        patterns: Option<String>,
        /// Epsilon for the threshold report.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = ModeArg::Semi)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_attempts: usize,
        #[arg(long, default_value_t = DEFAULT_DP_CAP)]
        dp_cap: usize,
        #[arg(long, default_value_t = DEFAULT_BACKTRACK_BUDGET)]
        budget: u64,
        #[arg(long)]
        best_effort: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiments on the probabilistic machinery.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
}

#[derive(Subcommand)]
enum GenSpec {
    /// Random tournament on n vertices.
    Tournament {
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random oriented graph: each pair present with probability p.
    Oriented {
        n: usize,
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Hypergeometric tail vs the 2 exp(-2 t^2 / n) bound, over a grid.
    Tail(TailArgs),
    /// Single-split success rate on a random tournament vs the 1/2 claim.
    SplitSuccess {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Semi)]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TailArgs {
    /// Population sizes (comma-separated for a grid).
    #[arg(long = "N", value_delimiter = ',', required = true)]
    big_n: Vec<usize>,
    /// Subset sizes.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Marked-prefix sizes.
    #[arg(long = "m", value_delimiter = ',', required = true)]
    m: Vec<usize>,
    /// Deviations.
    #[arg(long = "t", value_delimiter = ',', required = true)]
    t: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum ModeArg {
    Semi,
    Total,
}

impl From<ModeArg> for DegreeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Semi => DegreeMode::Semi,
            ModeArg::Total => DegreeMode::Total,
        }
    }
}

impl ModeArg {
    fn name(self) -> &'static str {
        match self {
            ModeArg::Semi => "semi",
            ModeArg::Total => "total",
        }
    }
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

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // ignore the error if a pool already exists (tests call main twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let started = Instant::now();
    match run(cli.command, started) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, started: Instant) -> Result<(), Failure> {
    match command {
        Command::Gen { spec } => cmd_gen(spec),
        Command::Degree { input, out } => cmd_degree(&input, out.as_deref(), started),
        Command::Partition {
            input,
            ell,
            mode,
            seed,
            max_attempts,
            best_effort,
            out,
        } => cmd_partition(
            &input,
            ell,
            mode,
            seed,
            max_attempts,
            best_effort,
            out.as_deref(),
            started,
        ),
        Command::Hamilton {
            input,
            pattern,
            dp_cap,
            budget,
            out,
        } => cmd_hamilton(&input, &pattern, dp_cap, budget, out.as_deref(), started),
        Command::Factor {
            input,
            ell,
            patterns,
            eps,
            mode,
            seed,
            max_attempts,
            dp_cap,
            budget,
            best_effort,
            out,
        } => cmd_factor(
            &input,
            ell,
            patterns.as_deref(),
            eps,
            mode,
            seed,
            max_attempts,
            dp_cap,
            budget,
            best_effort,
            out.as_deref(),
            started,
        ),
        Command::Experiment { kind } => match kind {
            ExperimentKind::Tail(args) => cmd_experiment_tail(args, started),
            ExperimentKind::SplitSuccess {
                n,
                trials,
                mode,
                seed,
                out,
            } => cmd_experiment_split(n, trials, mode, seed, out.as_deref(), started),
        },
    }
}

fn load_graph(input: &str) -> Result<OrientedGraph, Failure> {
    let parse = |r: Box<dyn std::io::BufRead>| {
        read_edge_list(r).map_err(|e| fail(EXIT_IO, format!("{input}: {e}")))
    };
    if input == "-" {
        parse(Box::new(std::io::stdin().lock()))
    } else {
        let file = fs::File::open(input)
            .map_err(|e| fail(EXIT_IO, format!("cannot open {input}: {e}")))?;
        parse(Box::new(std::io::BufReader::new(file)))
    }
}

fn run_meta(started: Instant) -> String {
    let timestamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true);
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    format!("timestamp={timestamp} elapsed_ms={elapsed_ms:.3}")
}

/// Serializes a report and delivers it to `out` or stdout.
fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| fail(EXIT_IO, format!("serialization failed: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_csv(header: &str, rows: &[String], out: &Path) -> Result<(), Failure> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(out, text).map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", out.display())))
}

fn cmd_gen(spec: GenSpec) -> Result<(), Failure> {
    let (g, config, out) = match spec {
        GenSpec::Tournament { n, seed, out } => {
            let g = random_tournament(n, seed);
            let config = json!({"command": "gen", "spec": "tournament", "n": n, "seed": seed});
            (g, config, out)
        }
        GenSpec::Oriented { n, p, seed, out } => {
            let g = random_oriented(n, p, seed)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let config =
                json!({"command": "gen", "spec": "oriented", "n": n, "p": p, "seed": seed});
            (g, config, out)
        }
    };
    let summary = format!(
        "n={} e={} semi_degree={} total_degree={}",
        g.n(),
        g.edge_count(),
        g.min_degree(DegreeMode::Semi),
        g.min_degree(DegreeMode::Total)
    );
    let config_line = format!("config: {config}");
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            write_edge_list(&g, &mut buf, &[&config_line])
                .map_err(|e| fail(EXIT_IO, e.to_string()))?;
            fs::write(&path, buf)
                .map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", path.display())))?;
            println!("{summary}");
        }
        None => {
            let stdout = std::io::stdout();
            write_edge_list(&g, stdout.lock(), &[&config_line])
                .map_err(|e| fail(EXIT_IO, e.to_string()))?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_degree(input: &str, out: Option<&Path>, started: Instant) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let value = json!({
        "config": {"command": "degree", "input": input},
        "run_meta": run_meta(started),
        "graph_hash": canonical_hash(&g),
        "n": g.n(),
        "edges": g.edge_count(),
        "semi_degree": g.min_degree(DegreeMode::Semi),
        "total_degree": g.min_degree(DegreeMode::Total),
        "relative_semi_degree": g.min_relative_degree(DegreeMode::Semi),
        "relative_total_degree": g.min_relative_degree(DegreeMode::Total),
    });
    emit_json(&value, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_partition(
    input: &str,
    ell: usize,
    mode: ModeArg,
    seed: u64,
    max_attempts: usize,
    best_effort: bool,
    out: Option<&Path>,
    started: Instant,
) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let policy = if best_effort {
        SplitPolicy::BestEffort
    } else {
        SplitPolicy::Strict
    };
    let partition = recursive_equipartition(&g, ell, mode.into(), seed, max_attempts, policy)
        .map_err(|e| match e {
            PartitionError::Divisibility { .. } | PartitionError::ZeroPartSize => {
                fail(EXIT_DIVISIBILITY, e.to_string())
            }
            PartitionError::AttemptsExhausted { .. } => {
                fail(EXIT_ATTEMPTS_EXHAUSTED, e.to_string())
            }
        })?;
    let verdict = verify_partition(&g, &partition, mode.into());
    if !verdict.structural_ok() {
        return Err(fail(
            EXIT_VERIFY_FAILED,
            format!("partition failed verification: {:?}", verdict.failures),
        ));
    }
    let mut annotations = json!({
        "best_effort_used": partition.best_effort_used(),
        "below_threshold": partition.below_threshold(),
    });
    if mode == ModeArg::Total {
        annotations["total_mode_assumption"] = json!(
            "total-degree thresholds reuse the semi-degree error term 2 n^(-1/3)"
        );
    }
    let value = json!({
        "config": {
            "command": "partition",
            "input": input,
            "ell": ell,
            "mode": mode.name(),
            "seed": seed,
            "max_attempts": max_attempts,
            "best_effort": best_effort,
        },
        "run_meta": run_meta(started),
        "graph_hash": canonical_hash(&g),
        "annotations": annotations,
        "partition": partition,
        "verdict": verdict,
    });
    emit_json(&value, out)
}

fn cmd_hamilton(
    input: &str,
    pattern: &str,
    dp_cap: usize,
    budget: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let pattern: OrientationPattern = pattern
        .parse()
        .map_err(|e| fail(EXIT_USAGE, format!("bad pattern: {e}")))?;
    if pattern.len() != g.n() {
        return Err(fail(
            EXIT_USAGE,
            format!("pattern length {} != graph order {}", pattern.len(), g.n()),
        ));
    }
    let (method, outcome) = if g.n() <= dp_cap.min(oritile_core::hamilton::MAX_DP_VERTICES) {
        let found = find_cycle_dp(&g, &pattern, dp_cap)
            .expect("cap checked before dispatch");
        (
            "dp",
            match found {
                Some(emb) => SearchOutcome::Found(emb),
                None => SearchOutcome::NotFound,
            },
        )
    } else {
        ("backtrack", find_cycle_backtrack(&g, &pattern, budget))
    };

    let (status, embedding, expanded) = match &outcome {
        SearchOutcome::Found(emb) => ("found", Some(emb.clone()), None),
        SearchOutcome::NotFound => ("not_found", None, None),
        SearchOutcome::BudgetExhausted { expanded } => ("budget_exhausted", None, Some(*expanded)),
    };
    let value = json!({
        "config": {
            "command": "hamilton",
            "input": input,
            "pattern": pattern.to_string(),
            "dp_cap": dp_cap,
            "budget": budget,
        },
        "run_meta": run_meta(started),
        "graph_hash": canonical_hash(&g),
        "method": method,
        "status": status,
        "embedding": embedding,
        "expanded": expanded,
    });
    emit_json(&value, out)?;
    match outcome {
        SearchOutcome::Found(_) => Ok(()),
        SearchOutcome::NotFound => Err(fail(EXIT_NOT_FOUND, "no embedding exists (certified)")),
        SearchOutcome::BudgetExhausted { expanded } => Err(fail(
            EXIT_BUDGET_EXHAUSTED,
            format!("budget exhausted after {expanded} expansions (inconclusive)"),
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_factor(
    input: &str,
    ell: usize,
    patterns: Option<&str>,
    eps: f64,
    mode: ModeArg,
    seed: u64,
    max_attempts: usize,
    dp_cap: usize,
    budget: u64,
    best_effort: bool,
    out: Option<&Path>,
    started: Instant,
) -> Result<(), Failure> {
    let g = load_graph(input)?;
    let pattern_spec = match patterns {
        None => None,
        Some(text) => {
            let list: Vec<OrientationPattern> = text
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|e| fail(EXIT_USAGE, format!("bad pattern: {e}")))?;
            if list.iter().any(|p| p.len() != ell) {
                return Err(fail(
                    EXIT_USAGE,
                    format!("every pattern must have length ell = {ell}"),
                ));
            }
            if list.len() == 1 {
                Some(PatternSpec::Uniform(list.into_iter().next().unwrap()))
            } else {
                Some(PatternSpec::PerPart(list))
            }
        }
    };
    let req = FactorRequest {
        ell,
        patterns: pattern_spec,
        mode: mode.into(),
        seed,
        max_attempts,
        dp_cap,
        budget,
        best_effort,
    };
    let config = json!({
        "command": "factor",
        "input": input,
        "ell": ell,
        "patterns": patterns,
        "eps": eps,
        "mode": mode.name(),
        "seed": seed,
        "max_attempts": max_attempts,
        "dp_cap": dp_cap,
        "budget": budget,
        "best_effort": best_effort,
    });
    let cert = cycle_factor(&g, &req).map_err(|e| match &e {
        FactorFailure::Divisibility { .. } | FactorFailure::PartSizeTooSmall(_) => {
            fail(EXIT_DIVISIBILITY, e.to_string())
        }
        FactorFailure::PatternCount { .. } | FactorFailure::PatternLength { .. } => {
            fail(EXIT_USAGE, e.to_string())
        }
        FactorFailure::Partition(PartitionError::AttemptsExhausted { .. }) => {
            fail(EXIT_ATTEMPTS_EXHAUSTED, e.to_string())
        }
        FactorFailure::Partition(_) => fail(EXIT_DIVISIBILITY, e.to_string()),
        FactorFailure::PartNotFound { .. } => fail(EXIT_NOT_FOUND, e.to_string()),
        FactorFailure::PartBudgetExhausted { .. } => fail(EXIT_BUDGET_EXHAUSTED, e.to_string()),
    })?;
    let verdict = verify_factor(&g, &cert);
    if !verdict.ok() {
        return Err(fail(
            EXIT_VERIFY_FAILED,
            format!("certificate failed verification: {:?}", verdict.failures),
        ));
    }
    let pattern_strings: Vec<String> = cert
        .embeddings
        .iter()
        .map(|e| e.pattern.to_string())
        .collect();
    let value = json!({
        "config": config,
        "run_meta": run_meta(started),
        "graph_hash": canonical_hash(&g),
        "n": g.n(),
        "ell": ell,
        "parts": cert.partition.blocks.len(),
        "seed": seed,
        "blocks": cert.partition.blocks,
        "patterns": pattern_strings,
        "embeddings": cert.embeddings,
        "guarantee_flags": cert.guarantee_flags,
        "partition_degraded": cert.partition_degraded,
        "partition": cert.partition,
        "threshold_report": threshold_report(&g, ell, eps),
        "verdict": verdict,
    });
    emit_json(&value, out)
}

fn cmd_experiment_tail(args: TailArgs, started: Instant) -> Result<(), Failure> {
    if args.samples == 0 {
        return Err(fail(EXIT_USAGE, "samples must be at least 1"));
    }
    // build and validate the whole grid before running anything
    let mut grid = Vec::new();
    for &big_n in &args.big_n {
        for &n in &args.n {
            for &m in &args.m {
                for &t in &args.t {
                    let p = TailParams {
                        big_n,
                        n,
                        m,
                        t,
                        samples: args.samples,
                        seed: args.seed,
                    };
                    p.validate()
                        .map_err(|e| fail(EXIT_USAGE, format!("bad grid point: {e}")))?;
                    grid.push(p);
                }
            }
        }
    }

    #[derive(Serialize)]
    struct Point {
        #[serde(rename = "N")]
        big_n: usize,
        n: usize,
        m: usize,
        t: f64,
        empirical: f64,
        bound: f64,
        mc_sigma: f64,
        pass: bool,
    }
    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut all_pass = true;
    for p in &grid {
        let r = tail_experiment(p).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
        all_pass &= r.pass;
        rows.push(format!(
            "{},{},{},{},{},{},{},{},{}",
            p.big_n, p.n, p.m, p.t, p.samples, p.seed, r.empirical, r.bound, r.mc_sigma
        ) + if r.pass { ",true" } else { ",false" });
        points.push(Point {
            big_n: p.big_n,
            n: p.n,
            m: p.m,
            t: p.t,
            empirical: r.empirical,
            bound: r.bound,
            mc_sigma: r.mc_sigma,
            pass: r.pass,
        });
    }
    let value = json!({
        "config": {
            "command": "experiment", "kind": "tail",
            "N": args.big_n, "n": args.n, "m": args.m, "t": args.t,
            "samples": args.samples, "seed": args.seed,
        },
        "run_meta": run_meta(started),
        "points": points,
        "all_pass": all_pass,
    });
    emit_json(&value, args.out.as_deref())?;
    if let Some(out) = &args.out {
        let csv = out.with_extension("csv");
        emit_csv(
            "N,n,m,t,samples,seed,empirical,bound,mc_sigma,pass",
            &rows,
            &csv,
        )?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(fail(EXIT_EXPERIMENT_FAILED, "some grid point violated the bound"))
    }
}

fn cmd_experiment_split(
    n: usize,
    trials: usize,
    mode: ModeArg,
    seed: u64,
    out: Option<&Path>,
    started: Instant,
) -> Result<(), Failure> {
    let r = split_success_experiment(n, trials, mode.into(), seed)
        .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let value = json!({
        "config": {
            "command": "experiment", "kind": "split-success",
            "n": n, "trials": trials, "mode": mode.name(), "seed": seed,
        },
        "run_meta": run_meta(started),
        "result": r,
    });
    emit_json(&value, out)?;
    if let Some(out) = out {
        let row = format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.trials,
            mode.name(),
            r.seed,
            r.delta,
            r.threshold.value,
            r.success_rate,
            r.report.empirical,
            r.report.bound,
            r.report.pass
        );
        emit_csv(
            "n,trials,mode,seed,delta,threshold,success_rate,failure_rate,failure_bound,pass",
            &[row],
            &out.with_extension("csv"),
        )?;
    }
    if r.report.pass {
        Ok(())
    } else {
        Err(fail(
            EXIT_EXPERIMENT_FAILED,
            format!("success rate {} below the 1/2 claim", r.success_rate),
        ))
    }
}
