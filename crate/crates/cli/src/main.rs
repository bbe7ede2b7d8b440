//! `noah`: validate datasets, compute statistics, score predictions and run
//! baselines from the command line.
//!
//! Exit status: 0 on success, 1 when the input data is invalid or unreadable,
//! 2 on usage errors. Data goes to stdout, diagnostics to stderr.

mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use noah_core::answer::{evaluate_with, AnswerOptions, EvalOptions};
use noah_core::baselines::{predict_with, Strategy};
use noah_core::error::IngestError;
use noah_core::graph::{build_reasoning_graph, decompose_paths, validate_dag, DEFAULT_PATH_CAP};
use noah_core::ingest::{
    compute_stats_with, load_dataset, load_predictions, parse_examples, read_text, stats_csv,
    validate_dataset, Violation, ViolationKind,
};
use noah_core::oracle::{brute_force_dagsim, brute_force_gem};
use noah_core::simeval::dag_sim_detailed;
use noah_core::{gem, DagSimConfig, Exec, Measure, ReasoningGraph, SimilarityKind};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "noah",
    version,
    about = "Reasoning-graph and exact-match evaluation for conversational numerical QA"
)]
struct Cli {
    /// Worker threads (default: all cores); 1 runs sequentially.
    #[arg(long, global = true, env = "NOAH_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset file and list every invariant violation.
    Validate {
        #[arg(long)]
        data: PathBuf,
        /// Also flag evidence chains that end at a turn without evidence.
        #[arg(long)]
        strict: bool,
    },
    /// Descriptive statistics of a dataset.
    Stats {
        #[arg(long)]
        data: PathBuf,
        /// Emit the bigram and evidence-position tables as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Score a prediction file against a dataset.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        /// Compare equation answers as text instead of by value.
        #[arg(long)]
        equations_as_text: bool,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// DAG similarity and graph exact match of two graph files.
    Sim {
        #[command(flatten)]
        pair: GraphPair,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Same as `sim`, computed by exhaustive enumeration (small graphs only).
    Oracle {
        #[command(flatten)]
        pair: GraphPair,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Write predictions from a heuristic baseline as JSONL.
    Baseline {
        #[arg(long)]
        data: PathBuf,
        /// gold-echo, nearest-evidence or random-graph.
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Root-to-source paths of a graph file, or of a dataset question.
    Decompose {
        #[arg(long, conflicts_with_all = ["data", "example", "turn"], required_unless_present = "data")]
        graph: Option<PathBuf>,
        #[arg(long, requires_all = ["example", "turn"])]
        data: Option<PathBuf>,
        #[arg(long)]
        example: Option<String>,
        #[arg(long)]
        turn: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
struct GraphPair {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
}

#[derive(Args)]
struct SimArgs {
    /// Node similarity: exact or token-f1.
    #[arg(long, env = "NOAH_SIM", default_value = "token-f1")]
    sim: Measure,
    /// Nodes of different kinds never match.
    #[arg(long)]
    kind_gate: bool,
    /// Drop the question node from every path.
    #[arg(long)]
    exclude_root: bool,
}

impl SimArgs {
    fn kind(&self) -> SimilarityKind {
        SimilarityKind {
            measure: self.sim,
            kind_gate: self.kind_gate,
        }
    }

    fn config(&self) -> DagSimConfig {
        DagSimConfig {
            similarity: self.kind(),
            exclude_root: self.exclude_root,
            ..Default::default()
        }
    }
}

/// Input data is invalid: exit 1 after printing `payload` (if any) on stdout.
#[derive(Debug)]
struct DataFailure {
    payload: Option<serde_json::Value>,
    message: String,
}

impl std::fmt::Display for DataFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for DataFailure {}

fn data_failure(message: impl Into<String>) -> anyhow::Error {
    DataFailure {
        payload: None,
        message: message.into(),
    }
    .into()
}

fn read_graph(path: &Path) -> Result<ReasoningGraph> {
    let text = read_text(path).map_err(|e| data_failure(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| data_failure(format!("{}: {e}", path.display())))
}

fn exec_for(jobs: Option<usize>) -> Exec {
    match jobs {
        Some(1) => Exec::Sequential,
        _ => Exec::Parallel,
    }
}

fn load(path: &Path) -> Result<noah_core::Dataset> {
    load_dataset(path).map_err(|e| data_failure(e.to_string()))
}

fn validate(data: &Path, strict: bool) -> Result<serde_json::Value> {
    let text = read_text(data).map_err(|e| data_failure(e.to_string()))?;
    let violations = match parse_examples(&text) {
        Ok(examples) => validate_dataset(&examples, strict),
        Err(IngestError::Schema(message)) => vec![Violation {
            example_id: String::new(),
            turn: None,
            field: "file".into(),
            kind: ViolationKind::Schema,
            message,
        }],
        Err(e) => return Err(data_failure(e.to_string())),
    };
    let payload = serde_json::to_value(&violations)?;
    if violations.is_empty() {
        Ok(payload)
    } else {
        Err(DataFailure {
            payload: Some(payload),
            message: format!("{} violation(s)", violations.len()),
        }
        .into())
    }
}

fn pair_json(dag_sim: f64, gem: bool, paths_gold: usize, paths_pred: usize) -> serde_json::Value {
    json!({ "dag_sim": dag_sim, "gem": gem, "paths_gold": paths_gold, "paths_pred": paths_pred })
}

fn sim(pair: &GraphPair, args: &SimArgs) -> Result<serde_json::Value> {
    let g = read_graph(&pair.gold)?;
    let h = read_graph(&pair.pred)?;
    let cfg = args.config();
    let gold_paths = validate_dag(&g)
        .and_then(|_| decompose_paths(&g, cfg.path_cap))
        .map_err(|e| data_failure(format!("gold graph: {e}")))?;
    match dag_sim_detailed(&g, &h, &cfg) {
        Ok(d) => Ok(pair_json(
            d.value,
            gem(&g, &h),
            d.gold_paths.len(),
            d.pred_paths.len(),
        )),
        Err(e) => {
            eprintln!("warning: predicted graph scores 0: {e}");
            Ok(pair_json(0.0, false, gold_paths.len(), 0))
        }
    }
}

fn oracle(pair: &GraphPair, args: &SimArgs) -> Result<serde_json::Value> {
    let g = read_graph(&pair.gold)?;
    let h = read_graph(&pair.pred)?;
    validate_dag(&g).map_err(|e| data_failure(format!("gold graph: {e}")))?;
    let paths = |x: &ReasoningGraph| decompose_paths(x, DEFAULT_PATH_CAP).map(|p| p.len());
    let paths_gold = paths(&g).map_err(|e| data_failure(format!("gold graph: {e}")))?;
    if let Err(e) = validate_dag(&h) {
        eprintln!("warning: predicted graph scores 0: {e}");
        return Ok(pair_json(0.0, false, paths_gold, 0));
    }
    let value = brute_force_dagsim(&g, &h, args.kind(), args.exclude_root)
        .map_err(|e| data_failure(e.to_string()))?;
    Ok(pair_json(
        value,
        brute_force_gem(&g, &h),
        paths_gold,
        paths(&h)?,
    ))
}

fn decompose(
    graph: Option<&Path>,
    data: Option<&Path>,
    example: Option<&str>,
    turn: Option<u32>,
    cap: usize,
) -> Result<serde_json::Value> {
    let g = match (graph, data, example, turn) {
        (Some(path), ..) => read_graph(path)?,
        (None, Some(data), Some(id), Some(t)) => {
            let ds = load(data)?;
            let ex = ds
                .get(id)
                .ok_or_else(|| data_failure(format!("no example `{id}`")))?;
            build_reasoning_graph(ex, t, None).map_err(|e| data_failure(e.to_string()))?
        }
        _ => bail!("give --graph, or --data with --example and --turn"),
    };
    validate_dag(&g).map_err(|e| data_failure(e.to_string()))?;
    let paths = decompose_paths(&g, cap).map_err(|e| data_failure(e.to_string()))?;
    Ok(json!({ "root": g.root(), "paths": paths.paths }))
}

fn run(cli: Cli) -> Result<Option<serde_json::Value>> {
    let exec = exec_for(cli.jobs);
    match cli.command {
        Command::Validate { data, strict } => validate(&data, strict).map(Some),
        Command::Stats { data, csv } => {
            let ds = load(&data)?;
            let report = compute_stats_with(&ds, exec).map_err(|e| data_failure(e.to_string()))?;
            if csv {
                print!("{}", stats_csv(&report));
                return Ok(None);
            }
            Ok(Some(serde_json::to_value(&report)?))
        }
        Command::Eval {
            data,
            pred,
            sim,
            equations_as_text,
            report,
        } => {
            let ds = load(&data)?;
            let preds = load_predictions(&pred).map_err(|e| data_failure(e.to_string()))?;
            let opts = EvalOptions {
                dag: sim.config(),
                answers: AnswerOptions {
                    equations_by_value: !equations_as_text,
                },
                exec,
            };
            let result = evaluate_with(&ds, &preds, &opts);
            for d in &result.diagnostics {
                eprintln!("warning: {d}");
            }
            let value = serde_json::to_value(&result)?;
            if let Some(path) = report {
                fs::write(&path, output::render(&value) + "\n")
                    .map_err(|e| data_failure(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(Some(value))
        }
        Command::Sim { pair, sim: args } => sim(&pair, &args).map(Some),
        Command::Oracle { pair, sim } => oracle(&pair, &sim).map(Some),
        Command::Baseline {
            data,
            strategy,
            seed,
            out,
        } => {
            let strategy: Strategy = strategy.parse().map_err(|e| anyhow!("{e}"))?;
            let ds = load(&data)?;
            let jsonl = predict_with(&ds, strategy, seed, exec).to_jsonl();
            match out {
                Some(path) => fs::write(&path, jsonl)
                    .map_err(|e| data_failure(format!("cannot write {}: {e}", path.display())))?,
                None => std::io::stdout().write_all(jsonl.as_bytes())?,
            }
            Ok(None)
        }
        Command::Decompose {
            graph,
            data,
            example,
            turn,
            cap,
        } => decompose(
            graph.as_deref(),
            data.as_deref(),
            example.as_deref(),
            turn,
            cap,
        )
        .map(Some),
    }
}

#[cfg(feature = "parallel")]
fn run_with_jobs(cli: Cli) -> Result<Option<serde_json::Value>> {
    match cli.jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| anyhow!("cannot start worker threads: {e}"))?
            .install(|| run(cli)),
        _ => run(cli),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_with_jobs(cli: Cli) -> Result<Option<serde_json::Value>> {
    if cli.jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    run(cli)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_with_jobs(cli) {
        Ok(value) => {
            if let Some(v) = value {
                println!("{}", output::render(&v));
            }
            ExitCode::SUCCESS
        }
        Err(e) => match e.downcast::<DataFailure>() {
            Ok(failure) => {
                if let Some(v) = &failure.payload {
                    println!("{}", output::render(v));
                }
                eprintln!("error: {failure}");
                ExitCode::from(1)
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
