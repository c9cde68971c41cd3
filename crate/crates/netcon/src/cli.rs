//! The `netcon` command line.

use std::collections::hash_map::RandomState;
use std::hash::BuildHasher;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use netcon_core::protocol::counting::DEFAULT_HEAD_START;
use netcon_core::protocol::random::random_protocol;
use netcon_core::protocol::text::{parse_protocol, to_text};
use netcon_core::{DetectorKind, ProtocolSpec, SchedulerKind, SchedulerParams};
use serde::Serialize;

use crate::batch::{execute, row_for, run_batch, RunOptions, RunSetup};
use crate::error::{Error, Result};
use crate::experiment::{default_detector, load_protocol, step_budget, ExperimentSpec, ProtocolSource, StepBudget};
use crate::report::{build_report, report_json, write_results};
use crate::results::read_csv_file;
use crate::stats::{CensusWindowReport, Complexity};

#[derive(Debug, Parser)]
#[command(name = "netcon", version, about = "Simulate network constructors and measure their convergence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and print its result.
    Run(RunArgs),
    /// Run a grid of simulations and write results.csv and report.json.
    Batch(BatchArgs),
    /// Rebuild report.json from an existing results.csv.
    Analyze(AnalyzeArgs),
    /// Validate a protocol file.
    ProtocolCheck(CheckArgs),
    /// Print a random total protocol in the text format.
    GenProtocol(GenArgs),
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    /// Built-in protocol: fast-global-line, faster-global-line, global-star,
    /// cycle-cover or counting-upper-bound.
    #[arg(long, conflicts_with = "protocol_file", required_unless_present = "protocol_file")]
    pub protocol: Option<String>,
    /// Protocol in the text format.
    #[arg(long)]
    pub protocol_file: Option<PathBuf>,
    /// Head start of the counting protocol.
    #[arg(long, default_value_t = DEFAULT_HEAD_START)]
    pub b: u32,
}

impl ProtocolArgs {
    fn source(&self) -> ProtocolSource {
        match (&self.protocol, &self.protocol_file) {
            (Some(name), _) => ProtocolSource::Builtin(name.clone()),
            (None, Some(path)) => ProtocolSource::File(path.clone()),
            (None, None) => unreachable!("clap requires one of --protocol and --protocol-file"),
        }
    }
}

#[derive(Debug, Args)]
pub struct SchedulerArgs {
    /// Capacity of each node's partner history.
    #[arg(long, default_value_t = 50)]
    pub history_capacity: usize,
    /// Probability that the history scheduler reuses a past partner.
    #[arg(long, default_value_t = 0.75)]
    pub history_bias: f64,
    /// Probability that the reverse-history scheduler reuses a past partner.
    #[arg(long, default_value_t = 0.25)]
    pub reverse_history_bias: f64,
    /// Probability that the connection scheduler picks an active neighbor.
    #[arg(long, default_value_t = 0.8)]
    pub connection_bias: f64,
}

impl SchedulerArgs {
    fn params(&self) -> SchedulerParams {
        SchedulerParams {
            history_capacity: self.history_capacity,
            history_bias: self.history_bias,
            reverse_history_bias: self.reverse_history_bias,
            connection_bias: self.connection_bias,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub protocol: ProtocolArgs,
    /// random, history, reverse-history or connection.
    #[arg(long, default_value = "random")]
    pub scheduler: SchedulerKind,
    /// line, star, cycle-cover, ring, counting-halt or none.
    /// Defaults to the target of a built-in protocol, otherwise none.
    #[arg(long)]
    pub detector: Option<DetectorKind>,
    /// Population size.
    #[arg(long)]
    pub n: usize,
    /// Drawn from entropy and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Step budget. Defaults to 50 f(n), capped at 5e9.
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Complexity class used for the default budget: n2, n2logn or n3.
    #[arg(long)]
    pub complexity: Option<Complexity>,
    /// Write the event trace to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write a DOT snapshot every k steps into --out.
    #[arg(long, value_name = "K")]
    pub snapshot_every: Option<u64>,
    /// Directory for snapshots.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Track the longest window where every state has at least alpha*n nodes.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Print the result as JSON.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub scheduler_params: SchedulerArgs,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Experiment file (TOML). Flags below are ignored when it is given,
    /// except --workers, --out, --trace and --json.
    pub spec: Option<PathBuf>,
    #[arg(long, conflicts_with = "protocol_file")]
    pub protocol: Option<String>,
    #[arg(long)]
    pub protocol_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HEAD_START)]
    pub b: u32,
    /// Comma-separated list of schedulers.
    #[arg(long, value_delimiter = ',', default_value = "random")]
    pub scheduler: Vec<SchedulerKind>,
    #[arg(long)]
    pub detector: Option<DetectorKind>,
    /// Comma-separated population sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Repetitions per (scheduler, size).
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    /// Base seed. Drawn from entropy and printed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub complexity: Option<Complexity>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Worker threads. Results do not depend on this.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Write one trace file per run into --out.
    #[arg(long)]
    pub trace: bool,
    /// Print report.json to stdout as well.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub scheduler_params: SchedulerArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub results: PathBuf,
    /// Defaults to the class of the protocol named in the results.
    #[arg(long)]
    pub complexity: Option<Complexity>,
    /// Write report.json into this directory instead of printing a summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of states, 2 to 16.
    #[arg(long)]
    pub states: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn entropy_seed() -> u64 {
    RandomState::new().hash_one(std::time::SystemTime::now())
}

fn seed_or_entropy(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = entropy_seed();
        let _ = writeln!(err, "seed: {s}");
        s
    })
}

fn stdout_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

/// Runs a parsed command. Returns the process exit code.
pub fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Run(args) => cmd_run(&args, out, err),
        Command::Batch(args) => cmd_batch(&args, out, err),
        Command::Analyze(args) => cmd_analyze(&args, out),
        Command::ProtocolCheck(args) => cmd_protocol_check(&args.file, out, err),
        Command::GenProtocol(args) => cmd_gen_protocol(&args, out, err),
    }
}

#[derive(Serialize)]
struct RunJson<'a> {
    protocol: &'a str,
    scheduler: &'a str,
    detector: &'a str,
    n: usize,
    seed: u64,
    max_steps: u64,
    converged: bool,
    total_interactions: u64,
    effective_interactions: u64,
    b: Option<u32>,
    r0: Option<u32>,
    r1: Option<u32>,
    r0_over_n: Option<f64>,
    final_census: Vec<(String, u32)>,
    census_window: Option<&'a CensusWindowReport>,
    snapshots: Vec<String>,
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let protocol = load_protocol(&args.protocol.source(), args.protocol.b)?;
    let detector = args.detector.unwrap_or_else(|| default_detector(&protocol));
    let complexity = args.complexity.unwrap_or_else(|| Complexity::for_protocol(protocol.name()));
    let budget = args.max_steps.map_or(StepBudget::Default, StepBudget::Absolute);
    if args.max_steps == Some(0) {
        return Err(Error::Spec("--max-steps must be positive".into()));
    }
    let seed = seed_or_entropy(args.seed, err);
    let setup = RunSetup {
        scheduler: args.scheduler,
        params: args.scheduler_params.params(),
        detector,
        n: args.n,
        seed,
        max_steps: step_budget(budget, args.n, complexity),
    };
    let options = RunOptions {
        trace: args.trace.clone(),
        snapshots: args.snapshot_every.map(|k| (k, args.out.clone())),
        alpha: args.alpha,
    };
    if options.snapshots.is_some() {
        std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    }
    let output = execute(&protocol, &setup, &options)?;
    let row = row_for(&protocol, &setup, 0, &output);
    let r = &output.result;
    if let Some(w) = output.census.as_ref().and_then(|c| c.warning.as_ref()) {
        let _ = writeln!(err, "warning: {w}");
    }

    if args.json {
        let json = RunJson {
            protocol: protocol.name(),
            scheduler: setup.scheduler.name(),
            detector: detector.name(),
            n: setup.n,
            seed,
            max_steps: setup.max_steps,
            converged: r.converged,
            total_interactions: r.total_interactions,
            effective_interactions: r.effective_interactions,
            b: row.b,
            r0: row.r0,
            r1: row.r1,
            r0_over_n: row.r0.map(|r0| r0 as f64 / setup.n as f64),
            final_census: r.final_census.clone(),
            census_window: output.census.as_ref(),
            snapshots: output.snapshots.iter().map(|p| p.display().to_string()).collect(),
        };
        let text = serde_json::to_string_pretty(&json).expect("run result serializes");
        writeln!(out, "{text}").map_err(stdout_err)?;
    } else {
        print_run(out, &protocol, &setup, &row, &output).map_err(stdout_err)?;
    }
    Ok(if !r.converged && detector != DetectorKind::None { 1 } else { 0 })
}

fn print_run(
    out: &mut dyn Write,
    protocol: &ProtocolSpec,
    setup: &RunSetup,
    row: &crate::results::ResultRow,
    output: &crate::batch::RunOutput,
) -> std::io::Result<()> {
    let r = &output.result;
    writeln!(out, "protocol:   {}", protocol.name())?;
    writeln!(out, "scheduler:  {}", setup.scheduler)?;
    writeln!(out, "detector:   {}", setup.detector)?;
    writeln!(out, "n:          {}", setup.n)?;
    writeln!(out, "seed:       {}", setup.seed)?;
    writeln!(out, "converged:  {}", r.converged)?;
    writeln!(out, "total:      {}", r.total_interactions)?;
    writeln!(out, "effective:  {}", r.effective_interactions)?;
    if !r.converged {
        writeln!(out, "budget:     {} steps exhausted", setup.max_steps)?;
    }
    if let (Some(r0), Some(r1)) = (row.r0, row.r1) {
        writeln!(out, "b:          {}", row.b.unwrap_or_default())?;
        writeln!(out, "r0:         {r0}")?;
        writeln!(out, "r1:         {r1}")?;
        writeln!(out, "r0/n:       {:.4}", r0 as f64 / setup.n as f64)?;
    }
    let census: Vec<String> = r.final_census.iter().map(|(s, c)| format!("{s}={c}")).collect();
    writeln!(out, "census:     {}", census.join(" "))?;
    if let Some(c) = &output.census {
        writeln!(out, "window:     {} steps at alpha={} ({:.4} n)", c.window, c.alpha, c.normalized)?;
    }
    for p in &output.snapshots {
        writeln!(out, "snapshot:   {}", p.display())?;
    }
    Ok(())
}

fn batch_spec(args: &BatchArgs, err: &mut dyn Write) -> Result<ExperimentSpec> {
    if let Some(path) = &args.spec {
        return ExperimentSpec::load(path);
    }
    let source = match (&args.protocol, &args.protocol_file) {
        (Some(name), _) => ProtocolSource::Builtin(name.clone()),
        (None, Some(path)) => ProtocolSource::File(path.clone()),
        (None, None) => return Err(Error::Spec("give a spec file, --protocol or --protocol-file".into())),
    };
    let seed = seed_or_entropy(args.seed, err);
    let mut spec = ExperimentSpec::new(source, args.sizes.clone(), args.reps, seed);
    spec.schedulers = args.scheduler.clone();
    spec.params = args.scheduler_params.params();
    spec.detector = args.detector;
    spec.head_start = args.b;
    spec.complexity = args.complexity;
    spec.alpha = args.alpha;
    if let Some(s) = args.max_steps {
        spec.budget = StepBudget::Absolute(s);
    }
    spec.validate()?;
    Ok(spec)
}

pub fn cmd_batch(args: &BatchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let spec = batch_spec(args, err)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let trace_dir = args.trace.then_some(args.out.as_path());
    let batch = run_batch(&spec, args.workers, trace_dir)?;
    let report = build_report(&batch.rows, batch.complexity);
    let (csv, json) = write_results(&batch.rows, &report, &args.out)?;
    if args.json {
        out.write_all(report_json(&report).as_bytes()).map_err(stdout_err)?;
    } else {
        print_summary(out, &report).map_err(stdout_err)?;
        writeln!(out, "wrote {} and {}", csv.display(), json.display()).map_err(stdout_err)?;
    }
    Ok(0)
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<u8> {
    let rows = read_csv_file(&args.results)?;
    let complexity = args
        .complexity
        .or_else(|| rows.first().map(|r| Complexity::for_protocol(&r.protocol)))
        .unwrap_or(Complexity::Quadratic);
    let report = build_report(&rows, complexity);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("report.json");
        std::fs::write(&path, report_json(&report)).map_err(|e| Error::io(&path, e))?;
    }
    if args.json {
        out.write_all(report_json(&report).as_bytes()).map_err(stdout_err)?;
    } else {
        print_summary(out, &report).map_err(stdout_err)?;
    }
    Ok(0)
}

fn print_summary(out: &mut dyn Write, report: &crate::report::Report) -> std::io::Result<()> {
    let c = &report.coefficients;
    writeln!(out, "{} runs, coefficient = mean T / {}", report.runs, c.complexity.label())?;
    writeln!(out, "{:<16} {:>7} {:>9} {:>14} {:>10}", "scheduler", "n", "converged", "mean T", "coef")?;
    for cell in &c.cells {
        let coef = cell.coefficient.map_or("-".to_string(), |v| format!("{v:.4}"));
        let mean = cell.mean.map_or("-".to_string(), |v| format!("{v:.1}"));
        writeln!(
            out,
            "{:<16} {:>7} {:>9} {:>14} {:>10}",
            cell.scheduler,
            cell.n,
            format!("{}/{}", cell.converged, cell.runs),
            mean,
            coef
        )?;
    }
    for f in &c.fits {
        writeln!(out, "{}: T ~ n^{:.3} (r2 {:.3})", f.scheduler, f.fit.alpha, f.fit.r2)?;
    }
    for s in &report.counting {
        for rate in &s.rates {
            writeln!(
                out,
                "counting n={}: r0 >= {} n in {}/{} runs ({:.3}, 95% CI {:.3}..{:.3})",
                s.n, rate.threshold, rate.successes, rate.runs, rate.rate, rate.wilson_low, rate.wilson_high
            )?;
        }
    }
    for s in &report.census {
        writeln!(
            out,
            "census {} n={}: mean window {:.1} ({:.4} n)",
            s.scheduler, s.n, s.mean_window, s.mean_normalized
        )?;
    }
    Ok(())
}

pub fn cmd_protocol_check(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let protocol = parse_protocol(&text).map_err(|source| Error::Parse { path: path.to_path_buf(), source })?;
    writeln!(out, "OK, {} states, {} rules", protocol.num_states(), protocol.rules().len()).map_err(stdout_err)?;
    for s in protocol.unreachable_states() {
        let _ = writeln!(
            err,
            "warning: state `{}` is not initial and appears in no right-hand side",
            protocol.state_name(s)
        );
    }
    Ok(0)
}

pub fn cmd_gen_protocol(args: &GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8> {
    let seed = seed_or_entropy(args.seed, err);
    let protocol = random_protocol(args.states, seed)?;
    let text = to_text(&protocol).expect("table protocols have a text form");
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e))?,
        None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
    }
    Ok(0)
}
