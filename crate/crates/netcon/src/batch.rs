//! Single runs with optional side outputs, and parallel batches.

use std::path::{Path, PathBuf};

use netcon_core::rng::derive_seed;
use netcon_core::{
    Configuration, DetectorKind, Observer, ProtocolSpec, RunResult, SchedulerKind, SchedulerParams, Simulation,
    StepEvent,
};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::experiment::ExperimentSpec;
use crate::results::ResultRow;
use crate::stats::{alpha_warning, CensusWindow, CensusWindowReport, Complexity};
use crate::trace::{SnapshotWriter, TraceWriter};

/// Side outputs of a run.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub trace: Option<PathBuf>,
    /// `(k, dir)`: write a DOT snapshot every `k` steps into `dir`.
    pub snapshots: Option<(u64, PathBuf)>,
    /// Track the census window at this threshold.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: RunResult,
    pub census: Option<CensusWindowReport>,
    pub snapshots: Vec<PathBuf>,
}

/// Parameters of one run, everything except the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSetup {
    pub scheduler: SchedulerKind,
    pub params: SchedulerParams,
    pub detector: DetectorKind,
    pub n: usize,
    pub seed: u64,
    pub max_steps: u64,
}

struct Observers<'p> {
    trace: Option<TraceWriter<std::io::BufWriter<std::fs::File>>>,
    snapshots: Option<SnapshotWriter<'p>>,
    census: Option<CensusWindow>,
}

impl Observer for Observers<'_> {
    fn observe(&mut self, event: &StepEvent, config: &Configuration) {
        if let Some(t) = &mut self.trace {
            t.observe(event, config);
        }
        if let Some(s) = &mut self.snapshots {
            s.observe(event, config);
        }
        if let Some(c) = &mut self.census {
            c.push(config.census());
        }
    }
}

pub fn execute(protocol: &ProtocolSpec, setup: &RunSetup, options: &RunOptions) -> Result<RunOutput> {
    let mut sim = Simulation::new(protocol, setup.n, setup.scheduler, setup.params, setup.detector, setup.seed)?;
    if options.trace.is_none() && options.snapshots.is_none() && options.alpha.is_none() {
        let result = sim.run(setup.max_steps);
        return Ok(RunOutput { result, census: None, snapshots: Vec::new() });
    }
    let mut obs = Observers {
        trace: options.trace.as_deref().map(TraceWriter::create).transpose()?,
        snapshots: options.snapshots.as_ref().map(|(k, dir)| SnapshotWriter::new(protocol, *k, dir)),
        census: options.alpha.map(|a| CensusWindow::new(a, setup.n)),
    };
    if let Some(s) = &mut obs.snapshots {
        s.write_now(0, sim.configuration());
    }
    let result = sim.run_observed(setup.max_steps, &mut obs);
    if let (Some(t), Some(path)) = (obs.trace, &options.trace) {
        t.finish().map_err(|e| Error::io(path, e))?;
    }
    let snapshots = match obs.snapshots {
        Some(s) => s.finish()?,
        None => Vec::new(),
    };
    let census = obs.census.map(|w| CensusWindowReport {
        alpha: options.alpha.unwrap_or_default(),
        window: w.longest(),
        normalized: w.longest() as f64 / setup.n as f64,
        total_interactions: w.steps(),
        warning: alpha_warning(options.alpha.unwrap_or_default(), protocol.num_states()),
    });
    Ok(RunOutput { result, census, snapshots })
}

/// A finished batch: rows sorted by (scheduler, n, repetition).
#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub protocol: ProtocolSpec,
    pub detector: DetectorKind,
    pub complexity: Complexity,
    pub rows: Vec<ResultRow>,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    scheduler: SchedulerKind,
    n: usize,
    rep: usize,
}

/// Runs every (scheduler, size, repetition) of `spec` on `workers` threads.
/// Seeds depend only on (base seed, n, repetition), so the output does not
/// depend on the worker count or on scheduling order.
pub fn run_batch(spec: &ExperimentSpec, workers: usize, trace_dir: Option<&Path>) -> Result<BatchOutput> {
    spec.validate()?;
    let protocol = spec.load_protocol()?;
    let detector = spec.detector_for(&protocol);
    let complexity = spec.complexity_for(&protocol);
    for &n in &spec.sizes {
        detector.validate(&protocol, n)?;
        netcon_core::init_configuration(&protocol, n)?;
    }
    let mut jobs = Vec::new();
    for &scheduler in &spec.schedulers {
        for &n in &spec.sizes {
            for rep in 0..spec.repetitions {
                jobs.push(Job { scheduler, n, rep });
            }
        }
    }
    jobs.sort_by_key(|j| (j.scheduler, j.n, j.rep));
    jobs.dedup_by_key(|j| (j.scheduler, j.n, j.rep));

    let run_job = |job: &Job| -> Result<ResultRow> {
        let seed = derive_seed(spec.base_seed, job.n, job.rep);
        let setup = RunSetup {
            scheduler: job.scheduler,
            params: spec.params,
            detector,
            n: job.n,
            seed,
            max_steps: spec.max_steps(job.n, complexity),
        };
        let options = RunOptions {
            trace: trace_dir.map(|d| d.join(format!("trace-{}-{}-{seed}.log", job.scheduler, job.n))),
            snapshots: None,
            alpha: spec.alpha,
        };
        let out = execute(&protocol, &setup, &options)?;
        Ok(row_for(&protocol, &setup, job.rep, &out))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Spec(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| jobs.par_iter().map(run_job).collect::<Result<Vec<_>>>())?;
    Ok(BatchOutput { protocol, detector, complexity, rows })
}

pub fn row_for(protocol: &ProtocolSpec, setup: &RunSetup, rep: usize, out: &RunOutput) -> ResultRow {
    let r = &out.result;
    ResultRow {
        protocol: protocol.name().to_string(),
        scheduler: setup.scheduler.name().to_string(),
        detector: setup.detector.name().to_string(),
        n: setup.n,
        rep,
        seed: setup.seed,
        b: protocol.head_start(),
        converged: r.converged,
        total: r.total_interactions,
        effective: r.effective_interactions,
        r0: r.leader_counters.map(|c| c.r0),
        r1: r.leader_counters.map(|c| c.r1),
        census_window: out.census.as_ref().map(|c| c.window),
    }
}
