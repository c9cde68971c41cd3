//! Event traces and periodic DOT snapshots.
//!
//! A trace has one line per scheduler step:
//!
//! ```text
//! # step initiator responder rule changed
//! 1 3 0 0 1
//! 2 1 2 - 0
//! ```
//!
//! `rule` is the index of the matched table rule, the name of the counting
//! rule, or `-` when nothing matched. `changed` is `1` when a node or edge
//! state changed.

use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use netcon_core::engine::snapshot;
use netcon_core::{Configuration, NodeId, Observer, ProtocolSpec, StepEvent};

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "# step initiator responder rule changed";

/// Writes every step of a run. I/O errors are kept and reported by
/// [`TraceWriter::finish`].
pub struct TraceWriter<W: Write> {
    out: W,
    error: Option<io::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> Self {
        let error = writeln!(out, "{TRACE_HEADER}").err();
        TraceWriter { out, error }
    }

    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(TraceWriter::new(BufWriter::new(file)))
    }
}

impl<W: Write> Observer for TraceWriter<W> {
    fn observe(&mut self, event: &StepEvent, _config: &Configuration) {
        if self.error.is_some() {
            return;
        }
        let rule = match event.outcome.rule_applied {
            Some(r) => r.to_string(),
            None => "-".to_string(),
        };
        let res = writeln!(
            self.out,
            "{} {} {} {} {}",
            event.step, event.initiator, event.responder, rule, event.outcome.changed as u8
        );
        self.error = res.err();
    }
}

/// One parsed trace line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub step: u64,
    pub initiator: NodeId,
    pub responder: NodeId,
    pub rule: Option<String>,
    pub changed: bool,
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceLine>, String> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = || format!("line {}: malformed trace entry `{line}`", i + 1);
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [step, a, b, rule, changed] = parts.as_slice() else {
            return Err(bad());
        };
        out.push(TraceLine {
            step: step.parse().map_err(|_| bad())?,
            initiator: NodeId(a.parse().map_err(|_| bad())?),
            responder: NodeId(b.parse().map_err(|_| bad())?),
            rule: (*rule != "-").then(|| rule.to_string()),
            changed: match *changed {
                "0" => false,
                "1" => true,
                _ => return Err(bad()),
            },
        });
    }
    Ok(out)
}

/// Writes `snapshot-<step>.dot` into a directory every `every` steps.
pub struct SnapshotWriter<'p> {
    protocol: &'p ProtocolSpec,
    every: u64,
    dir: PathBuf,
    written: Vec<PathBuf>,
    error: Option<Error>,
}

impl<'p> SnapshotWriter<'p> {
    pub fn new(protocol: &'p ProtocolSpec, every: u64, dir: impl Into<PathBuf>) -> Self {
        SnapshotWriter { protocol, every: every.max(1), dir: dir.into(), written: Vec::new(), error: None }
    }

    pub fn write_now(&mut self, step: u64, config: &Configuration) {
        let path = self.dir.join(format!("snapshot-{step}.dot"));
        match std::fs::write(&path, snapshot(config, self.protocol)) {
            Ok(()) => self.written.push(path),
            Err(e) => self.error = Some(Error::io(path, e)),
        }
    }

    pub fn finish(self) -> Result<Vec<PathBuf>> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.written),
        }
    }
}

impl Observer for SnapshotWriter<'_> {
    fn observe(&mut self, event: &StepEvent, config: &Configuration) {
        if self.error.is_none() && event.step.is_multiple_of(self.every) {
            self.write_now(event.step, config);
        }
    }
}
