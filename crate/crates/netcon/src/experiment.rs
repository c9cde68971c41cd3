//! Experiment descriptions and their TOML file format.
//!
//! ```toml
//! protocol = "faster-global-line"     # or: protocol_file = "line.proto"
//! schedulers = ["random", "history"]  # default: ["random"]
//! detector = "line"                   # default: the protocol's own target
//! sizes = [100, 200, 300]
//! reps = 30
//! seed = 1
//! max_steps = 5000000                 # or: max_steps_factor = 50 (times f(n))
//! head_start = 2                      # counting protocol only
//! complexity = "n3"                   # n2 | n2logn | n3
//! alpha = 0.05                        # enables census-window tracking
//! history_capacity = 50
//! history_bias = 0.75
//! reverse_history_bias = 0.25
//! connection_bias = 0.8
//! ```
//!
//! A relative `protocol_file` is resolved against the spec file's directory.

use std::path::{Path, PathBuf};

use netcon_core::protocol::builtin::{self, builtin};
use netcon_core::protocol::counting::{counting_protocol, DEFAULT_HEAD_START};
use netcon_core::protocol::text::parse_protocol;
use netcon_core::{DetectorKind, ProtocolSpec, SchedulerKind, SchedulerParams};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::stats::{Complexity, MAX_STEP_CAP};

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepBudget {
    /// `50 f(n)`, capped.
    Default,
    Absolute(u64),
    /// A multiple of `f(n)`, capped.
    Factor(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub protocol: ProtocolSource,
    pub schedulers: Vec<SchedulerKind>,
    pub params: SchedulerParams,
    pub detector: Option<DetectorKind>,
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub base_seed: u64,
    pub budget: StepBudget,
    pub head_start: u32,
    pub complexity: Option<Complexity>,
    pub alpha: Option<f64>,
}

impl ExperimentSpec {
    /// A spec with one scheduler, default budget and default head start.
    pub fn new(protocol: ProtocolSource, sizes: Vec<usize>, repetitions: usize, base_seed: u64) -> Self {
        ExperimentSpec {
            protocol,
            schedulers: vec![SchedulerKind::Random],
            params: SchedulerParams::default(),
            detector: None,
            sizes,
            repetitions,
            base_seed,
            budget: StepBudget::Default,
            head_start: DEFAULT_HEAD_START,
            complexity: None,
            alpha: None,
        }
    }

    pub fn builtin(name: &str, sizes: Vec<usize>, repetitions: usize, base_seed: u64) -> Self {
        Self::new(ProtocolSource::Builtin(name.into()), sizes, repetitions, base_seed)
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        raw.into_spec(base_dir)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Spec("reps must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::Spec("at least one population size is required".into()));
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Spec(format!("population sizes must be at least 2, got {n}")));
        }
        if self.schedulers.is_empty() {
            return Err(Error::Spec("at least one scheduler is required".into()));
        }
        match self.budget {
            StepBudget::Absolute(0) => return Err(Error::Spec("max_steps must be positive".into())),
            StepBudget::Factor(f) if f.is_nan() || f <= 0.0 => {
                return Err(Error::Spec("max_steps_factor must be positive".into()))
            }
            _ => {}
        }
        if let Some(a) = self.alpha {
            if !a.is_finite() {
                return Err(Error::Spec("alpha must be finite".into()));
            }
        }
        self.params.validate()?;
        Ok(())
    }

    pub fn load_protocol(&self) -> Result<ProtocolSpec> {
        load_protocol(&self.protocol, self.head_start)
    }

    pub fn detector_for(&self, protocol: &ProtocolSpec) -> DetectorKind {
        self.detector.unwrap_or_else(|| default_detector(protocol))
    }

    pub fn complexity_for(&self, protocol: &ProtocolSpec) -> Complexity {
        self.complexity.unwrap_or_else(|| Complexity::for_protocol(protocol.name()))
    }

    pub fn max_steps(&self, n: usize, complexity: Complexity) -> u64 {
        step_budget(self.budget, n, complexity)
    }
}

pub fn step_budget(budget: StepBudget, n: usize, complexity: Complexity) -> u64 {
    match budget {
        StepBudget::Default => complexity.default_budget(n),
        StepBudget::Absolute(s) => s,
        StepBudget::Factor(f) => {
            let steps = f * complexity.eval(n);
            if steps >= MAX_STEP_CAP as f64 {
                MAX_STEP_CAP
            } else {
                steps.ceil().max(1.0) as u64
            }
        }
    }
}

/// Resolves a protocol source. The head start only affects the counting protocol.
pub fn load_protocol(source: &ProtocolSource, head_start: u32) -> Result<ProtocolSpec> {
    match source {
        ProtocolSource::Builtin(name) if name == builtin::COUNTING_UPPER_BOUND => Ok(counting_protocol(head_start)),
        ProtocolSource::Builtin(name) => Ok(builtin(name)?),
        ProtocolSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_protocol(&text).map_err(|source| Error::Parse { path: path.clone(), source })
        }
    }
}

/// The structural target of a built-in protocol; `None` for anything else.
pub fn default_detector(protocol: &ProtocolSpec) -> DetectorKind {
    match protocol.name() {
        builtin::FAST_GLOBAL_LINE | builtin::FASTER_GLOBAL_LINE => DetectorKind::SpanningLine,
        builtin::GLOBAL_STAR => DetectorKind::SpanningStar,
        builtin::CYCLE_COVER => DetectorKind::CycleCover,
        builtin::COUNTING_UPPER_BOUND => DetectorKind::CountingHalt,
        _ => DetectorKind::None,
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    protocol: Option<String>,
    protocol_file: Option<PathBuf>,
    schedulers: Option<Vec<String>>,
    detector: Option<String>,
    sizes: Vec<usize>,
    reps: usize,
    seed: u64,
    max_steps: Option<u64>,
    max_steps_factor: Option<f64>,
    head_start: Option<u32>,
    complexity: Option<String>,
    alpha: Option<f64>,
    history_capacity: Option<usize>,
    history_bias: Option<f64>,
    reverse_history_bias: Option<f64>,
    connection_bias: Option<f64>,
}

impl RawSpec {
    fn into_spec(self, base_dir: &Path) -> Result<ExperimentSpec> {
        let protocol = match (self.protocol, self.protocol_file) {
            (Some(name), None) => ProtocolSource::Builtin(name),
            (None, Some(path)) => ProtocolSource::File(base_dir.join(path)),
            _ => return Err(Error::Spec("exactly one of `protocol` and `protocol_file` is required".into())),
        };
        let schedulers = match self.schedulers {
            Some(list) => list.iter().map(|s| s.parse().map_err(Error::Spec)).collect::<Result<_>>()?,
            None => vec![SchedulerKind::Random],
        };
        let detector = self.detector.map(|d| d.parse().map_err(Error::Spec)).transpose()?;
        let complexity = self.complexity.map(|c| c.parse().map_err(Error::Spec)).transpose()?;
        let budget = match (self.max_steps, self.max_steps_factor) {
            (None, None) => StepBudget::Default,
            (Some(s), None) => StepBudget::Absolute(s),
            (None, Some(f)) => StepBudget::Factor(f),
            _ => return Err(Error::Spec("give at most one of `max_steps` and `max_steps_factor`".into())),
        };
        let defaults = SchedulerParams::default();
        let spec = ExperimentSpec {
            protocol,
            schedulers,
            params: SchedulerParams {
                history_capacity: self.history_capacity.unwrap_or(defaults.history_capacity),
                history_bias: self.history_bias.unwrap_or(defaults.history_bias),
                reverse_history_bias: self.reverse_history_bias.unwrap_or(defaults.reverse_history_bias),
                connection_bias: self.connection_bias.unwrap_or(defaults.connection_bias),
            },
            detector,
            sizes: self.sizes,
            repetitions: self.reps,
            base_seed: self.seed,
            budget,
            head_start: self.head_start.unwrap_or(DEFAULT_HEAD_START),
            complexity,
            alpha: self.alpha,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_spec() {
        let text = r#"
            protocol_file = "p.txt"
            schedulers = ["random", "connection"]
            detector = "ring"
            sizes = [10, 20]
            reps = 3
            seed = 9
            max_steps_factor = 2.5
            complexity = "n2"
            connection_bias = 0.5
        "#;
        let s = ExperimentSpec::from_toml(text, Path::new("/tmp/x")).unwrap();
        assert_eq!(s.protocol, ProtocolSource::File(PathBuf::from("/tmp/x/p.txt")));
        assert_eq!(s.schedulers, vec![SchedulerKind::Random, SchedulerKind::Connection]);
        assert_eq!(s.detector, Some(DetectorKind::SpanningRing));
        assert_eq!(s.budget, StepBudget::Factor(2.5));
        assert_eq!(s.params.connection_bias, 0.5);
        assert_eq!(s.max_steps(10, Complexity::Quadratic), 250);
    }

    #[test]
    fn rejects_bad_specs() {
        let base = Path::new(".");
        assert!(ExperimentSpec::from_toml("sizes=[10]\nreps=1\nseed=0\n", base).is_err());
        assert!(ExperimentSpec::from_toml("protocol='global-star'\nsizes=[10]\nreps=0\nseed=0\n", base).is_err());
        assert!(ExperimentSpec::from_toml("protocol='global-star'\nsizes=[1]\nreps=1\nseed=0\n", base).is_err());
        assert!(
            ExperimentSpec::from_toml("protocol='global-star'\nsizes=[5]\nreps=1\nseed=0\nbogus=1\n", base).is_err()
        );
        assert!(ExperimentSpec::from_toml(
            "protocol='global-star'\nsizes=[5]\nreps=1\nseed=0\nschedulers=['worst']\n",
            base
        )
        .is_err());
    }

    #[test]
    fn head_start_reaches_counting_protocol() {
        let mut s = ExperimentSpec::builtin("counting-upper-bound", vec![10], 1, 0);
        s.head_start = 5;
        assert_eq!(s.load_protocol().unwrap().head_start(), Some(5));
        assert_eq!(s.detector_for(&s.load_protocol().unwrap()), DetectorKind::CountingHalt);
    }
}
