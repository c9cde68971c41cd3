//! Probabilistic schedulers.
//!
//! Every scheduler picks the initiator `A` uniformly and differs only in
//! how it picks the responder `B`:
//!
//! * `Random`: uniform over the other `n - 1` nodes.
//! * `History`: with probability 0.75 a uniform entry of `A`'s record of its
//!   last 50 partners, otherwise uniform.
//! * `ReverseHistory`: as `History` with 0.25.
//! * `Connection`: with probability 0.8 a uniform active neighbor of `A`,
//!   otherwise uniform.
//!
//! Whenever the biased branch has nothing to choose from (empty history,
//! isolated `A`) the uniform branch is used. The uniform branch always has
//! positive mass, so every ordered pair stays reachable at every step.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Configuration, NodeId};
use crate::error::ConfigError;
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchedulerKind {
    Random,
    History,
    ReverseHistory,
    Connection,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] =
        [SchedulerKind::Random, SchedulerKind::History, SchedulerKind::ReverseHistory, SchedulerKind::Connection];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Random => "random",
            SchedulerKind::History => "history",
            SchedulerKind::ReverseHistory => "reverse-history",
            SchedulerKind::Connection => "connection",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchedulerKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| alloc::format!("unknown scheduler `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerParams {
    pub history_capacity: usize,
    /// Probability of drawing from the history under `History`.
    pub history_bias: f64,
    /// Probability of drawing from the history under `ReverseHistory`.
    pub reverse_history_bias: f64,
    /// Probability of drawing an active neighbor under `Connection`.
    pub connection_bias: f64,
}

impl Default for SchedulerParams {
    fn default() -> Self {
        SchedulerParams { history_capacity: 50, history_bias: 0.75, reverse_history_bias: 0.25, connection_bias: 0.8 }
    }
}

impl SchedulerParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.history_capacity == 0 {
            return Err(ConfigError::ZeroHistoryCapacity);
        }
        for p in [self.history_bias, self.reverse_history_bias, self.connection_bias] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::InvalidProbability(p));
            }
        }
        Ok(())
    }
}

/// The most recent interaction partners of one node, newest first.
/// Repeated partners occupy several slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryBuffer {
    entries: VecDeque<NodeId>,
    capacity: usize,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        HistoryBuffer { entries: VecDeque::new(), capacity }
    }

    pub fn push(&mut self, partner: NodeId) {
        if self.entries.len() == self.capacity {
            self.entries.pop_back();
        }
        self.entries.push_front(partner);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn most_recent(&self) -> Option<NodeId> {
        self.entries.front().copied()
    }

    pub fn get(&self, i: usize) -> Option<NodeId> {
        self.entries.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().copied()
    }
}

#[inline]
pub fn draw_initiator<R: Rng + ?Sized>(n: usize, rng: &mut R) -> NodeId {
    NodeId(rng.gen_range(0..n as u32))
}

/// Uniform over the `n - 1` nodes other than `a`.
#[inline]
pub fn partner_uniform<R: Rng + ?Sized>(n: usize, a: NodeId, rng: &mut R) -> NodeId {
    let r = rng.gen_range(0..n as u32 - 1);
    NodeId(if r >= a.0 { r + 1 } else { r })
}

pub fn partner_from_history<R: Rng + ?Sized>(
    n: usize,
    a: NodeId,
    history: &HistoryBuffer,
    bias: f64,
    rng: &mut R,
) -> NodeId {
    if !history.is_empty() && rng.gen_bool(bias) {
        let b = history.entries[rng.gen_range(0..history.len() as u32) as usize];
        debug_assert_ne!(a, b, "histories never contain their owner");
        return b;
    }
    partner_uniform(n, a, rng)
}

pub fn partner_from_links<R: Rng + ?Sized>(
    n: usize,
    a: NodeId,
    neighbors: &[NodeId],
    bias: f64,
    rng: &mut R,
) -> NodeId {
    if !neighbors.is_empty() && rng.gen_bool(bias) {
        return neighbors[rng.gen_range(0..neighbors.len() as u32) as usize];
    }
    partner_uniform(n, a, rng)
}

pub fn next_pair_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (NodeId, NodeId) {
    let a = draw_initiator(n, rng);
    (a, partner_uniform(n, a, rng))
}

pub fn next_pair_history<R: Rng + ?Sized>(
    n: usize,
    histories: &[HistoryBuffer],
    bias: f64,
    rng: &mut R,
) -> (NodeId, NodeId) {
    let a = draw_initiator(n, rng);
    (a, partner_from_history(n, a, &histories[a.index()], bias, rng))
}

pub fn next_pair_connection<R: Rng + ?Sized>(
    n: usize,
    config: &Configuration,
    bias: f64,
    rng: &mut R,
) -> (NodeId, NodeId) {
    let a = draw_initiator(n, rng);
    (a, partner_from_links(n, a, config.neighbors(a), bias, rng))
}

/// Scheduler of one run: its kind, per-node histories and its own stream.
#[derive(Debug, Clone)]
pub struct Scheduler {
    kind: SchedulerKind,
    params: SchedulerParams,
    n: usize,
    histories: Vec<HistoryBuffer>,
    rng: ChaCha8Rng,
}

impl Scheduler {
    pub fn new(kind: SchedulerKind, params: SchedulerParams, n: usize, seed: u64) -> Result<Self, ConfigError> {
        if n < 2 {
            return Err(ConfigError::InvalidPopulation(n));
        }
        params.validate()?;
        let histories = match kind {
            SchedulerKind::History | SchedulerKind::ReverseHistory => {
                (0..n).map(|_| HistoryBuffer::new(params.history_capacity)).collect()
            }
            _ => Vec::new(),
        };
        Ok(Scheduler { kind, params, n, histories, rng: stream(seed, Stream::Scheduler) })
    }

    pub fn kind(&self) -> SchedulerKind {
        self.kind
    }

    pub fn params(&self) -> &SchedulerParams {
        &self.params
    }

    /// Empty for schedulers that keep no history.
    pub fn histories(&self) -> &[HistoryBuffer] {
        &self.histories
    }

    /// Draws the next ordered pair. `config` is only consulted by `Connection`.
    #[inline]
    pub fn next_pair(&mut self, config: &Configuration) -> (NodeId, NodeId) {
        let n = self.n;
        match self.kind {
            SchedulerKind::Random => next_pair_random(n, &mut self.rng),
            SchedulerKind::History => next_pair_history(n, &self.histories, self.params.history_bias, &mut self.rng),
            SchedulerKind::ReverseHistory => {
                next_pair_history(n, &self.histories, self.params.reverse_history_bias, &mut self.rng)
            }
            SchedulerKind::Connection => next_pair_connection(n, config, self.params.connection_bias, &mut self.rng),
        }
    }

    /// Records that `a` and `b` interacted.
    #[inline]
    pub fn record(&mut self, a: NodeId, b: NodeId) {
        if !self.histories.is_empty() {
            self.histories[a.index()].push(b);
            self.histories[b.index()].push(a);
        }
    }
}
