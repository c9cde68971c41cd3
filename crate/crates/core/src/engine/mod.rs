//! Configurations, the interaction rule and the run loop.
//!
//! A run has three stages: the configuration is initialized from the
//! protocol, the scheduler drives interactions until the detector fires or
//! the step budget runs out, and the final counts and census are collected
//! into a [`RunResult`].

mod config;
mod dot;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use config::{Configuration, MAX_POPULATION};
pub use dot::snapshot;

use crate::detector::DetectorKind;
use crate::error::ConfigError;
use crate::protocol::counting::{self, CountingLeaderState, CountingRule};
use crate::protocol::{InitialAssignment, ProtocolKind, ProtocolSpec, StateId, Triple};
use crate::scheduler::{Scheduler, SchedulerKind, SchedulerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// State of the connection between two nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum EdgeState {
    #[default]
    Inactive,
    Active,
}

impl EdgeState {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            EdgeState::Inactive
        } else {
            EdgeState::Active
        }
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn is_active(self) -> bool {
        self == EdgeState::Active
    }
}

/// Leader counters `(r0, r1)` of the counting protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Counters {
    pub r0: u32,
    pub r1: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeState {
    pub symbol: StateId,
    /// Only the counting leader (running or halted) carries counters.
    pub counters: Option<Counters>,
}

impl NodeState {
    pub fn plain(symbol: StateId) -> Self {
        NodeState { symbol, counters: None }
    }
}

/// The rule that matched an interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleRef {
    /// Index into [`ProtocolSpec::rules`].
    Table(usize),
    Counting(CountingRule),
}

impl fmt::Display for RuleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleRef::Table(i) => i.fmt(f),
            RuleRef::Counting(r) => f.write_str(r.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionOutcome {
    /// Some node state or the edge state differs afterwards.
    pub changed: bool,
    pub edge_changed: bool,
    pub rule_applied: Option<RuleRef>,
}

impl InteractionOutcome {
    const NONE: InteractionOutcome = InteractionOutcome { changed: false, edge_changed: false, rule_applied: None };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub converged: bool,
    /// Every scheduler step, no-ops included.
    pub total_interactions: u64,
    pub effective_interactions: u64,
    /// `(state name, multiplicity)` in alphabet order.
    pub final_census: Vec<(String, u32)>,
    pub leader_counters: Option<Counters>,
    pub seed: u64,
}

/// Builds the initial configuration: every node in the protocol's initial
/// state, no active edges. For the counting protocol node 0 is the leader
/// `l(b, 0)`, nodes `1..=b` start in `q1` and the rest in `q0`.
pub fn init_configuration(protocol: &ProtocolSpec, n: usize) -> Result<Configuration, ConfigError> {
    if n < 2 {
        return Err(ConfigError::InvalidPopulation(n));
    }
    if n > MAX_POPULATION {
        return Err(ConfigError::PopulationTooLarge(n));
    }
    let q = protocol.num_states();
    let config = match (protocol.kind(), protocol.initial()) {
        (ProtocolKind::Counting { head_start }, _) => {
            let needed = head_start as usize + 1;
            if n < needed {
                return Err(ConfigError::HeadStartTooLarge { head_start, needed, n });
            }
            let mut c = Configuration::new(n, q, counting::Q0);
            c.set_state(
                NodeId(0),
                NodeState { symbol: counting::LEADER, counters: Some(Counters { r0: head_start, r1: 0 }) },
            );
            for v in 1..=head_start {
                c.set_state(NodeId(v), NodeState::plain(counting::Q1));
            }
            c
        }
        (ProtocolKind::Table, InitialAssignment::All(s)) => Configuration::new(n, q, s),
        (ProtocolKind::Table, InitialAssignment::Leader { leader, rest }) => {
            let mut c = Configuration::new(n, q, rest);
            c.set_state(NodeId(0), NodeState::plain(leader));
            c
        }
    };
    Ok(config)
}

/// Applies the protocol to the ordered pair `(initiator, responder)`.
///
/// A rule for `(state(initiator), state(responder), edge)` is tried first;
/// for symmetric protocols the reversed triple is tried next, with the
/// rule's first component then written to the responder. Without a match
/// the interaction is the identity.
pub fn apply_interaction(
    config: &mut Configuration,
    initiator: NodeId,
    responder: NodeId,
    protocol: &ProtocolSpec,
) -> Result<InteractionOutcome, ConfigError> {
    let n = config.n();
    for v in [initiator, responder] {
        if v.index() >= n {
            return Err(ConfigError::NodeOutOfRange { node: v.0, n });
        }
    }
    if initiator == responder {
        return Err(ConfigError::SelfInteraction(initiator.0));
    }
    Ok(interact(config, initiator, responder, protocol))
}

#[inline]
fn interact(config: &mut Configuration, a: NodeId, b: NodeId, protocol: &ProtocolSpec) -> InteractionOutcome {
    match protocol.kind() {
        ProtocolKind::Table => interact_table(config, a, b, protocol),
        ProtocolKind::Counting { .. } => interact_counting(config, a, b),
    }
}

fn interact_table(config: &mut Configuration, a: NodeId, b: NodeId, protocol: &ProtocolSpec) -> InteractionOutcome {
    let (sa, sb) = (config.state(a).symbol, config.state(b).symbol);
    let edge = config.edge(a, b);
    let (index, first, second) = match protocol.rule_index(&Triple::new(sa, sb, edge)) {
        Some(i) => (i, a, b),
        None if protocol.is_symmetric() => match protocol.rule_index(&Triple::new(sb, sa, edge)) {
            Some(i) => (i, b, a),
            None => return InteractionOutcome::NONE,
        },
        None => return InteractionOutcome::NONE,
    };
    let rhs = protocol.rules()[index].rhs;
    let mut changed = false;
    for (v, s) in [(first, rhs.initiator), (second, rhs.responder)] {
        if config.state(v).symbol != s {
            config.set_state(v, NodeState::plain(s));
            changed = true;
        }
    }
    let edge_changed = config.set_edge(a, b, rhs.edge);
    InteractionOutcome { changed: changed || edge_changed, edge_changed, rule_applied: Some(RuleRef::Table(index)) }
}

fn interact_counting(config: &mut Configuration, a: NodeId, b: NodeId) -> InteractionOutcome {
    let (leader, other) = if config.state(a).symbol == counting::LEADER {
        (a, b)
    } else if config.state(b).symbol == counting::LEADER {
        (b, a)
    } else {
        return InteractionOutcome::NONE;
    };
    let counters = config.state(leader).counters.expect("leader carries counters");
    let before = CountingLeaderState { r0: counters.r0, r1: counters.r1, halted: false };
    let (after, other_state, rule) = counting::counting_transition(before, config.state(other).symbol);
    let Some(rule) = rule else {
        return InteractionOutcome::NONE;
    };
    let symbol = if after.halted { counting::HALT } else { counting::LEADER };
    config.set_state(leader, NodeState { symbol, counters: Some(Counters { r0: after.r0, r1: after.r1 }) });
    config.set_state(other, NodeState::plain(other_state));
    InteractionOutcome { changed: true, edge_changed: false, rule_applied: Some(RuleRef::Counting(rule)) }
}

/// One scheduler step as seen by an [`Observer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepEvent {
    /// 1-based step number.
    pub step: u64,
    pub initiator: NodeId,
    pub responder: NodeId,
    pub outcome: InteractionOutcome,
    pub converged: bool,
}

/// Receives every step of a run, after the configuration was updated.
pub trait Observer {
    fn observe(&mut self, event: &StepEvent, config: &Configuration);
}

impl<F: FnMut(&StepEvent, &Configuration)> Observer for F {
    fn observe(&mut self, event: &StepEvent, config: &Configuration) {
        self(event, config)
    }
}

/// A single run: configuration, scheduler and detector, advanced one
/// interaction at a time.
pub struct Simulation<'p> {
    protocol: &'p ProtocolSpec,
    config: Configuration,
    scheduler: Scheduler,
    detector: DetectorKind,
    seed: u64,
    total: u64,
    effective: u64,
    converged: bool,
}

impl<'p> Simulation<'p> {
    pub fn new(
        protocol: &'p ProtocolSpec,
        n: usize,
        scheduler: SchedulerKind,
        params: SchedulerParams,
        detector: DetectorKind,
        seed: u64,
    ) -> Result<Self, ConfigError> {
        detector.validate(protocol, n)?;
        let config = init_configuration(protocol, n)?;
        let scheduler = Scheduler::new(scheduler, params, n, seed)?;
        let converged = detector.fires(&config);
        Ok(Simulation { protocol, config, scheduler, detector, seed, total: 0, effective: 0, converged })
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn protocol(&self) -> &ProtocolSpec {
        self.protocol
    }

    pub fn is_converged(&self) -> bool {
        self.converged
    }

    pub fn steps(&self) -> u64 {
        self.total
    }

    /// Performs one scheduler step.
    pub fn step(&mut self) -> StepEvent {
        let (a, b) = self.scheduler.next_pair(&self.config);
        let outcome = interact(&mut self.config, a, b, self.protocol);
        self.scheduler.record(a, b);
        self.total += 1;
        if outcome.changed {
            self.effective += 1;
            // the detector verdict can only move when the configuration does
            if !self.converged && self.detector.fires(&self.config) {
                self.converged = true;
            }
        }
        StepEvent { step: self.total, initiator: a, responder: b, outcome, converged: self.converged }
    }

    /// Steps until the detector fires or `max_steps` steps have been taken
    /// in total.
    pub fn run(&mut self, max_steps: u64) -> RunResult {
        while !self.converged && self.total < max_steps {
            self.step();
        }
        self.result()
    }

    pub fn run_observed(&mut self, max_steps: u64, observer: &mut impl Observer) -> RunResult {
        while !self.converged && self.total < max_steps {
            let event = self.step();
            observer.observe(&event, &self.config);
        }
        self.result()
    }

    pub fn result(&self) -> RunResult {
        let final_census = self
            .protocol
            .states()
            .iter()
            .zip(self.config.census())
            .map(|(name, &count)| (name.clone(), count))
            .collect();
        let leader_counters = match self.protocol.kind() {
            ProtocolKind::Counting { .. } => self.config.state(NodeId(0)).counters,
            ProtocolKind::Table => None,
        };
        RunResult {
            converged: self.converged,
            total_interactions: self.total,
            effective_interactions: self.effective,
            final_census,
            leader_counters,
            seed: self.seed,
        }
    }
}

/// Runs `protocol` on `n` nodes from scratch with default scheduler
/// parameters.
pub fn run(
    protocol: &ProtocolSpec,
    n: usize,
    scheduler: SchedulerKind,
    detector: DetectorKind,
    max_steps: u64,
    seed: u64,
) -> Result<RunResult, ConfigError> {
    Ok(Simulation::new(protocol, n, scheduler, SchedulerParams::default(), detector, seed)?.run(max_steps))
}
