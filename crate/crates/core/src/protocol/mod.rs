//! Protocol definitions: state alphabets, transition tables and the
//! parametric counting protocol.

pub mod builtin;
pub mod counting;
pub mod random;
pub mod text;

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::EdgeState;
use crate::error::ProtocolError;

/// Index of a state symbol in a protocol's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u16);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One side of a transition: two node states and the state of their edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub initiator: StateId,
    pub responder: StateId,
    pub edge: EdgeState,
}

impl Triple {
    pub fn new(initiator: StateId, responder: StateId, edge: EdgeState) -> Self {
        Triple { initiator, responder, edge }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Triple,
    pub rhs: Triple,
}

impl Rule {
    pub fn new(lhs: Triple, rhs: Triple) -> Self {
        Rule { lhs, rhs }
    }

    pub fn is_identity(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// How nodes are populated at time zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialAssignment {
    /// Every node starts in the same state.
    All(StateId),
    /// Node 0 starts as the leader, everyone else in `rest`.
    Leader { leader: StateId, rest: StateId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Table,
    /// The counting-upper-bound protocol; the leader carries two counters
    /// and `head_start` is the initial lead of the first counter.
    Counting {
        head_start: u32,
    },
}

/// An immutable protocol description. Shareable across concurrent runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolSpec {
    name: String,
    states: Vec<String>,
    initial: InitialAssignment,
    rules: Vec<Rule>,
    symmetric: bool,
    kind: ProtocolKind,
    // dense (initiator, responder, edge) -> rule index
    lookup: Vec<Option<u32>>,
}

impl ProtocolSpec {
    /// Builds a table protocol. Rules must reference states of `states`
    /// and no two rules may share a left-hand side.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        initial: InitialAssignment,
        rules: Vec<Rule>,
        symmetric: bool,
    ) -> Result<Self, ProtocolError> {
        Self::build(name.into(), states, initial, rules, symmetric, ProtocolKind::Table)
    }

    pub(crate) fn build(
        name: String,
        states: Vec<String>,
        initial: InitialAssignment,
        rules: Vec<Rule>,
        symmetric: bool,
        kind: ProtocolKind,
    ) -> Result<Self, ProtocolError> {
        if states.is_empty() {
            return Err(ProtocolError::EmptyAlphabet);
        }
        if states.len() > u16::MAX as usize {
            return Err(ProtocolError::TooManyStates(states.len()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(ProtocolError::DuplicateState(s.clone()));
            }
        }
        let q = states.len();
        let in_range = |s: StateId| s.index() < q;
        match initial {
            InitialAssignment::All(s) if !in_range(s) => {
                return Err(ProtocolError::StateOutOfRange { rule: usize::MAX, state: s.0 })
            }
            InitialAssignment::Leader { leader, rest } if !in_range(leader) || !in_range(rest) => {
                let bad = if in_range(leader) { rest } else { leader };
                return Err(ProtocolError::StateOutOfRange { rule: usize::MAX, state: bad.0 });
            }
            _ => {}
        }
        let mut lookup = vec![None; q * q * 2];
        for (i, rule) in rules.iter().enumerate() {
            for s in [rule.lhs.initiator, rule.lhs.responder, rule.rhs.initiator, rule.rhs.responder] {
                if !in_range(s) {
                    return Err(ProtocolError::StateOutOfRange { rule: i, state: s.0 });
                }
            }
            let slot = &mut lookup[slot_of(q, &rule.lhs)];
            if let Some(first) = *slot {
                return Err(ProtocolError::DuplicateLhs { first: first as usize, second: i });
            }
            *slot = Some(i as u32);
        }
        Ok(ProtocolSpec { name, states, initial, rules, symmetric, kind, lookup })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u16))
    }

    pub fn initial(&self) -> InitialAssignment {
        self.initial
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// When set, an interaction presented as `(a, b)` that has no rule is
    /// retried as `(b, a)`.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn head_start(&self) -> Option<u32> {
        match self.kind {
            ProtocolKind::Counting { head_start } => Some(head_start),
            ProtocolKind::Table => None,
        }
    }

    /// Index of the rule whose left-hand side is exactly `lhs`.
    #[inline]
    pub fn rule_index(&self, lhs: &Triple) -> Option<usize> {
        let q = self.states.len();
        if lhs.initiator.index() >= q || lhs.responder.index() >= q {
            return None;
        }
        self.lookup[slot_of(q, lhs)].map(|i| i as usize)
    }

    pub fn find_rule(&self, lhs: &Triple) -> Option<&Rule> {
        self.rule_index(lhs).map(|i| &self.rules[i])
    }

    /// States that occur in no right-hand side and are not initial. They
    /// can never be occupied.
    pub fn unreachable_states(&self) -> Vec<StateId> {
        if let ProtocolKind::Counting { .. } = self.kind {
            return Vec::new();
        }
        let mut seen = vec![false; self.states.len()];
        match self.initial {
            InitialAssignment::All(s) => seen[s.index()] = true,
            InitialAssignment::Leader { leader, rest } => {
                seen[leader.index()] = true;
                seen[rest.index()] = true;
            }
        }
        for r in &self.rules {
            seen[r.rhs.initiator.index()] = true;
            seen[r.rhs.responder.index()] = true;
        }
        (0..self.states.len()).filter(|&i| !seen[i]).map(|i| StateId(i as u16)).collect()
    }

    /// Renders `rule` with state names, e.g. `(l, q0, 0) -> (q2, l, 1)`.
    pub fn display_rule<'a>(&'a self, rule: &'a Rule) -> impl fmt::Display + 'a {
        DisplayRule { protocol: self, rule }
    }
}

#[inline]
fn slot_of(q: usize, t: &Triple) -> usize {
    (t.initiator.index() * q + t.responder.index()) * 2 + t.edge.bit() as usize
}

pub(crate) fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

struct DisplayRule<'a> {
    protocol: &'a ProtocolSpec,
    rule: &'a Rule,
}

impl fmt::Display for DisplayRule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.protocol;
        let (l, r) = (&self.rule.lhs, &self.rule.rhs);
        write!(
            f,
            "({}, {}, {}) -> ({}, {}, {})",
            p.state_name(l.initiator),
            p.state_name(l.responder),
            l.edge.bit(),
            p.state_name(r.initiator),
            p.state_name(r.responder),
            r.edge.bit()
        )
    }
}
