//! Counting-upper-bound protocol.
//!
//! A unique leader `l(r0, r1)` races two counters: `r0` counts the `q0`s
//! it converts to `q1`, `r1` counts the `q1`s it converts to `q2`. `r0`
//! starts with a head start `b` and the leader halts on its first
//! interaction after `r1` has caught up.

use alloc::vec::Vec;

use super::{names, InitialAssignment, ProtocolKind, ProtocolSpec, StateId};

pub const DEFAULT_HEAD_START: u32 = 2;

pub const LEADER: StateId = StateId(0);
pub const Q0: StateId = StateId(1);
pub const Q1: StateId = StateId(2);
pub const Q2: StateId = StateId(3);
pub const HALT: StateId = StateId(4);

const STATES: [&str; 5] = ["l", "q0", "q1", "q2", "halt"];

/// The counting protocol with head start `head_start`.
pub fn counting_protocol(head_start: u32) -> ProtocolSpec {
    ProtocolSpec::build(
        super::builtin::COUNTING_UPPER_BOUND.into(),
        names(&STATES),
        InitialAssignment::Leader { leader: LEADER, rest: Q0 },
        Vec::new(),
        true,
        ProtocolKind::Counting { head_start },
    )
    .expect("counting alphabet is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountingLeaderState {
    pub r0: u32,
    pub r1: u32,
    pub halted: bool,
}

impl CountingLeaderState {
    pub fn new(head_start: u32) -> Self {
        CountingLeaderState { r0: head_start, r1: 0, halted: false }
    }
}

/// Which counting rule fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountingRule {
    CountQ0,
    CountQ1,
    Halt,
}

impl CountingRule {
    pub fn label(self) -> &'static str {
        match self {
            CountingRule::CountQ0 => "count-q0",
            CountingRule::CountQ1 => "count-q1",
            CountingRule::Halt => "halt",
        }
    }
}

/// One leader interaction against a node in state `other`.
///
/// The halt check comes first: a leader with `r0 == r1` halts whoever it
/// meets. A halted leader is inert.
pub fn counting_transition(
    leader: CountingLeaderState,
    other: StateId,
) -> (CountingLeaderState, StateId, Option<CountingRule>) {
    if leader.halted {
        return (leader, other, None);
    }
    if leader.r0 == leader.r1 {
        return (CountingLeaderState { halted: true, ..leader }, other, Some(CountingRule::Halt));
    }
    match other {
        Q0 => (CountingLeaderState { r0: leader.r0 + 1, ..leader }, Q1, Some(CountingRule::CountQ0)),
        Q1 => (CountingLeaderState { r1: leader.r1 + 1, ..leader }, Q2, Some(CountingRule::CountQ1)),
        _ => (leader, other, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leader(r0: u32, r1: u32) -> CountingLeaderState {
        CountingLeaderState { r0, r1, halted: false }
    }

    #[test]
    fn meeting_q0_counts_first_counter() {
        let (l, other, rule) = counting_transition(leader(3, 2), Q0);
        assert_eq!((l, other, rule), (leader(4, 2), Q1, Some(CountingRule::CountQ0)));
    }

    #[test]
    fn meeting_q1_counts_second_counter() {
        let (l, other, _) = counting_transition(leader(3, 1), Q1);
        assert_eq!((l, other), (leader(3, 2), Q2));
    }

    #[test]
    fn equal_counters_halt_on_next_interaction() {
        for other in [Q0, Q1, Q2] {
            let (l, o, rule) = counting_transition(leader(3, 3), other);
            assert!(l.halted);
            assert_eq!((l.r0, l.r1), (3, 3));
            assert_eq!(o, other);
            assert_eq!(rule, Some(CountingRule::Halt));
        }
    }

    #[test]
    fn q2_is_absorbing() {
        assert_eq!(counting_transition(leader(5, 2), Q2), (leader(5, 2), Q2, None));
    }

    #[test]
    fn halted_leader_is_inert() {
        let h = CountingLeaderState { r0: 4, r1: 4, halted: true };
        assert_eq!(counting_transition(h, Q0), (h, Q0, None));
    }

    #[test]
    fn protocol_alphabet() {
        let p = counting_protocol(2);
        assert_eq!(p.state_name(LEADER), "l");
        assert_eq!(p.state_name(HALT), "halt");
        assert_eq!(p.head_start(), Some(2));
        assert!(p.rules().is_empty());
    }
}
