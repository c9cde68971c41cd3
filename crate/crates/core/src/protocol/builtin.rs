//! Built-in protocols.
//!
//! The two line constructors are transcribed rule for rule. The star
//! constructor is known only from its description (centers absorb each
//! other, a node-pair edge is active iff one endpoint is the center) and is
//! realized here by the smallest table with that stable configuration. The
//! cycle cover keeps the invariant "a node in `q_i` has degree `i`".

use alloc::string::ToString;
use alloc::vec::Vec;

use super::counting::DEFAULT_HEAD_START;
use super::{names, InitialAssignment, ProtocolSpec, Rule, StateId, Triple};
use crate::engine::EdgeState;
use crate::error::ProtocolError;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] =
    [FAST_GLOBAL_LINE, FASTER_GLOBAL_LINE, GLOBAL_STAR, CYCLE_COVER, COUNTING_UPPER_BOUND];

pub const FAST_GLOBAL_LINE: &str = "fast-global-line";
pub const FASTER_GLOBAL_LINE: &str = "faster-global-line";
pub const GLOBAL_STAR: &str = "global-star";
pub const CYCLE_COVER: &str = "cycle-cover";
pub const COUNTING_UPPER_BOUND: &str = "counting-upper-bound";

type RawRule<'a> = ((&'a str, &'a str, u8), (&'a str, &'a str, u8));

const FAST_STATES: [&str; 9] = ["q0", "q1", "q2", "q2'", "l", "l'", "l''", "f0", "f1"];
const FAST_RULES: [RawRule<'static>; 8] = [
    (("q0", "q0", 0), ("q1", "l", 1)),
    (("l", "q0", 0), ("q2", "l", 1)),
    (("l", "l", 0), ("q2'", "l'", 1)),
    (("l'", "q2", 1), ("l''", "f1", 0)),
    (("l'", "q1", 1), ("l''", "f0", 0)),
    (("l''", "q2'", 1), ("l", "q2", 1)),
    (("l", "f0", 0), ("q2", "l", 1)),
    (("l", "f1", 0), ("q2'", "l'", 1)),
];

const FASTER_STATES: [&str; 6] = ["q0", "q1", "q2", "q", "l", "f"];
const FASTER_RULES: [RawRule<'static>; 6] = [
    (("q0", "q0", 0), ("q1", "l", 1)),
    (("l", "q0", 0), ("q2", "l", 1)),
    (("l", "q", 0), ("q2", "l", 1)),
    (("l", "l", 0), ("l", "f", 0)),
    (("f", "q2", 1), ("q", "f", 0)),
    (("f", "q1", 1), ("q", "q", 0)),
];

const STAR_STATES: [&str; 2] = ["c", "p"];
const STAR_RULES: [RawRule<'static>; 3] =
    [(("c", "c", 0), ("c", "p", 1)), (("c", "p", 0), ("c", "p", 1)), (("p", "p", 1), ("p", "p", 0))];

const CYCLE_STATES: [&str; 3] = ["q0", "q1", "q2"];
const CYCLE_RULES: [RawRule<'static>; 4] = [
    (("q0", "q0", 0), ("q1", "q1", 1)),
    (("q0", "q1", 0), ("q1", "q2", 1)),
    (("q1", "q0", 0), ("q2", "q1", 1)),
    (("q1", "q1", 0), ("q2", "q2", 1)),
];

/// Looks up a built-in protocol by name. The counting protocol uses the
/// default head start; see [`super::counting::counting_protocol`] to pick another.
pub fn builtin(name: &str) -> Result<ProtocolSpec, ProtocolError> {
    match name {
        FAST_GLOBAL_LINE => Ok(table(name, &FAST_STATES, &FAST_RULES)),
        FASTER_GLOBAL_LINE => Ok(table(name, &FASTER_STATES, &FASTER_RULES)),
        GLOBAL_STAR => Ok(table(name, &STAR_STATES, &STAR_RULES)),
        CYCLE_COVER => Ok(table(name, &CYCLE_STATES, &CYCLE_RULES)),
        COUNTING_UPPER_BOUND => Ok(super::counting::counting_protocol(DEFAULT_HEAD_START)),
        other => Err(ProtocolError::UnknownBuiltin(other.to_string())),
    }
}

fn table(name: &str, states: &[&str], raw: &[RawRule<'_>]) -> ProtocolSpec {
    let id = |s: &str| StateId(states.iter().position(|x| *x == s).expect("built-in state") as u16);
    let triple = |(a, b, e): (&str, &str, u8)| Triple::new(id(a), id(b), EdgeState::from_bit(e));
    let rules: Vec<Rule> = raw.iter().map(|&(l, r)| Rule::new(triple(l), triple(r))).collect();
    // initial state is always the first listed
    ProtocolSpec::new(name, names(states), InitialAssignment::All(StateId(0)), rules, true)
        .expect("built-in tables are well formed")
}
