use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::{InitialAssignment, ProtocolSpec, Rule, StateId, Triple};
use crate::engine::EdgeState;
use crate::error::ProtocolError;
use crate::rng::{stream, Stream};

pub const MIN_RANDOM_STATES: usize = 2;
pub const MAX_RANDOM_STATES: usize = 16;

/// A total random transition table over `num_states` states named
/// `q0..`. Every node starts in `q0`; each of the `2 * num_states^2`
/// left-hand sides gets a right-hand side drawn uniformly.
pub fn random_protocol(num_states: usize, seed: u64) -> Result<ProtocolSpec, ProtocolError> {
    if !(MIN_RANDOM_STATES..=MAX_RANDOM_STATES).contains(&num_states) {
        return Err(ProtocolError::StateCountOutOfRange(num_states));
    }
    let mut rng = stream(seed, Stream::ProtocolGeneration);
    let q = num_states as u16;
    let mut rules = Vec::with_capacity(num_states * num_states * 2);
    for a in 0..q {
        for b in 0..q {
            for e in [EdgeState::Inactive, EdgeState::Active] {
                let rhs = Triple::new(
                    StateId(rng.gen_range(0..q)),
                    StateId(rng.gen_range(0..q)),
                    EdgeState::from_bit(rng.gen_range(0..2u8)),
                );
                rules.push(Rule::new(Triple::new(StateId(a), StateId(b), e), rhs));
            }
        }
    }
    let names = (0..num_states).map(|i| format!("q{i}")).collect();
    ProtocolSpec::new(format!("random-{num_states}-{seed}"), names, InitialAssignment::All(StateId(0)), rules, false)
}
