//! Line-oriented protocol definition files.
//!
//! ```text
//! # comments start with '#'
//! name: faster-global-line
//! states: q0 q1 q2 q l f
//! initial: all q0            # or: initial: leader l rest q0
//! symmetric: true            # optional, defaults to false
//! rule: (q0, q0, 0) -> (q1, l, 1)
//! ```
//!
//! States must be declared before they are used. Edge states are `0`
//! (inactive) or `1` (active).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{InitialAssignment, ProtocolKind, ProtocolSpec, Rule, StateId, Triple};
use crate::engine::EdgeState;
use crate::error::ParseError;

const DEFAULT_NAME: &str = "unnamed";

pub fn parse_protocol(text: &str) -> Result<ProtocolSpec, ParseError> {
    let mut name: Option<String> = None;
    let mut states: Vec<String> = Vec::new();
    let mut states_line: Option<usize> = None;
    let mut initial: Option<InitialAssignment> = None;
    let mut symmetric: Option<bool> = None;
    let mut rules = Vec::new();
    let mut lhs_lines: BTreeMap<Triple, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (directive, value) = content
            .split_once(':')
            .ok_or_else(|| ParseError::Syntax { line, message: "expected `<directive>: <value>`".into() })?;
        let value = value.trim();
        let lookup = |symbol: &str| -> Result<StateId, ParseError> {
            states
                .iter()
                .position(|s| s == symbol)
                .map(|i| StateId(i as u16))
                .ok_or_else(|| ParseError::UndeclaredSymbol { line, symbol: symbol.to_string() })
        };
        match directive.trim() {
            "name" => {
                once(name.is_some(), line, "name")?;
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(ParseError::Syntax { line, message: "name must be a single identifier".into() });
                }
                name = Some(value.to_string());
            }
            "states" => {
                once(states_line.is_some(), line, "states")?;
                states_line = Some(line);
                for symbol in value.split_whitespace() {
                    check_symbol(symbol, line)?;
                    if states.iter().any(|s| s == symbol) {
                        return Err(ParseError::DuplicateState { line, symbol: symbol.to_string() });
                    }
                    states.push(symbol.to_string());
                }
                if states.is_empty() {
                    return Err(ParseError::Syntax { line, message: "empty state list".into() });
                }
                if states.len() > u16::MAX as usize {
                    return Err(ParseError::Syntax { line, message: "too many states".into() });
                }
            }
            "initial" => {
                once(initial.is_some(), line, "initial")?;
                let words: Vec<&str> = value.split_whitespace().collect();
                initial = Some(match words.as_slice() {
                    ["all", s] => InitialAssignment::All(lookup(s)?),
                    ["leader", l, "rest", r] => InitialAssignment::Leader { leader: lookup(l)?, rest: lookup(r)? },
                    _ => {
                        return Err(ParseError::Syntax {
                            line,
                            message: "expected `all <state>` or `leader <state> rest <state>`".into(),
                        })
                    }
                });
            }
            "symmetric" => {
                once(symmetric.is_some(), line, "symmetric")?;
                symmetric = Some(match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(ParseError::Syntax { line, message: "expected `true` or `false`".into() }),
                });
            }
            "rule" => {
                let (lhs, rhs) = value.split_once("->").ok_or_else(|| ParseError::Syntax {
                    line,
                    message: "expected `(a, b, e) -> (a', b', e')`".into(),
                })?;
                let lhs = parse_triple(lhs, line, &lookup)?;
                let rhs = parse_triple(rhs, line, &lookup)?;
                if let Some(&first_line) = lhs_lines.get(&lhs) {
                    return Err(ParseError::DuplicateLhs { line, first_line });
                }
                lhs_lines.insert(lhs, line);
                rules.push(Rule::new(lhs, rhs));
            }
            other => {
                return Err(ParseError::UnknownDirective { line, directive: other.to_string() });
            }
        }
    }

    let initial = initial.ok_or(ParseError::MissingInitial)?;
    let name = name.unwrap_or_else(|| DEFAULT_NAME.to_string());
    ProtocolSpec::new(name, states, initial, rules, symmetric.unwrap_or(false))
        .map_err(|e| ParseError::Syntax { line: states_line.unwrap_or(0), message: e.to_string() })
}

fn once(seen: bool, line: usize, directive: &str) -> Result<(), ParseError> {
    if seen {
        Err(ParseError::Syntax { line, message: alloc::format!("`{directive}` given more than once") })
    } else {
        Ok(())
    }
}

fn check_symbol(symbol: &str, line: usize) -> Result<(), ParseError> {
    if symbol.contains([',', '(', ')', ':']) {
        return Err(ParseError::Syntax { line, message: alloc::format!("invalid state name `{symbol}`") });
    }
    Ok(())
}

fn parse_triple(
    text: &str,
    line: usize,
    lookup: &dyn Fn(&str) -> Result<StateId, ParseError>,
) -> Result<Triple, ParseError> {
    let inner = text.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(|| ParseError::Syntax {
        line,
        message: alloc::format!("expected `(a, b, e)`, found `{}`", text.trim()),
    })?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let [a, b, e] = parts.as_slice() else {
        return Err(ParseError::Syntax { line, message: "a triple has exactly three components".into() });
    };
    let edge = match *e {
        "0" => EdgeState::Inactive,
        "1" => EdgeState::Active,
        other => return Err(ParseError::MalformedEdgeState { line, found: other.to_string() }),
    };
    Ok(Triple::new(lookup(a)?, lookup(b)?, edge))
}

/// Serializes a table protocol in the format accepted by [`parse_protocol`].
/// Returns `None` for the counting protocol, whose leader counters have no
/// table form.
pub fn to_text(protocol: &ProtocolSpec) -> Option<String> {
    if protocol.kind() != ProtocolKind::Table {
        return None;
    }
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", protocol.name());
    let _ = writeln!(out, "states: {}", protocol.states().join(" "));
    let _ = match protocol.initial() {
        InitialAssignment::All(s) => writeln!(out, "initial: all {}", protocol.state_name(s)),
        InitialAssignment::Leader { leader, rest } => {
            writeln!(out, "initial: leader {} rest {}", protocol.state_name(leader), protocol.state_name(rest))
        }
    };
    let _ = writeln!(out, "symmetric: {}", protocol.is_symmetric());
    for rule in protocol.rules() {
        let _ = writeln!(out, "rule: {}", protocol.display_rule(rule));
    }
    Some(out)
}
