use alloc::string::String;

use thiserror::Error;

/// Errors raised while building a [`ProtocolSpec`](crate::ProtocolSpec) in code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("unknown built-in protocol `{0}`")]
    UnknownBuiltin(String),
    #[error("state alphabet is empty")]
    EmptyAlphabet,
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("too many states ({0}); at most 65535 are supported")]
    TooManyStates(usize),
    #[error("rule {rule} references state index {state} outside the alphabet")]
    StateOutOfRange { rule: usize, state: u16 },
    #[error("rules {first} and {second} share the same left-hand side")]
    DuplicateLhs { first: usize, second: usize },
    #[error("random protocols need between 2 and 16 states, got {0}")]
    StateCountOutOfRange(usize),
}

/// Errors from the protocol text parser. Every variant carries the
/// 1-based line it was raised on, except [`ParseError::MissingInitial`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: undeclared state `{symbol}`")]
    UndeclaredSymbol { line: usize, symbol: String },
    #[error("line {line}: duplicate left-hand side, first declared on line {first_line}")]
    DuplicateLhs { line: usize, first_line: usize },
    #[error("line {line}: edge state must be 0 or 1, found `{found}`")]
    MalformedEdgeState { line: usize, found: String },
    #[error("missing `initial:` directive")]
    MissingInitial,
    #[error("line {line}: state `{symbol}` declared twice")]
    DuplicateState { line: usize, symbol: String },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::UndeclaredSymbol { line, .. }
            | ParseError::DuplicateLhs { line, .. }
            | ParseError::MalformedEdgeState { line, .. }
            | ParseError::DuplicateState { line, .. }
            | ParseError::UnknownDirective { line, .. }
            | ParseError::Syntax { line, .. } => Some(*line),
            ParseError::MissingInitial => None,
        }
    }
}

/// Errors raised when setting up or driving a run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("population size must be at least 2, got {0}")]
    InvalidPopulation(usize),
    #[error("population size {0} exceeds the supported maximum")]
    PopulationTooLarge(usize),
    #[error("node {0} cannot interact with itself")]
    SelfInteraction(u32),
    #[error("node {node} is outside a population of {n}")]
    NodeOutOfRange { node: u32, n: usize },
    #[error("detector `{detector}` cannot be used with protocol `{protocol}`")]
    IncompatibleDetector { detector: &'static str, protocol: String },
    #[error("the spanning-ring detector needs at least 3 nodes, got {0}")]
    RingTooSmall(usize),
    #[error("head start {head_start} needs a population of at least {needed}, got {n}")]
    HeadStartTooLarge { head_start: u32, needed: usize, n: usize },
    #[error("branch probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("history capacity must be positive")]
    ZeroHistoryCapacity,
}
