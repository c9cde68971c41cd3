//! Structural convergence predicates over the active-edge graph.
//!
//! Each predicate is split into a precondition on the degree histogram and
//! edge count, which is O(1), and a full check. The full check runs only
//! when the precondition holds; every predicate implies its precondition.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dsu::DisjointSet;
use crate::engine::{Configuration, NodeId};
use crate::error::ConfigError;
use crate::protocol::counting;
use crate::protocol::{ProtocolKind, ProtocolSpec};

/// Number of nodes at each degree, maintained on every edge flip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHistogram {
    counts: Vec<u32>,
}

impl DegreeHistogram {
    /// `n` nodes, all of degree 0.
    pub fn new(n: usize) -> Self {
        let mut counts = vec![0; n.max(1)];
        counts[0] = n as u32;
        DegreeHistogram { counts }
    }

    /// Builds the histogram of an arbitrary degree sequence.
    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>, n: usize) -> Self {
        let mut counts = vec![0; n.max(1)];
        for d in degrees {
            counts[d] += 1;
        }
        DegreeHistogram { counts }
    }

    #[inline]
    pub fn count(&self, degree: usize) -> u32 {
        self.counts.get(degree).copied().unwrap_or(0)
    }

    pub fn at_least(&self, degree: usize) -> u32 {
        self.counts.iter().skip(degree).sum()
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    #[inline]
    pub(crate) fn shift(&mut self, from: usize, to: usize) {
        self.counts[from] -= 1;
        self.counts[to] += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    SpanningLine,
    SpanningStar,
    CycleCover,
    SpanningRing,
    CountingHalt,
    /// Never fires; runs go to their step budget.
    None,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 6] = [
        DetectorKind::SpanningLine,
        DetectorKind::SpanningStar,
        DetectorKind::CycleCover,
        DetectorKind::SpanningRing,
        DetectorKind::CountingHalt,
        DetectorKind::None,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::SpanningLine => "line",
            DetectorKind::SpanningStar => "star",
            DetectorKind::CycleCover => "cycle-cover",
            DetectorKind::SpanningRing => "ring",
            DetectorKind::CountingHalt => "counting-halt",
            DetectorKind::None => "none",
        }
    }

    /// Rejects detectors that cannot apply to `protocol` on `n` nodes.
    pub fn validate(self, protocol: &ProtocolSpec, n: usize) -> Result<(), ConfigError> {
        let counting = matches!(protocol.kind(), ProtocolKind::Counting { .. });
        let ok = match self {
            DetectorKind::None => true,
            DetectorKind::CountingHalt => counting,
            _ => !counting,
        };
        if !ok {
            return Err(ConfigError::IncompatibleDetector { detector: self.name(), protocol: protocol.name().into() });
        }
        if self == DetectorKind::SpanningRing && n < 3 {
            return Err(ConfigError::RingTooSmall(n));
        }
        Ok(())
    }

    /// The O(1) necessary condition of the predicate.
    #[inline]
    pub fn precondition(self, config: &Configuration) -> bool {
        let n = config.n();
        let h = config.histogram();
        let n32 = n as u32;
        match self {
            DetectorKind::SpanningLine => config.edge_count() + 1 == n && h.count(1) == 2 && h.count(2) == n32 - 2,
            DetectorKind::SpanningStar => star_histogram(config),
            DetectorKind::CycleCover => {
                h.count(2) == n32
                    || (h.count(0) == 1 && h.count(2) == n32 - 1)
                    || (h.count(1) == 2 && h.count(2) == n32 - 2)
            }
            DetectorKind::SpanningRing => n >= 3 && h.count(2) == n32,
            DetectorKind::CountingHalt => config.census().get(counting::HALT.index()).is_some_and(|&c| c > 0),
            DetectorKind::None => false,
        }
    }

    #[inline]
    pub fn fires(self, config: &Configuration) -> bool {
        self.precondition(config) && self.full_check(config)
    }

    fn full_check(self, config: &Configuration) -> bool {
        match self {
            DetectorKind::SpanningLine | DetectorKind::SpanningRing => is_connected(config),
            DetectorKind::CycleCover => {
                let h = config.histogram();
                if h.count(1) != 2 {
                    return true;
                }
                let mut ends = (0..config.n() as u32).map(NodeId).filter(|&v| config.degree(v) == 1);
                let (a, b) = (ends.next().unwrap(), ends.next().unwrap());
                config.neighbors(a)[0] == b
            }
            _ => true,
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DetectorKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| alloc::format!("unknown detector `{s}`"))
    }
}

fn star_histogram(config: &Configuration) -> bool {
    let n = config.n();
    let h = config.histogram();
    if n == 2 {
        h.count(1) == 2
    } else {
        h.count(n - 1) == 1 && h.count(1) == n as u32 - 1
    }
}

fn is_connected(config: &Configuration) -> bool {
    let mut dsu = DisjointSet::new(config.n());
    for (u, v) in config.edges() {
        dsu.union(u.0, v.0);
    }
    dsu.components() == 1
}

/// Spanning path: `n - 1` edges, two nodes of degree 1, the rest of
/// degree 2, connected.
pub fn is_spanning_line(config: &Configuration) -> bool {
    DetectorKind::SpanningLine.fires(config)
}

/// One node adjacent to all others, no other edges.
pub fn is_spanning_star(config: &Configuration) -> bool {
    DetectorKind::SpanningStar.fires(config)
}

/// Disjoint cycles covering every node, except possibly one isolated node
/// or one isolated edge.
pub fn is_cycle_cover(config: &Configuration) -> bool {
    DetectorKind::CycleCover.fires(config)
}

/// A single cycle through all nodes. Always false below 3 nodes.
pub fn is_spanning_ring(config: &Configuration) -> bool {
    DetectorKind::SpanningRing.fires(config)
}

pub fn is_counting_halted(config: &Configuration) -> bool {
    DetectorKind::CountingHalt.fires(config)
}
