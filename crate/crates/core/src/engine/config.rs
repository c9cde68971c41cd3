use alloc::vec;
use alloc::vec::Vec;

use super::{EdgeState, NodeId, NodeState};
use crate::detector::DegreeHistogram;
use crate::protocol::StateId;

/// Largest population a configuration will allocate. The adjacency bitmap
/// takes `n^2 / 16` bytes.
pub const MAX_POPULATION: usize = 50_000;

/// Node states plus the active-edge graph of one run.
///
/// Degrees, the degree histogram and the state census are maintained on
/// every write, so all of them are O(1) to read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    states: Vec<NodeState>,
    census: Vec<u32>,
    // upper-triangular bitmap over unordered pairs
    adjacency: Vec<u64>,
    neighbors: Vec<Vec<NodeId>>,
    histogram: DegreeHistogram,
    edge_count: usize,
}

impl Configuration {
    /// `n` nodes, all in `initial`, no active edges. `num_states` sizes the census.
    pub fn new(n: usize, num_states: usize, initial: StateId) -> Self {
        let mut census = vec![0; num_states];
        census[initial.index()] = n as u32;
        let pairs = n * n.saturating_sub(1) / 2;
        Configuration {
            states: vec![NodeState::plain(initial); n],
            census,
            adjacency: vec![0; pairs.div_ceil(64)],
            neighbors: vec![Vec::new(); n],
            histogram: DegreeHistogram::new(n),
            edge_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    #[inline]
    pub fn state(&self, v: NodeId) -> &NodeState {
        &self.states[v.index()]
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub fn set_state(&mut self, v: NodeId, state: NodeState) {
        let old = self.states[v.index()].symbol;
        self.census[old.index()] -= 1;
        self.census[state.symbol.index()] += 1;
        self.states[v.index()] = state;
    }

    /// Multiplicity of each state, indexed by [`StateId`].
    pub fn census(&self) -> &[u32] {
        &self.census
    }

    #[inline]
    fn bit(&self, u: NodeId, v: NodeId) -> usize {
        let (lo, hi) = if u.0 < v.0 { (u.0 as usize, v.0 as usize) } else { (v.0 as usize, u.0 as usize) };
        hi * (hi - 1) / 2 + lo
    }

    #[inline]
    pub fn edge(&self, u: NodeId, v: NodeId) -> EdgeState {
        debug_assert_ne!(u, v);
        let b = self.bit(u, v);
        EdgeState::from_bit(((self.adjacency[b / 64] >> (b % 64)) & 1) as u8)
    }

    /// Sets the edge state of `{u, v}`. Returns whether it changed.
    pub fn set_edge(&mut self, u: NodeId, v: NodeId, state: EdgeState) -> bool {
        assert_ne!(u, v, "self-edges are not allowed");
        if self.edge(u, v) == state {
            return false;
        }
        let b = self.bit(u, v);
        self.adjacency[b / 64] ^= 1 << (b % 64);
        match state {
            EdgeState::Active => {
                for (x, y) in [(u, v), (v, u)] {
                    let d = self.neighbors[x.index()].len();
                    self.histogram.shift(d, d + 1);
                    self.neighbors[x.index()].push(y);
                }
                self.edge_count += 1;
            }
            EdgeState::Inactive => {
                for (x, y) in [(u, v), (v, u)] {
                    let list = &mut self.neighbors[x.index()];
                    let d = list.len();
                    let pos = list.iter().position(|&w| w == y).expect("active edge is listed");
                    list.swap_remove(pos);
                    self.histogram.shift(d, d - 1);
                }
                self.edge_count -= 1;
            }
        }
        true
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbors[v.index()].len()
    }

    /// Active neighbors of `v`, in an order that depends only on the
    /// history of edge writes.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.neighbors[v.index()]
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn histogram(&self) -> &DegreeHistogram {
        &self.histogram
    }

    /// Active edges as `(low, high)` pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, list) in self.neighbors.iter().enumerate() {
            let mut higher: Vec<NodeId> = list.iter().copied().filter(|w| w.index() > u).collect();
            higher.sort_unstable();
            out.extend(higher.into_iter().map(|w| (NodeId(u as u32), w)));
        }
        out
    }
}
