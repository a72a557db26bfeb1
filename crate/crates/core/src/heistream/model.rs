use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{GraphStream, NodeRecord};
use crate::partition::{PartitionState, UNASSIGNED};
use crate::{BlockId, Error, NodeId, Result, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Edges to not-yet-streamed nodes are dropped.
    Basic,
    /// Each not-yet-streamed neighbor is contracted into a random in-batch
    /// neighbor, with its edges halved.
    Extended,
}

/// Small undirected graph with fractional edge weights. Nodes with a fixed
/// block are artificial nodes and never move.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGraph {
    xadj: Vec<usize>,
    adj: Vec<u32>,
    ew: Vec<f64>,
    vw: Vec<Weight>,
    fixed: Vec<BlockId>,
}

impl ModelGraph {
    /// Builds the graph from directed arcs; both directions of every edge
    /// must be present. Parallel arcs are merged by summing weights and
    /// self loops are dropped.
    pub fn from_arcs(vw: Vec<Weight>, fixed: Vec<BlockId>, arcs: &mut Vec<(u32, u32, f64)>) -> Self {
        let n = vw.len();
        debug_assert_eq!(fixed.len(), n);
        arcs.retain(|a| a.0 != a.1);
        arcs.sort_unstable_by_key(|a| (a.0, a.1));
        let mut xadj = vec![0usize; n + 1];
        let mut adj = Vec::with_capacity(arcs.len());
        let mut ew: Vec<f64> = Vec::with_capacity(arcs.len());
        let mut last: Option<(u32, u32)> = None;
        for &(u, v, w) in arcs.iter() {
            if last == Some((u, v)) {
                *ew.last_mut().expect("merged arc") += w;
            } else {
                adj.push(v);
                ew.push(w);
                xadj[u as usize + 1] += 1;
                last = Some((u, v));
            }
        }
        for i in 0..n {
            xadj[i + 1] += xadj[i];
        }
        Self {
            xadj,
            adj,
            ew,
            vw,
            fixed,
        }
    }

    pub fn n(&self) -> usize {
        self.vw.len()
    }

    /// Number of stored arcs (twice the number of edges).
    pub fn arcs(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn neighbors(&self, u: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let r = self.xadj[u as usize]..self.xadj[u as usize + 1];
        self.adj[r.clone()].iter().copied().zip(self.ew[r].iter().copied())
    }

    #[inline]
    pub fn node_weight(&self, u: u32) -> Weight {
        self.vw[u as usize]
    }

    pub fn node_weights(&self) -> &[Weight] {
        &self.vw
    }

    #[inline]
    pub fn fixed_block(&self, u: u32) -> Option<BlockId> {
        match self.fixed[u as usize] {
            UNASSIGNED => None,
            b => Some(b),
        }
    }

    pub fn fixed(&self) -> &[BlockId] {
        &self.fixed
    }

    pub fn movable(&self) -> usize {
        self.fixed.iter().filter(|&&b| b == UNASSIGNED).count()
    }

    pub fn total_weight(&self) -> Weight {
        self.vw.iter().sum()
    }

    /// Weight of edges between different blocks, each edge counted once.
    pub fn edge_cut(&self, part: &[BlockId]) -> f64 {
        let mut cut = 0.0;
        for u in 0..self.n() as u32 {
            for (v, w) in self.neighbors(u) {
                if u < v && part[u as usize] != part[v as usize] {
                    cut += w;
                }
            }
        }
        cut
    }

    pub fn block_weights(&self, part: &[BlockId], k: u32) -> Vec<Weight> {
        let mut w = vec![0; k as usize];
        for (u, &b) in part.iter().enumerate() {
            w[b as usize] += self.vw[u];
        }
        w
    }
}

/// Graph model of one batch: batch nodes `0..batch_len` (global id
/// `first + i`), followed by `k` artificial nodes when earlier nodes exist.
#[derive(Debug, Clone)]
pub struct BatchModel {
    pub graph: ModelGraph,
    pub first: NodeId,
    pub batch_len: usize,
    pub artificial: bool,
    /// Total node weight added to batch nodes by ghost contractions.
    pub ghost_weight: Weight,
}

impl BatchModel {
    /// Model node of block `b`'s artificial node.
    pub fn artificial_node(&self, b: BlockId) -> Option<u32> {
        self.artificial.then(|| (self.batch_len + b as usize) as u32)
    }
}

/// Where a neighbor of a batch node lives relative to the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborKind {
    Past,
    InBatch,
    Ghost,
}

#[inline]
pub fn classify(v: NodeId, first: NodeId, end: NodeId, state: &PartitionState) -> NeighborKind {
    if first <= v && v < end {
        NeighborKind::InBatch
    } else if state.assignment[v as usize] != UNASSIGNED {
        NeighborKind::Past
    } else {
        NeighborKind::Ghost
    }
}

/// Reads up to `delta` records into `batch`, reusing its buffers. Returns
/// the number of records read.
pub fn load_batch<S: GraphStream + ?Sized>(stream: &mut S, delta: usize, batch: &mut Vec<NodeRecord>) -> Result<usize> {
    let mut len = 0;
    while len < delta {
        if batch.len() == len {
            batch.push(NodeRecord::default());
        }
        if !stream.next_node(&mut batch[len])? {
            break;
        }
        if len > 0 && batch[len].id != batch[len - 1].id + 1 {
            return Err(Error::Invariant("stream ids are not consecutive".into()));
        }
        len += 1;
    }
    Ok(len)
}

/// Builds the model of `batch`. Neighbors outside the batch that are
/// already assigned become edges to the artificial node of their block;
/// unassigned ones are ghosts. Artificial node `i` weighs `c(V_i)` as
/// currently recorded in `state`, so callers restreaming a batch must
/// remove its nodes from `state` first.
pub fn build_model<R: Rng + ?Sized>(
    batch: &[NodeRecord],
    state: &PartitionState,
    kind: ModelKind,
    force_artificial: bool,
    rng: &mut R,
) -> BatchModel {
    let len = batch.len();
    let first = batch.first().map_or(0, |r| r.id);
    let end = first + len as NodeId;
    let k = state.k;
    let artificial = force_artificial || first > 0;
    let total = len + if artificial { k as usize } else { 0 };
    let mut vw: Vec<Weight> = batch.iter().map(|r| r.weight).collect();
    let mut fixed = vec![UNASSIGNED; len];
    if artificial {
        vw.extend_from_slice(&state.block_weight);
        fixed.extend(0..k);
    }
    debug_assert_eq!(vw.len(), total);

    let mut arcs: Vec<(u32, u32, f64)> = Vec::new();
    let mut ghosts: HashMap<NodeId, Vec<(u32, Weight)>> = HashMap::new();
    for (i, rec) in batch.iter().enumerate() {
        let i = i as u32;
        for &(v, w) in &rec.neighbors {
            match classify(v, first, end, state) {
                NeighborKind::InBatch => arcs.push((i, v - first, w as f64)),
                NeighborKind::Past => {
                    debug_assert!(artificial);
                    let a = (len + state.assignment[v as usize] as usize) as u32;
                    arcs.push((i, a, w as f64));
                    arcs.push((a, i, w as f64));
                }
                NeighborKind::Ghost => {
                    if kind == ModelKind::Extended {
                        ghosts.entry(v).or_default().push((i, w));
                    }
                }
            }
        }
    }

    let mut ghost_weight = 0;
    if !ghosts.is_empty() {
        let mut ids: Vec<NodeId> = ghosts.keys().copied().collect();
        ids.sort_unstable();
        for g in ids {
            let hosts = &ghosts[&g];
            assert!(!hosts.is_empty(), "ghost without an in-batch neighbor");
            let host = hosts[rng.gen_range(0..hosts.len())].0;
            // The ghost's own weight is not known before it is streamed.
            vw[host as usize] += 1;
            ghost_weight += 1;
            for &(u, w) in hosts {
                if u != host {
                    let half = w as f64 / 2.0;
                    arcs.push((u, host, half));
                    arcs.push((host, u, half));
                }
            }
        }
    }

    BatchModel {
        graph: ModelGraph::from_arcs(vw, fixed, &mut arcs),
        first,
        batch_len: len,
        artificial,
        ghost_weight,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rec(id: NodeId, neighbors: &[NodeId]) -> NodeRecord {
        NodeRecord {
            id,
            weight: 1,
            neighbors: neighbors.iter().map(|&v| (v, 1)).collect(),
        }
    }

    #[test]
    fn first_batch_has_no_artificial_nodes() {
        let state = PartitionState::new(4, 2, 0.03, 4);
        let batch = vec![rec(0, &[1]), rec(1, &[0])];
        let m = build_model(&batch, &state, ModelKind::Basic, false, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(!m.artificial);
        assert_eq!(m.graph.n(), 2);
        assert_eq!(m.graph.arcs(), 2);
    }

    #[test]
    fn past_neighbors_merge_into_artificial_edge() {
        let mut state = PartitionState::new(4, 3, 0.03, 4);
        state.assign(0, 2, 1);
        state.assign(1, 2, 1);
        let batch = vec![rec(2, &[0, 1])];
        let m = build_model(&batch, &state, ModelKind::Basic, false, &mut ChaCha8Rng::seed_from_u64(1));
        let a2 = m.artificial_node(2).unwrap();
        let nb: Vec<_> = m.graph.neighbors(0).collect();
        assert_eq!(nb, vec![(a2, 2.0)]);
        assert_eq!(m.graph.node_weight(a2), 2);
        assert_eq!(m.graph.fixed_block(a2), Some(2));
    }

    #[test]
    fn ghost_contraction_halves_edges() {
        // batch {0, 1}; node 2 is a ghost adjacent to both
        let state = PartitionState::new(3, 2, 0.03, 3);
        let batch = vec![rec(0, &[2]), rec(1, &[2])];
        let m = build_model(&batch, &state, ModelKind::Extended, false, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(m.ghost_weight, 1);
        assert_eq!(m.graph.total_weight(), 3);
        let e: Vec<_> = m.graph.neighbors(0).collect();
        assert_eq!(e, vec![(1, 0.5)]);
        let basic = build_model(&batch, &state, ModelKind::Basic, false, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(basic.graph.arcs(), 0);
    }

    #[test]
    fn classify_neighbors() {
        let mut state = PartitionState::new(6, 2, 0.03, 6);
        state.assign(0, 0, 1);
        assert_eq!(classify(0, 2, 4, &state), NeighborKind::Past);
        assert_eq!(classify(3, 2, 4, &state), NeighborKind::InBatch);
        assert_eq!(classify(4, 2, 4, &state), NeighborKind::Ghost);
    }
}
