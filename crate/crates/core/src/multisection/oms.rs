use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MultisectionTree;
use crate::graph::{CsrGraph, GraphStream, NodeRecord};
use crate::onepass::{fennel_gain, keep_best, Candidate, FennelParams, DEFAULT_GAMMA};
use crate::partition::{BlockTally, PartitionState, UNASSIGNED};
use crate::{BlockId, Error, NodeId, Result, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmsScorer {
    Fennel,
    Ldg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmsConfig {
    pub scorer: OmsScorer,
    pub epsilon: f64,
    pub gamma: f64,
    /// Overrides the classic α for the full `k` when set.
    pub alpha: Option<f64>,
    /// Number of bottom tree layers assigned by hashing instead of scoring.
    pub hash_bottom_layers: u32,
}

impl Default for OmsConfig {
    fn default() -> Self {
        Self {
            scorer: OmsScorer::Fennel,
            epsilon: 0.03,
            gamma: DEFAULT_GAMMA,
            alpha: None,
            hash_bottom_layers: 0,
        }
    }
}

/// Per-run state: weights and Fennel α of every tree node.
#[derive(Debug, Clone)]
pub struct OmsState<'t> {
    pub tree: &'t MultisectionTree,
    pub weight: Vec<Weight>,
    pub params: FennelParams,
    alpha: Vec<f64>,
    scorer: OmsScorer,
    hash_from_depth: u32,
    tally: BlockTally<Weight>,
}

impl<'t> OmsState<'t> {
    pub fn new(tree: &'t MultisectionTree, params: FennelParams, config: &OmsConfig) -> Self {
        let alpha = (0..tree.len() as u32)
            .map(|id| tree.heterogeneous_alpha(id, params.alpha))
            .collect();
        let max_fan = tree.nodes().iter().map(|n| n.num_children).max().unwrap_or(1).max(1);
        Self {
            tree,
            weight: vec![0; tree.len()],
            params,
            alpha,
            scorer: config.scorer,
            hash_from_depth: tree.height().saturating_sub(config.hash_bottom_layers),
            tally: BlockTally::new(max_fan),
        }
    }

    /// Penalty parameters for scoring a node into tree node `id`.
    #[inline]
    pub fn params_for(&self, id: u32) -> FennelParams {
        FennelParams {
            alpha: self.alpha[id as usize],
            ..self.params
        }
    }
}

/// Picks the child of `x` for a node of weight `c`. `weight_of` reads a tree
/// node's current weight. Returns the child id and whether every child was
/// over capacity.
#[allow(clippy::too_many_arguments)]
fn choose_child(
    oms: &OmsState<'_>,
    tally: &BlockTally<Weight>,
    x: u32,
    node: NodeId,
    c: Weight,
    l_max: Weight,
    weight_of: impl Fn(u32) -> Weight,
) -> (u32, bool) {
    let tree = oms.tree;
    let nx = tree.node(x);
    let first = nx.first_child;
    if nx.depth >= oms.hash_from_depth {
        let child = first + node % nx.num_children;
        return (child, weight_of(child) + c > tree.capacity(child, l_max));
    }
    let mut best: Option<Candidate> = None;
    let mut lightest = first;
    for j in 0..nx.num_children {
        let child = first + j;
        let w = weight_of(child);
        if w < weight_of(lightest) {
            lightest = child;
        }
        let cap = tree.capacity(child, l_max);
        if w + c > cap {
            continue;
        }
        let aff = tally.get(j);
        let cand = match oms.scorer {
            OmsScorer::Fennel => {
                let affinity = aff as f64;
                Candidate {
                    score: fennel_gain(affinity, c, w, &oms.params_for(child)),
                    affinity,
                    weight: w,
                    block: j,
                }
            }
            OmsScorer::Ldg => Candidate {
                score: aff as f64 * (1.0 - w as f64 / cap as f64),
                affinity: 0.0,
                weight: w,
                block: j,
            },
        };
        keep_best(&mut best, cand);
    }
    match best {
        Some(cand) => (first + cand.block, false),
        None => (lightest, true),
    }
}

/// Descends the tree from the root to a leaf, choosing a child per layer
/// with the configured scorer restricted to that subproblem. Neighbor
/// tallies map each assigned neighbor's block to the child covering it.
pub fn oms_assign(rec: &NodeRecord, state: &mut PartitionState, oms: &mut OmsState<'_>) -> BlockId {
    let tree = oms.tree;
    let c = rec.weight;
    let mut x = tree.root();
    let mut violated = false;
    let mut tally = std::mem::replace(&mut oms.tally, BlockTally::new(0));
    oms.weight[x as usize] += c;
    while !tree.node(x).is_leaf() {
        let nx = tree.node(x);
        tally.clear();
        if nx.depth < oms.hash_from_depth {
            for &(u, w) in &rec.neighbors {
                let b = state.assignment[u as usize];
                if b != UNASSIGNED && nx.covers(b) {
                    tally.add(tree.child_index(x, b), w);
                }
            }
        }
        let weights = &oms.weight;
        let (child, v) = choose_child(oms, &tally, x, rec.id, c, state.l_max, |id| weights[id as usize]);
        violated |= v;
        x = child;
        oms.weight[x as usize] += c;
    }
    oms.tally = tally;
    let block = tree.node(x).leaf_lo;
    state.balance_violations += violated as u64;
    state.assign(rec.id, block, c);
    block
}

#[derive(Debug, Clone)]
pub struct OmsRun {
    pub state: PartitionState,
    /// Final weight of every tree node.
    pub tree_weight: Vec<Weight>,
    pub params: FennelParams,
}

fn params_for_run(config: &OmsConfig, n: usize, m: usize, k: u32) -> Result<FennelParams> {
    if !(config.epsilon >= 0.0) {
        return Err(Error::config("epsilon must be nonnegative"));
    }
    let params = FennelParams {
        gamma: config.gamma,
        alpha: config
            .alpha
            .unwrap_or_else(|| FennelParams::classic_alpha(n, m, k)),
        hard_balance: true,
    };
    params.validate()?;
    Ok(params)
}

/// One pass of online recursive multi-section.
pub fn run_oms<S: GraphStream + ?Sized>(
    stream: &mut S,
    tree: &MultisectionTree,
    config: &OmsConfig,
) -> Result<OmsRun> {
    let header = stream.header().clone();
    let params = params_for_run(config, header.n, header.m, tree.k())?;
    let total = stream.total_node_weight()?;
    let mut state = PartitionState::new(header.n, tree.k(), config.epsilon, total.max(1));
    let mut oms = OmsState::new(tree, params, config);
    let mut rec = NodeRecord::default();
    stream.rewind()?;
    while stream.next_node(&mut rec)? {
        if rec.id as usize >= header.n {
            return Err(Error::Invariant(format!("record id {} outside 0..{}", rec.id, header.n)));
        }
        oms_assign(&rec, &mut state, &mut oms);
    }
    Ok(OmsRun {
        state,
        tree_weight: oms.weight,
        params,
    })
}

/// Node-parallel multi-section on an in-memory graph. Weight increments are
/// atomic; the capacity check is not synchronized with them, so concurrent
/// assigners can overload a block slightly. Overloads are counted in
/// `balance_violations`. Results depend on thread scheduling.
pub fn run_oms_parallel(
    graph: &CsrGraph,
    tree: &MultisectionTree,
    config: &OmsConfig,
    threads: usize,
) -> Result<OmsRun> {
    let n = graph.n();
    let params = params_for_run(config, n, graph.m(), tree.k())?;
    let total = graph.total_node_weight();
    let mut state = PartitionState::new(n, tree.k(), config.epsilon, total.max(1));
    let l_max = state.l_max;
    let oms = OmsState::new(tree, params, config);
    let weight: Vec<AtomicU64> = (0..tree.len()).map(|_| AtomicU64::new(0)).collect();
    let assignment: Vec<AtomicU32> = (0..n).map(|_| AtomicU32::new(UNASSIGNED)).collect();
    let max_fan = tree.nodes().iter().map(|t| t.num_children).max().unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start thread pool: {e}")))?;
    let fallbacks = AtomicU64::new(0);
    pool.install(|| {
        (0..n as NodeId).into_par_iter().with_min_len(256).for_each_init(
            || BlockTally::<Weight>::new(max_fan),
            |tally, v| {
                let c = graph.node_weight(v);
                let mut x = tree.root();
                weight[x as usize].fetch_add(c, Ordering::Relaxed);
                let mut violated = false;
                while !tree.node(x).is_leaf() {
                    let nx = tree.node(x);
                    tally.clear();
                    if nx.depth < oms.hash_from_depth {
                        for (u, w) in graph.neighbors(v) {
                            let b = assignment[u as usize].load(Ordering::Relaxed);
                            if b != UNASSIGNED && nx.covers(b) {
                                tally.add(tree.child_index(x, b), w);
                            }
                        }
                    }
                    let (child, f) = choose_child(&oms, tally, x, v, c, l_max, |id| {
                        weight[id as usize].load(Ordering::Relaxed)
                    });
                    violated |= f;
                    x = child;
                    weight[x as usize].fetch_add(c, Ordering::Relaxed);
                }
                if violated {
                    fallbacks.fetch_add(1, Ordering::Relaxed);
                }
                assignment[v as usize].store(tree.node(x).leaf_lo, Ordering::Relaxed);
            },
        );
    });
    state.assignment = assignment.into_iter().map(AtomicU32::into_inner).collect();
    let tree_weight: Vec<Weight> = weight.into_iter().map(AtomicU64::into_inner).collect();
    for b in 0..tree.k() {
        state.block_weight[b as usize] = tree_weight[tree.leaf_node(b) as usize];
    }
    let overloaded = state.block_weight.iter().filter(|&&w| w > l_max).count() as u64;
    state.balance_violations = fallbacks.into_inner().max(overloaded);
    Ok(OmsRun {
        state,
        tree_weight,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multisection::HierarchySpec;

    fn path_graph(n: u32) -> CsrGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        CsrGraph::from_edges(n as usize, &edges)
    }

    #[test]
    fn single_block() {
        let tree = MultisectionTree::build_hierarchy(1, 4);
        let g = path_graph(5);
        let r = run_oms(&mut g.stream(), &tree, &OmsConfig::default()).unwrap();
        assert!(r.state.assignment.iter().all(|&b| b == 0));
    }

    #[test]
    fn follows_neighbor_through_layers() {
        let h = HierarchySpec::parse("2:2", "1:10").unwrap();
        let tree = MultisectionTree::build_from_spec(&h);
        let mut state = PartitionState::new(8, 4, 1.0, 8);
        let params = FennelParams::classic(8, 4, 4);
        let mut oms = OmsState::new(&tree, params, &OmsConfig::default());
        // place node 0 in block 3 by hand
        state.assign(0, 3, 1);
        for id in tree.path_to_leaf(3) {
            oms.weight[id as usize] += 1;
        }
        oms.weight[0] += 1;
        // balance the other blocks
        for (v, b) in [(1, 0), (2, 1), (3, 2)] {
            state.assign(v, b, 1);
            for id in tree.path_to_leaf(b) {
                oms.weight[id as usize] += 1;
            }
            oms.weight[0] += 1;
        }
        let rec = NodeRecord {
            id: 4,
            weight: 1,
            neighbors: vec![(0, 1)],
        };
        assert_eq!(oms_assign(&rec, &mut state, &mut oms), 3);
    }

    #[test]
    fn isolated_nodes_fill_lightest_children() {
        let tree = MultisectionTree::build_hierarchy(4, 2);
        let g = CsrGraph::from_edges(4, &[]);
        let r = run_oms(&mut g.stream(), &tree, &OmsConfig::default()).unwrap();
        let mut blocks = r.state.assignment.clone();
        blocks.sort_unstable();
        assert_eq!(blocks, vec![0, 1, 2, 3]);
    }

    #[test]
    fn tree_weights_are_leaf_sums() {
        let tree = MultisectionTree::build_hierarchy(12, 4);
        let g = path_graph(100);
        for scorer in [OmsScorer::Fennel, OmsScorer::Ldg] {
            let cfg = OmsConfig {
                scorer,
                ..OmsConfig::default()
            };
            let r = run_oms(&mut g.stream(), &tree, &cfg).unwrap();
            for id in 0..tree.len() as u32 {
                let t = tree.node(id);
                let sum: Weight = (t.leaf_lo..=t.leaf_hi).map(|b| r.state.block_weight[b as usize]).sum();
                assert_eq!(r.tree_weight[id as usize], sum);
            }
            assert!(r.state.max_block_weight() <= r.state.l_max);
        }
    }

    #[test]
    fn hashing_bottom_layer_uses_ids() {
        let tree = MultisectionTree::build_hierarchy(4, 2);
        let g = CsrGraph::from_edges(8, &[]);
        let cfg = OmsConfig {
            hash_bottom_layers: 2,
            ..OmsConfig::default()
        };
        let r = run_oms(&mut g.stream(), &tree, &cfg).unwrap();
        for v in 0..8u32 {
            let top = v % 2;
            let bottom = v % 2;
            assert_eq!(r.state.assignment[v as usize], top * 2 + bottom);
        }
    }

    #[test]
    fn parallel_run_is_complete() {
        let tree = MultisectionTree::build_hierarchy(8, 2);
        let g = path_graph(2000);
        let r = run_oms_parallel(&g, &tree, &OmsConfig::default(), 4).unwrap();
        assert!(r.state.is_complete());
        r.state.verify_weights(|_| 1).unwrap();
    }
}
