use rand::seq::SliceRandom;
use rand::Rng;

use super::model::ModelGraph;
use crate::partition::UNASSIGNED;
use crate::{BlockId, Weight};

/// Sequence of successively contracted graphs. `maps[i]` sends every node
/// of `levels[i]` to its cluster in `levels[i + 1]`.
#[derive(Debug, Clone)]
pub struct CoarseningHierarchy {
    pub levels: Vec<ModelGraph>,
    pub maps: Vec<Vec<u32>>,
}

impl CoarseningHierarchy {
    pub fn coarsest(&self) -> &ModelGraph {
        self.levels.last().expect("at least the input level")
    }

    /// Number of contractions performed.
    pub fn depth(&self) -> usize {
        self.maps.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CoarsenParams {
    pub rounds: u32,
    /// Stop once the graph has at most this many nodes.
    pub threshold: usize,
    /// Maximum cluster weight.
    pub cap: Weight,
}

/// `max(|B|/(2xk), xk)` for a model with `model_nodes` nodes.
pub fn coarsening_threshold(model_nodes: usize, x: u32, k: u32) -> usize {
    let xk = x as usize * k as usize;
    (model_nodes / (2 * xk)).max(xk)
}

/// Size-constrained label propagation. Every movable node joins the
/// neighboring cluster it is most strongly connected to, provided the
/// cluster stays within `cap`. Ties among other clusters are broken at
/// random; a node stays put when its own cluster is among the strongest.
/// Artificial nodes neither move nor attract. With `blocks`, only edges
/// inside a block are considered, so clusters never span blocks.
pub fn label_propagation<R: Rng + ?Sized>(
    g: &ModelGraph,
    cap: Weight,
    rounds: u32,
    blocks: Option<&[BlockId]>,
    order: Option<&[u32]>,
    rng: &mut R,
) -> Vec<u32> {
    let n = g.n();
    let mut cluster: Vec<u32> = (0..n as u32).collect();
    let mut cluster_weight: Vec<Weight> = g.node_weights().to_vec();
    let mut strength = vec![0.0f64; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut visit: Vec<u32> = match order {
        Some(o) => o.to_vec(),
        None => (0..n as u32).filter(|&u| g.fixed_block(u).is_none()).collect(),
    };
    for _ in 0..rounds {
        if order.is_none() {
            visit.shuffle(rng);
        }
        let mut moved = 0usize;
        for &u in &visit {
            let own = cluster[u as usize];
            for (v, w) in g.neighbors(u) {
                if g.fixed_block(v).is_some() {
                    continue;
                }
                if let Some(b) = blocks {
                    if b[u as usize] != b[v as usize] {
                        continue;
                    }
                }
                let c = cluster[v as usize];
                if strength[c as usize] == 0.0 {
                    touched.push(c);
                }
                strength[c as usize] += w;
            }
            let cu = g.node_weight(u);
            let own_strength = strength[own as usize];
            let mut best = own;
            let mut best_strength = own_strength;
            let mut ties = 0u32;
            for &c in &touched {
                if c == own {
                    continue;
                }
                let s = strength[c as usize];
                if cluster_weight[c as usize] + cu > cap {
                    continue;
                }
                if s > best_strength {
                    best = c;
                    best_strength = s;
                    ties = 1;
                } else if s == best_strength && best != own {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best = c;
                    }
                }
            }
            for &c in &touched {
                strength[c as usize] = 0.0;
            }
            touched.clear();
            if best != own {
                cluster_weight[own as usize] -= cu;
                cluster_weight[best as usize] += cu;
                cluster[u as usize] = best;
                moved += 1;
            }
        }
        if moved == 0 {
            break;
        }
    }
    cluster
}

/// Contracts clusters into single nodes. Coarse ids follow the order in
/// which clusters first appear among the fine nodes; artificial nodes keep
/// their own coarse node. Returns the coarse graph and the fine→coarse map.
pub fn contract(g: &ModelGraph, cluster: &[u32]) -> (ModelGraph, Vec<u32>) {
    let n = g.n();
    let mut id_of = vec![UNASSIGNED; n];
    let mut map = vec![0u32; n];
    let mut vw: Vec<Weight> = Vec::new();
    let mut fixed: Vec<BlockId> = Vec::new();
    for u in 0..n {
        let c = cluster[u] as usize;
        if id_of[c] == UNASSIGNED {
            id_of[c] = vw.len() as u32;
            vw.push(0);
            fixed.push(g.fixed()[u]);
        }
        let cid = id_of[c];
        map[u] = cid;
        vw[cid as usize] += g.node_weight(u as u32);
    }
    let mut arcs = Vec::with_capacity(g.arcs());
    for u in 0..n as u32 {
        let cu = map[u as usize];
        for (v, w) in g.neighbors(u) {
            let cv = map[v as usize];
            if cu != cv {
                arcs.push((cu, cv, w));
            }
        }
    }
    (ModelGraph::from_arcs(vw, fixed, &mut arcs), map)
}

/// Repeats label propagation and contraction until the graph is at most
/// `params.threshold` nodes or a level shrinks by less than 2%.
pub fn coarsen<R: Rng + ?Sized>(
    model: &ModelGraph,
    params: &CoarsenParams,
    blocks: Option<&[BlockId]>,
    rng: &mut R,
) -> (CoarseningHierarchy, Option<Vec<Vec<BlockId>>>) {
    let mut levels = vec![model.clone()];
    let mut maps = Vec::new();
    let mut parts = blocks.map(|b| vec![b.to_vec()]);
    loop {
        let g = levels.last().expect("nonempty");
        if g.n() <= params.threshold {
            break;
        }
        let current = parts.as_ref().map(|p| p.last().expect("nonempty").as_slice());
        let cluster = label_propagation(g, params.cap, params.rounds, current, None, rng);
        let (coarse, map) = contract(g, &cluster);
        if coarse.n() as f64 > 0.98 * g.n() as f64 {
            break;
        }
        if let Some(p) = parts.as_mut() {
            let fine = p.last().expect("nonempty");
            let mut coarse_part = vec![0; coarse.n()];
            for (u, &c) in map.iter().enumerate() {
                coarse_part[c as usize] = fine[u];
            }
            p.push(coarse_part);
        }
        levels.push(coarse);
        maps.push(map);
    }
    (CoarseningHierarchy { levels, maps }, parts)
}
