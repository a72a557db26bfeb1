//! Gain additivity of contracted node pairs in a batch model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use streamdecomp::heistream::{contract, ModelGraph};
use streamdecomp::onepass::{fennel_gain, FennelParams};
use streamdecomp::{BlockId, UNASSIGNED};

/// Random model graph with random fractional edge weights, a random
/// partial partition, and two unassigned nodes `u != v`.
pub fn weighted_model(n: usize, k: u32, seed: u64) -> (ModelGraph, Vec<BlockId>, u32, u32) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if r.gen_bool(0.3) {
                let w = r.gen_range(0.5..8.0);
                arcs.push((a, b, w));
                arcs.push((b, a, w));
            }
        }
    }
    let u = r.gen_range(0..n as u32);
    let mut v = r.gen_range(0..n as u32 - 1);
    if v >= u {
        v += 1;
    }
    let vw = (0..n).map(|_| r.gen_range(1..6)).collect();
    let g = ModelGraph::from_arcs(vw, vec![UNASSIGNED; n], &mut arcs);
    let part = (0..n as u32)
        .map(|x| if x == u || x == v || r.gen_bool(0.2) { UNASSIGNED } else { r.gen_range(0..k) })
        .collect();
    (g, part, u, v)
}

fn affinity(g: &ModelGraph, part: &[BlockId], x: u32, b: BlockId) -> f64 {
    g.neighbors(x).filter(|&(y, _)| part[y as usize] == b).map(|(_, w)| w).sum()
}

/// Largest difference, over all blocks, between the gain of the contracted
/// pair and the sum of the gains of its two nodes.
pub fn pair_gain_error(g: &ModelGraph, part: &[BlockId], k: u32, u: u32, v: u32, params: &FennelParams) -> f64 {
    let mut block_weight = vec![0u64; k as usize];
    for x in 0..g.n() as u32 {
        if part[x as usize] != UNASSIGNED {
            block_weight[part[x as usize] as usize] += g.node_weight(x);
        }
    }
    let cluster: Vec<u32> = (0..g.n() as u32).map(|x| if x == v { u } else { x }).collect();
    let (coarse, map) = contract(g, &cluster);
    let mut coarse_part = vec![UNASSIGNED; coarse.n()];
    for x in 0..g.n() {
        coarse_part[map[x] as usize] = part[x];
    }
    let z = map[u as usize];
    assert_eq!(z, map[v as usize]);
    assert_eq!(coarse.node_weight(z), g.node_weight(u) + g.node_weight(v));
    let mut worst = 0f64;
    for b in 0..k {
        let w = block_weight[b as usize];
        let gu = fennel_gain(affinity(g, part, u, b), g.node_weight(u), w, params);
        let gv = fennel_gain(affinity(g, part, v, b), g.node_weight(v), w, params);
        let gz = fennel_gain(affinity(&coarse, &coarse_part, z, b), coarse.node_weight(z), w, params);
        worst = worst.max((gz - (gu + gv)).abs());
    }
    worst
}
