//! Straight-line reference implementations used as test oracles. They share
//! no code with the library beyond the input containers.

#![allow(dead_code)]

pub mod gain;

use std::collections::HashSet;

use streamdecomp::multisection::MultisectionTree;
use streamdecomp::{BlockId, CsrGraph, Hypergraph};

/// `⌈1.03·W/k⌉` in integer arithmetic.
pub fn lmax_3pct(total: u64, k: u32) -> u64 {
    let den = 100 * k as u64;
    ((103 * total + den - 1) / den).max(1)
}

pub fn classic_alpha(n: usize, m: usize, k: u32) -> f64 {
    (k as f64).sqrt() * m as f64 / (n as f64).powf(1.5)
}

fn penalty(c: u64, alpha: f64, w: u64) -> f64 {
    c as f64 * alpha * 1.5 * (w as f64).sqrt()
}

/// True when `(s1, a1, w1, b1)` should win over `(s2, a2, w2, b2)`: higher
/// score, then higher affinity, then lighter, then lower index.
fn better(s1: f64, a1: f64, w1: u64, b1: u32, s2: f64, a2: f64, w2: u64, b2: u32) -> bool {
    (s1, a1, std::cmp::Reverse(w1), std::cmp::Reverse(b1)) > (s2, a2, std::cmp::Reverse(w2), std::cmp::Reverse(b2))
}

fn lightest(weights: &[u64]) -> u32 {
    let min = *weights.iter().min().unwrap();
    weights.iter().position(|&w| w == min).unwrap() as u32
}

/// Argmax over all `k` blocks of `score(aff_b, w_b, b)` among blocks with
/// `w_b + c ≤ cap(b)`; the lightest block when none fits.
fn argmax(
    k: u32,
    aff: &[f64],
    weights: &[u64],
    c: u64,
    cap: impl Fn(u32) -> u64,
    score: impl Fn(f64, u64, u32) -> f64,
    use_affinity_tie: bool,
) -> (u32, bool) {
    let mut best: Option<(f64, f64, u64, u32)> = None;
    for b in 0..k {
        let w = weights[b as usize];
        if w + c > cap(b) {
            continue;
        }
        let a = aff[b as usize];
        let s = score(a, w, b);
        let ta = if use_affinity_tie { a } else { 0.0 };
        match best {
            Some((bs, ba, bw, bb)) if !better(s, ta, w, b, bs, ba, bw, bb) => {}
            _ => best = Some((s, ta, w, b)),
        }
    }
    match best {
        Some((_, _, _, b)) => (b, false),
        None => (lightest(weights), true),
    }
}

/// One-pass Fennel with γ = 1.5, evaluated block by block.
pub fn fennel(g: &CsrGraph, k: u32, alpha: f64) -> Vec<BlockId> {
    let n = g.n();
    let total: u64 = (0..n as u32).map(|v| g.node_weight(v)).sum();
    let l_max = lmax_3pct(total, k);
    let mut part = vec![u32::MAX; n];
    let mut weights = vec![0u64; k as usize];
    for v in 0..n as u32 {
        let mut aff = vec![0f64; k as usize];
        for (u, w) in g.neighbors(v) {
            if part[u as usize] != u32::MAX {
                aff[part[u as usize] as usize] += w as f64;
            }
        }
        let c = g.node_weight(v);
        let (b, _) = argmax(k, &aff, &weights, c, |_| l_max, |a, w, _| a - penalty(c, alpha, w), true);
        part[v as usize] = b;
        weights[b as usize] += c;
    }
    part
}

/// One-pass LDG: argmax of `aff·(1 − w/L_max)`, ties to the lighter block,
/// then the lower index.
pub fn ldg(g: &CsrGraph, k: u32) -> Vec<BlockId> {
    let n = g.n();
    let total: u64 = (0..n as u32).map(|v| g.node_weight(v)).sum();
    let l_max = lmax_3pct(total, k);
    let mut part = vec![u32::MAX; n];
    let mut weights = vec![0u64; k as usize];
    for v in 0..n as u32 {
        let mut aff = vec![0f64; k as usize];
        for (u, w) in g.neighbors(v) {
            if part[u as usize] != u32::MAX {
                aff[part[u as usize] as usize] += w as f64;
            }
        }
        let c = g.node_weight(v);
        let (b, _) = argmax(
            k,
            &aff,
            &weights,
            c,
            |_| l_max,
            |a, w, _| a * (1.0 - w as f64 / l_max as f64),
            false,
        );
        part[v as usize] = b;
        weights[b as usize] += c;
    }
    part
}

/// Naive FREIGHT: for every node and every block, the objective-specific
/// affinity is recomputed from the full pin history of each incident net.
pub fn freight(h: &Hypergraph, k: u32, alpha: f64, cut_net: bool) -> Vec<BlockId> {
    let n = h.n();
    let total: u64 = (0..n as u32).map(|v| h.node_weight(v)).sum();
    let l_max = lmax_3pct(total, k);
    let mut part = vec![u32::MAX; n];
    let mut weights = vec![0u64; k as usize];
    // blocks of the streamed pins of each net, in streaming order
    let mut history: Vec<Vec<BlockId>> = vec![Vec::new(); h.m()];
    for v in 0..n as u32 {
        let mut aff = vec![0f64; k as usize];
        for &e in h.incident_nets(v) {
            let hist = &history[e as usize];
            let Some(&last) = hist.last() else { continue };
            let cut = hist.iter().any(|&b| b != hist[0]);
            if cut_net && cut {
                continue;
            }
            aff[last as usize] += h.net_weight(e) as f64;
        }
        let c = h.node_weight(v);
        let (b, _) = argmax(k, &aff, &weights, c, |_| l_max, |a, w, _| a - penalty(c, alpha, w), true);
        part[v as usize] = b;
        weights[b as usize] += c;
        for &e in h.incident_nets(v) {
            history[e as usize].push(b);
        }
    }
    part
}

/// Layer-by-layer restreaming reference for online multi-section: pass `d`
/// moves every node from its depth-`d` tree node to one of its children,
/// seeing only neighbors already moved in the same pass.
pub fn oms_layered(g: &CsrGraph, tree: &MultisectionTree, alpha: f64, hash_layers: u32) -> Vec<BlockId> {
    let n = g.n();
    let total: u64 = (0..n as u32).map(|v| g.node_weight(v)).sum();
    let l_max = lmax_3pct(total, tree.k());
    let height = tree.height();
    let mut at = vec![tree.root(); n];
    let mut weight = vec![0u64; tree.len()];
    for v in 0..n as u32 {
        weight[tree.root() as usize] += g.node_weight(v);
    }
    for depth in 0..height {
        let mut moved = vec![false; n];
        for v in 0..n as u32 {
            let x = at[v as usize];
            let node = *tree.node(x);
            if node.is_leaf() {
                continue;
            }
            let kids: Vec<u32> = (node.first_child..node.first_child + node.num_children).collect();
            let c = g.node_weight(v);
            let chosen = if depth + hash_layers >= height {
                kids[(v % node.num_children) as usize]
            } else {
                let mut aff = vec![0f64; kids.len()];
                for (u, w) in g.neighbors(v) {
                    if !moved[u as usize] {
                        continue;
                    }
                    if let Some(j) = kids.iter().position(|&kid| kid == at[u as usize]) {
                        aff[j] += w as f64;
                    }
                }
                let weights: Vec<u64> = kids.iter().map(|&kid| weight[kid as usize]).collect();
                let leaves = |j: u32| tree.node(kids[j as usize]).leaves() as u64;
                let (j, _) = argmax(
                    kids.len() as u32,
                    &aff,
                    &weights,
                    c,
                    |j| leaves(j) * l_max,
                    |a, w, j| a - penalty(c, alpha / (leaves(j) as f64).sqrt(), w),
                    true,
                );
                kids[j as usize]
            };
            weight[chosen as usize] += c;
            at[v as usize] = chosen;
            moved[v as usize] = true;
        }
    }
    at.iter().map(|&x| tree.node(x).leaf_lo).collect()
}

/// PE distance by repeated division: the innermost layer whose groups
/// contain both PEs decides.
pub fn division_distance(fanouts: &[u32], distances: &[u64], a: u32, b: u32) -> u64 {
    if a == b {
        return 0;
    }
    let mut group = 1u64;
    for (i, &f) in fanouts.iter().enumerate() {
        group *= f as u64;
        if a as u64 / group == b as u64 / group {
            return distances[i];
        }
    }
    unreachable!("PEs outside the machine")
}

pub fn edge_cut(g: &CsrGraph, part: &[BlockId]) -> u64 {
    g.edges()
        .filter(|&(u, v, _)| part[u as usize] != part[v as usize])
        .map(|(_, _, w)| w)
        .sum()
}

/// `(cut-net, connectivity)` by collecting the block set of every net.
pub fn cut_and_lambda(h: &Hypergraph, part: &[BlockId]) -> (u64, u64) {
    let mut cut = 0;
    let mut lambda = 0;
    for e in 0..h.m() as u32 {
        let blocks: HashSet<BlockId> = h.pins_of(e).iter().map(|&v| part[v as usize]).collect();
        if blocks.len() > 1 {
            cut += h.net_weight(e);
            lambda += (blocks.len() as u64 - 1) * h.net_weight(e);
        }
    }
    (cut, lambda)
}

pub fn comm_cost(g: &CsrGraph, part: &[BlockId], fanouts: &[u32], distances: &[u64]) -> u64 {
    g.edges()
        .map(|(u, v, w)| w * division_distance(fanouts, distances, part[u as usize], part[v as usize]))
        .sum()
}

pub fn block_weights(weight_of: impl Fn(u32) -> u64, n: usize, part: &[BlockId], k: u32) -> Vec<u64> {
    let mut w = vec![0u64; k as usize];
    for v in 0..n as u32 {
        w[part[v as usize] as usize] += weight_of(v);
    }
    w
}
