use rand::seq::SliceRandom;
use rand::Rng;

use super::coarsen::CoarseningHierarchy;
use super::model::ModelGraph;
use crate::onepass::{fennel_gain, keep_best, Candidate, FennelParams};
use crate::partition::{BlockTally, UNASSIGNED};
use crate::{BlockId, Weight};

/// Counters collected by local search.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RefineStats {
    pub moves: u64,
    pub zero_gain_moves: u64,
    /// Smallest gain of any applied move; `+∞` when nothing moved.
    pub min_gain: f64,
    pub total_gain: f64,
    pub violations: u64,
}

impl RefineStats {
    pub fn new() -> Self {
        Self {
            min_gain: f64::INFINITY,
            ..Self::default()
        }
    }

    pub fn merge(&mut self, other: &RefineStats) {
        self.moves += other.moves;
        self.zero_gain_moves += other.zero_gain_moves;
        self.min_gain = self.min_gain.min(other.min_gain);
        self.total_gain += other.total_gain;
        self.violations += other.violations;
    }
}

/// Greedy generalized-Fennel assignment of every movable node of `g`, in
/// index order, over all `k` blocks. Block weights start from the
/// artificial nodes. Returns the partition, the block weights and the
/// number of nodes that had to overload a block.
pub fn initial_partition(
    g: &ModelGraph,
    k: u32,
    l_max: Weight,
    params: &FennelParams,
) -> (Vec<BlockId>, Vec<Weight>, u64) {
    let n = g.n();
    let mut part: Vec<BlockId> = g.fixed().to_vec();
    let mut weight = vec![0 as Weight; k as usize];
    for u in 0..n as u32 {
        if let Some(b) = g.fixed_block(u) {
            weight[b as usize] += g.node_weight(u);
        }
    }
    let mut tally = BlockTally::<f64>::new(k);
    let mut violations = 0;
    for u in 0..n as u32 {
        if g.fixed_block(u).is_some() {
            continue;
        }
        tally.clear();
        for (v, w) in g.neighbors(u) {
            let b = part[v as usize];
            if b != UNASSIGNED {
                tally.add(b, w);
            }
        }
        let c = g.node_weight(u);
        let mut best: Option<Candidate> = None;
        for b in 0..k {
            let wb = weight[b as usize];
            if wb + c > l_max {
                continue;
            }
            let affinity = tally.get(b);
            keep_best(
                &mut best,
                Candidate {
                    score: fennel_gain(affinity, c, wb, params),
                    affinity,
                    weight: wb,
                    block: b,
                },
            );
        }
        let b = match best {
            Some(cand) => cand.block,
            None => {
                violations += 1;
                lightest(&weight)
            }
        };
        part[u as usize] = b;
        weight[b as usize] += c;
    }
    (part, weight, violations)
}

fn lightest(weight: &[Weight]) -> BlockId {
    let mut best = 0;
    for (i, &w) in weight.iter().enumerate() {
        if w < weight[best] {
            best = i;
        }
    }
    best as BlockId
}

/// Size-constrained label propagation maximizing the generalized Fennel
/// gain. Each movable node considers its own block and the blocks of its
/// neighbors; it moves to the best feasible one when that strictly improves
/// its score, and with probability 1/2 when the gain is exactly zero.
#[allow(clippy::too_many_arguments)]
pub fn local_search<R: Rng + ?Sized>(
    g: &ModelGraph,
    part: &mut [BlockId],
    weight: &mut [Weight],
    l_max: Weight,
    params: &FennelParams,
    rounds: u32,
    rng: &mut R,
    stats: &mut RefineStats,
) {
    let k = weight.len() as u32;
    let mut tally = BlockTally::<f64>::new(k);
    let mut order: Vec<u32> = (0..g.n() as u32).filter(|&u| g.fixed_block(u).is_none()).collect();
    for _ in 0..rounds {
        order.shuffle(rng);
        let mut moved = 0;
        for &u in &order {
            let own = part[u as usize];
            let c = g.node_weight(u);
            tally.clear();
            for (v, w) in g.neighbors(u) {
                tally.add(part[v as usize], w);
            }
            let own_score = fennel_gain(tally.get(own), c, weight[own as usize] - c, params);
            let mut best: Option<Candidate> = None;
            for &b in tally.touched() {
                if b == own {
                    continue;
                }
                let wb = weight[b as usize];
                if wb + c > l_max {
                    continue;
                }
                let affinity = tally.get(b);
                keep_best(
                    &mut best,
                    Candidate {
                        score: fennel_gain(affinity, c, wb, params),
                        affinity,
                        weight: wb,
                        block: b,
                    },
                );
            }
            let Some(best) = best else { continue };
            let gain = best.score - own_score;
            let take = if gain > 0.0 {
                true
            } else if gain == 0.0 {
                rng.gen_bool(0.5)
            } else {
                false
            };
            if take {
                weight[own as usize] -= c;
                weight[best.block as usize] += c;
                part[u as usize] = best.block;
                moved += 1;
                stats.moves += 1;
                stats.zero_gain_moves += (gain == 0.0) as u64;
                stats.min_gain = stats.min_gain.min(gain);
                stats.total_gain += gain;
            }
        }
        if moved == 0 {
            break;
        }
    }
}

/// Maps a partition of `levels[i + 1]` to `levels[i]`.
pub fn project(map: &[u32], coarse: &[BlockId]) -> Vec<BlockId> {
    map.iter().map(|&c| coarse[c as usize]).collect()
}

/// Projects the coarsest partition level by level to the input model,
/// running local search on every finer level and, if `refine_coarsest`, on
/// the coarsest level as well.
#[allow(clippy::too_many_arguments)]
pub fn uncoarsen_refine<R: Rng + ?Sized>(
    h: &CoarseningHierarchy,
    coarse_part: Vec<BlockId>,
    weight: &mut [Weight],
    l_max: Weight,
    params: &FennelParams,
    rounds: u32,
    refine_coarsest: bool,
    rng: &mut R,
    stats: &mut RefineStats,
) -> Vec<BlockId> {
    let mut part = coarse_part;
    let top = h.levels.len() - 1;
    if refine_coarsest {
        local_search(&h.levels[top], &mut part, weight, l_max, params, rounds, rng, stats);
    }
    for level in (0..top).rev() {
        part = project(&h.maps[level], &part);
        local_search(&h.levels[level], &mut part, weight, l_max, params, rounds, rng, stats);
    }
    part
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> FennelParams {
        FennelParams {
            gamma: 1.5,
            alpha: 0.1,
            hard_balance: true,
        }
    }

    #[test]
    fn artificial_affinity_decides() {
        // node 0 is tied to the artificial node of block 3
        let mut arcs = vec![(0, 4, 1.0), (4, 0, 1.0)];
        let g = ModelGraph::from_arcs(vec![1, 5, 5, 5, 5], vec![UNASSIGNED, 0, 1, 2, 3], &mut arcs);
        let (part, weight, v) = initial_partition(&g, 4, 10, &params());
        assert_eq!(part[0], 3);
        assert_eq!(weight, vec![5, 5, 5, 6]);
        assert_eq!(v, 0);
    }

    #[test]
    fn forced_block_when_others_full() {
        let mut arcs = vec![(0, 1, 9.0), (1, 0, 9.0)];
        let g = ModelGraph::from_arcs(vec![1, 10, 3], vec![UNASSIGNED, 0, 1], &mut arcs);
        let (part, _, v) = initial_partition(&g, 2, 10, &params());
        assert_eq!(part[0], 1);
        assert_eq!(v, 0);
    }

    #[test]
    fn node_in_best_block_is_not_moved() {
        let mut arcs = vec![(0, 1, 1.0), (1, 0, 1.0)];
        let g = ModelGraph::from_arcs(vec![1, 1], vec![UNASSIGNED; 2], &mut arcs);
        let mut part = vec![0, 0];
        let mut weight = vec![2, 0];
        let mut stats = RefineStats::new();
        local_search(&g, &mut part, &mut weight, 2, &params(), 5, &mut ChaCha8Rng::seed_from_u64(0), &mut stats);
        assert_eq!(part, vec![0, 0]);
        assert_eq!(stats.moves, 0);
    }

    #[test]
    fn applied_moves_never_lose() {
        let mut arcs = Vec::new();
        for u in 0..30u32 {
            for v in [(u + 1) % 30, (u + 7) % 30] {
                arcs.push((u, v, 1.0));
                arcs.push((v, u, 1.0));
            }
        }
        let g = ModelGraph::from_arcs(vec![1; 30], vec![UNASSIGNED; 30], &mut arcs);
        let mut part: Vec<BlockId> = (0..30).map(|u| u % 3).collect();
        let mut weight = g.block_weights(&part, 3);
        let mut stats = RefineStats::new();
        local_search(&g, &mut part, &mut weight, 11, &params(), 5, &mut ChaCha8Rng::seed_from_u64(9), &mut stats);
        assert!(stats.moves > 0);
        assert!(stats.min_gain >= 0.0);
        assert_eq!(weight, g.block_weights(&part, 3));
        assert!(weight.iter().all(|&w| w <= 11));
    }
}
