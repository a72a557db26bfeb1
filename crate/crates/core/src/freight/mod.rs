//! Streaming hypergraph partitioning with the FREIGHT score.
//!
//! For node `v` and block `V_i` the score is
//! `Σ_{e∈I^i_obj(v)} ω(e) − c(v)·α·γ·c(V_i)^{γ−1}`, where `I^i_obj(v)` are
//! the incident nets whose most recently streamed pin lies in `V_i`. The
//! cut-net objective additionally ignores nets that are already cut.
//!
//! Blocks with positive affinity are scored explicitly in `O(|I(v)|)`. Among
//! all other blocks the best one is the lightest, which [`MinBlocks`] returns
//! in constant amortized time, so the per-node work does not depend on `k`.

mod min_blocks;
mod sorted_blocks;
mod tracker;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use min_blocks::MinBlocks;
pub use sorted_blocks::SortedBlocks;
pub use tracker::{NetStatus, NetTracker};

use crate::graph::{HyperNodeRecord, HypergraphStream};
use crate::onepass::{fennel_gain, keep_best, Candidate, FennelParams, DEFAULT_GAMMA};
use crate::partition::{BlockTally, PartitionState};
use crate::{BlockId, Error, Result, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Connectivity,
    CutNet,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Connectivity => "con",
            Objective::CutNet => "cut",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreightConfig {
    pub objective: Objective,
    pub k: u32,
    pub epsilon: f64,
    pub gamma: f64,
    /// Overrides `√k·m/n^{3/2}` (with `n` nodes and `m` nets) when set.
    pub alpha: Option<f64>,
}

impl FreightConfig {
    pub fn new(objective: Objective, k: u32) -> Self {
        Self {
            objective,
            k,
            epsilon: 0.03,
            gamma: DEFAULT_GAMMA,
            alpha: None,
        }
    }

    pub fn fennel_params(&self, n: usize, m: usize) -> FennelParams {
        FennelParams {
            gamma: self.gamma,
            alpha: self
                .alpha
                .unwrap_or_else(|| FennelParams::classic_alpha(n, m, self.k)),
            hard_balance: true,
        }
    }
}

/// Mutable state of one FREIGHT pass besides the partition itself.
#[derive(Debug, Clone)]
pub struct FreightState {
    pub tracker: NetTracker,
    pub min_blocks: MinBlocks,
    pub params: FennelParams,
    pub objective: Objective,
    tally: BlockTally<Weight>,
}

impl FreightState {
    pub fn new(m: usize, k: u32, unit_weights: bool, params: FennelParams, objective: Objective) -> Self {
        Self {
            tracker: NetTracker::new(m),
            min_blocks: if unit_weights {
                MinBlocks::unit(k)
            } else {
                MinBlocks::weighted(k)
            },
            params,
            objective,
            tally: BlockTally::new(k),
        }
    }
}

/// Assigns `rec` and updates the partition, the net tracker and the
/// min-block structure.
pub fn freight_assign(rec: &HyperNodeRecord, state: &mut PartitionState, fs: &mut FreightState) -> BlockId {
    let c = rec.weight;
    fs.tally.clear();
    for &(e, w) in &rec.nets {
        match fs.tracker.status(e) {
            NetStatus::Untouched => {}
            NetStatus::Cut(_) if fs.objective == Objective::CutNet => {}
            NetStatus::SingleBlock(b) | NetStatus::Cut(b) => fs.tally.add(b, w),
        }
    }

    let mut best: Option<Candidate> = None;
    for &b in fs.tally.touched() {
        let w = state.block_weight[b as usize];
        if w + c > state.l_max {
            continue;
        }
        let affinity = fs.tally.get(b) as f64;
        keep_best(
            &mut best,
            Candidate {
                score: fennel_gain(affinity, c, w, &fs.params),
                affinity,
                weight: w,
                block: b,
            },
        );
    }
    let lightest = fs.min_blocks.lowest_min();
    let lw = state.block_weight[lightest as usize];
    if fs.tally.get(lightest) == 0 && lw + c <= state.l_max {
        keep_best(
            &mut best,
            Candidate {
                score: fennel_gain(0.0, c, lw, &fs.params),
                affinity: 0.0,
                weight: lw,
                block: lightest,
            },
        );
    }
    let block = match best {
        Some(cand) => cand.block,
        None => {
            state.balance_violations += 1;
            lightest
        }
    };

    let old = state.block_weight[block as usize];
    state.assign(rec.id, block, c);
    fs.min_blocks.add(block, old, c);
    for &(e, _) in &rec.nets {
        fs.tracker.update(e, block);
    }
    block
}

#[derive(Debug, Clone)]
pub struct FreightRun {
    pub state: PartitionState,
    pub params: FennelParams,
    pub runtime_ms: f64,
}

/// One FREIGHT pass over a node-major hypergraph stream.
pub fn run_freight<S: HypergraphStream + ?Sized>(stream: &mut S, config: &FreightConfig) -> Result<FreightRun> {
    if config.k == 0 {
        return Err(Error::config("k must be at least 1"));
    }
    if !(config.epsilon >= 0.0) {
        return Err(Error::config("epsilon must be nonnegative"));
    }
    let header = stream.header().clone();
    let params = config.fennel_params(header.n, header.m);
    params.validate()?;
    let total = stream.total_node_weight()?;
    let mut state = PartitionState::new(header.n, config.k, config.epsilon, total.max(1));
    let mut fs = FreightState::new(header.m, config.k, !header.has_node_weights, params, config.objective);
    let mut rec = HyperNodeRecord::default();
    let start = Instant::now();
    stream.rewind()?;
    while stream.next_node(&mut rec)? {
        if rec.id as usize >= header.n {
            return Err(Error::Invariant(format!("record id {} outside 0..{}", rec.id, header.n)));
        }
        if !header.has_node_weights && rec.weight != 1 {
            return Err(Error::Invariant("unweighted stream produced a weighted node".into()));
        }
        freight_assign(&rec, &mut state, &mut fs);
    }
    Ok(FreightRun {
        state,
        params,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
