//! Buffered streaming graph partitioning.
//!
//! Nodes are read in batches of `δ`. Each batch becomes a model graph in
//! which already assigned neighbors are represented by `k` fixed artificial
//! nodes (one per block, weighing the block). The model is partitioned with
//! a multilevel scheme: size-constrained label propagation for coarsening,
//! greedy generalized Fennel on the coarsest graph, and label-propagation
//! local search on the generalized Fennel gain during uncoarsening. The
//! batch nodes' blocks are then made permanent.

mod coarsen;
mod model;
mod refine;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use coarsen::{coarsen, coarsening_threshold, contract, label_propagation, CoarsenParams, CoarseningHierarchy};
pub use model::{build_model, classify, load_batch, BatchModel, ModelGraph, ModelKind, NeighborKind};
pub use refine::{initial_partition, local_search, project, uncoarsen_refine, RefineStats};

use crate::graph::{GraphStream, NodeRecord};
use crate::onepass::{fennel_gain, keep_best, Candidate, FennelParams, PassStats, DEFAULT_GAMMA};
use crate::partition::{BlockTally, PartitionState, UNASSIGNED};
use crate::{BlockId, Error, Result, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeiStreamConfig {
    pub k: u32,
    pub epsilon: f64,
    /// Batch size in nodes.
    pub delta: usize,
    pub model: ModelKind,
    pub coarsen_rounds: u32,
    pub localsearch_rounds: u32,
    /// Coarsest-size parameter.
    pub x: u32,
    pub passes: u32,
    pub seed: u64,
    pub gamma: f64,
    /// Overrides the classic α when set.
    pub alpha: Option<f64>,
}

impl HeiStreamConfig {
    pub fn new(k: u32, delta: usize) -> Self {
        Self {
            k,
            epsilon: 0.03,
            delta,
            model: ModelKind::Extended,
            coarsen_rounds: 5,
            localsearch_rounds: 5,
            x: 4,
            passes: 1,
            seed: 0,
            gamma: DEFAULT_GAMMA,
            alpha: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        if self.delta == 0 {
            return Err(Error::config("delta must be at least 1"));
        }
        if self.x == 0 {
            return Err(Error::config("x must be at least 1"));
        }
        if self.passes == 0 {
            return Err(Error::config("passes must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::config("epsilon must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HeiStreamRun {
    pub state: PartitionState,
    pub passes: Vec<PassStats>,
    pub params: FennelParams,
    pub refine: RefineStats,
    pub batches: u64,
    /// Number of model levels summed over all batches.
    pub levels: u64,
    /// Node weight added by ghost contractions, summed over all batches.
    pub ghost_weight: Weight,
}

/// Writes the model blocks of the batch nodes into `state` using their true
/// weights. A node whose block cannot take it is placed in the best
/// feasible block by generalized Fennel against the committed partition.
/// Returns the number of nodes redirected this way.
pub fn commit_batch(
    batch: &[NodeRecord],
    model_part: &[BlockId],
    state: &mut PartitionState,
    params: &FennelParams,
) -> u64 {
    let mut redirected = 0;
    let mut tally: Option<BlockTally<Weight>> = None;
    for (i, rec) in batch.iter().enumerate() {
        let mut b = model_part[i];
        if !state.fits(b, rec.weight) {
            redirected += 1;
            let tally = tally.get_or_insert_with(|| BlockTally::new(state.k));
            tally.clear();
            for &(v, w) in &rec.neighbors {
                let nb = state.assignment[v as usize];
                if nb != UNASSIGNED {
                    tally.add(nb, w);
                }
            }
            let mut best: Option<Candidate> = None;
            for blk in 0..state.k {
                let wb = state.block_weight[blk as usize];
                if wb + rec.weight > state.l_max {
                    continue;
                }
                let affinity = tally.get(blk) as f64;
                keep_best(
                    &mut best,
                    Candidate {
                        score: fennel_gain(affinity, rec.weight, wb, params),
                        affinity,
                        weight: wb,
                        block: blk,
                    },
                );
            }
            b = match best {
                Some(c) => c.block,
                None => {
                    state.balance_violations += 1;
                    state.lightest_block()
                }
            };
        }
        state.assign(rec.id, b, rec.weight);
    }
    redirected
}

struct Pipeline<'a> {
    config: &'a HeiStreamConfig,
    params: FennelParams,
    rng: ChaCha8Rng,
    refine: RefineStats,
    levels: u64,
    ghost_weight: Weight,
}

impl Pipeline<'_> {
    fn coarsen_params(&self, model: &ModelGraph, l_max: Weight) -> CoarsenParams {
        CoarsenParams {
            rounds: self.config.coarsen_rounds,
            threshold: coarsening_threshold(model.n(), self.config.x, self.config.k),
            cap: l_max,
        }
    }

    /// Partitions one batch in the first pass.
    fn first_pass_batch(&mut self, batch: &[NodeRecord], state: &mut PartitionState) {
        let model = build_model(batch, state, self.config.model, false, &mut self.rng);
        self.ghost_weight += model.ghost_weight;
        let cp = self.coarsen_params(&model.graph, state.l_max);
        let (h, _) = coarsen(&model.graph, &cp, None, &mut self.rng);
        self.levels += h.levels.len() as u64;
        let (coarse_part, mut weight, violations) =
            initial_partition(h.coarsest(), self.config.k, state.l_max, &self.params);
        self.refine.violations += violations;
        let part = uncoarsen_refine(
            &h,
            coarse_part,
            &mut weight,
            state.l_max,
            &self.params,
            self.config.localsearch_rounds,
            false,
            &mut self.rng,
            &mut self.refine,
        );
        commit_batch(batch, &part[..batch.len()], state, &self.params);
    }

    /// Repartitions one batch of an extra pass, starting from the current
    /// assignment.
    fn restream_batch(&mut self, batch: &[NodeRecord], state: &mut PartitionState) {
        let previous: Vec<BlockId> = batch
            .iter()
            .map(|r| state.unassign(r.id, r.weight).expect("assigned in earlier pass"))
            .collect();
        let model = build_model(batch, state, ModelKind::Basic, true, &mut self.rng);
        let mut start: Vec<BlockId> = previous;
        start.extend(0..self.config.k);
        let cp = self.coarsen_params(&model.graph, state.l_max);
        let (h, parts) = coarsen(&model.graph, &cp, Some(&start), &mut self.rng);
        self.levels += h.levels.len() as u64;
        let coarse_part = parts.expect("blocks given").pop().expect("nonempty");
        let mut weight = model.graph.block_weights(&start, self.config.k);
        let part = uncoarsen_refine(
            &h,
            coarse_part,
            &mut weight,
            state.l_max,
            &self.params,
            self.config.localsearch_rounds,
            true,
            &mut self.rng,
            &mut self.refine,
        );
        commit_batch(batch, &part[..batch.len()], state, &self.params);
    }
}

/// Buffered streaming partitioning with optional restreaming passes.
pub fn run_heistream<S: GraphStream + ?Sized>(stream: &mut S, config: &HeiStreamConfig) -> Result<HeiStreamRun> {
    config.validate()?;
    let header = stream.header().clone();
    let total = stream.total_node_weight()?;
    let mut state = PartitionState::new(header.n, config.k, config.epsilon, total.max(1));
    let params = FennelParams {
        gamma: config.gamma,
        alpha: config
            .alpha
            .unwrap_or_else(|| FennelParams::classic_alpha(header.n, header.m, config.k)),
        hard_balance: true,
    };
    params.validate()?;
    let mut pipe = Pipeline {
        config,
        params,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        refine: RefineStats::new(),
        levels: 0,
        ghost_weight: 0,
    };
    let mut batch: Vec<NodeRecord> = Vec::new();
    let mut passes = Vec::new();
    let mut batches = 0;
    for pass in 1..=config.passes {
        let start = Instant::now();
        let before = state.balance_violations;
        stream.rewind()?;
        loop {
            let len = load_batch(stream, config.delta, &mut batch)?;
            if len == 0 {
                break;
            }
            let records = &batch[..len];
            let last = records[len - 1].id as usize;
            if last >= header.n {
                return Err(Error::Invariant(format!("record id {last} outside 0..{}", header.n)));
            }
            if pass == 1 {
                pipe.first_pass_batch(records, &mut state);
            } else {
                pipe.restream_batch(records, &mut state);
            }
            batches += 1;
        }
        passes.push(PassStats {
            pass,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            balance_violations: state.balance_violations - before,
        });
    }
    if !state.is_complete() {
        return Err(Error::Invariant("stream ended before every node was assigned".into()));
    }
    Ok(HeiStreamRun {
        state,
        passes,
        params,
        refine: pipe.refine,
        batches,
        levels: pipe.levels,
        ghost_weight: pipe.ghost_weight,
    })
}
