//! One-pass streaming partitioners (Hashing, LDG, generalized Fennel) and
//! the ReLDG / ReFennel restreaming drivers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphStream, NodeRecord};
use crate::partition::{BlockTally, PartitionState, UNASSIGNED};
use crate::{BlockId, Error, NodeId, Result, Weight};

pub const DEFAULT_GAMMA: f64 = 1.5;
pub const DEFAULT_ALPHA_GROWTH: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FennelParams {
    pub gamma: f64,
    pub alpha: f64,
    pub hard_balance: bool,
}

impl FennelParams {
    /// `α = √k · m / n^{3/2}` for a (hyper)graph with `n` nodes and `m`
    /// edges (nets).
    pub fn classic_alpha(n: usize, m: usize, k: u32) -> f64 {
        if n == 0 {
            return 0.0;
        }
        (k as f64).sqrt() * m as f64 / (n as f64).powf(1.5)
    }

    pub fn classic(n: usize, m: usize, k: u32) -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            alpha: Self::classic_alpha(n, m, k),
            hard_balance: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) {
            return Err(Error::config("gamma must be greater than 1"));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::config("alpha must be a nonnegative finite number"));
        }
        Ok(())
    }

    /// `c(u)·α·γ·c(V_i)^{γ−1}`.
    #[inline]
    pub fn penalty(&self, node_weight: Weight, block_weight: Weight) -> f64 {
        node_weight as f64 * self.alpha * self.gamma * pow(block_weight as f64, self.gamma - 1.0)
    }
}

/// `x^e`, with `sqrt` for the default exponent. Both are correctly rounded
/// for `e = 0.5`, so every scorer agrees bit for bit.
#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 0.5 {
        x.sqrt()
    } else {
        x.powf(e)
    }
}

/// Generalized Fennel score of placing a node of weight `node_weight`, with
/// `affinity = Σ_{v∈V_i∩N(u)} ω(u,v)`, into a block of weight
/// `block_weight`.
#[inline]
pub fn fennel_gain(affinity: f64, node_weight: Weight, block_weight: Weight, params: &FennelParams) -> f64 {
    affinity - params.penalty(node_weight, block_weight)
}

/// Candidate block in an argmax. Ordering: higher score, then higher
/// affinity, then lighter block, then lower index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub score: f64,
    pub affinity: f64,
    pub weight: Weight,
    pub block: BlockId,
}

impl Candidate {
    #[inline]
    pub fn beats(&self, other: &Candidate) -> bool {
        if self.score != other.score {
            return self.score > other.score;
        }
        if self.affinity != other.affinity {
            return self.affinity > other.affinity;
        }
        if self.weight != other.weight {
            return self.weight < other.weight;
        }
        self.block < other.block
    }
}

#[inline]
pub(crate) fn keep_best(best: &mut Option<Candidate>, c: Candidate) {
    match best {
        Some(b) if !c.beats(b) => {}
        _ => *best = Some(c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnePassAlgorithm {
    Hashing,
    Ldg,
    Fennel,
}

impl OnePassAlgorithm {
    pub fn name(&self) -> &'static str {
        match self {
            OnePassAlgorithm::Hashing => "hashing",
            OnePassAlgorithm::Ldg => "ldg",
            OnePassAlgorithm::Fennel => "fennel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnePassConfig {
    pub algorithm: OnePassAlgorithm,
    pub k: u32,
    pub epsilon: f64,
    pub passes: u32,
    pub restream_alpha_growth: f64,
    pub gamma: f64,
    /// Overrides the classic α when set.
    pub alpha: Option<f64>,
    pub hard_balance: bool,
    pub seed: u64,
}

impl OnePassConfig {
    pub fn new(algorithm: OnePassAlgorithm, k: u32) -> Self {
        Self {
            algorithm,
            k,
            epsilon: 0.03,
            passes: 1,
            restream_alpha_growth: DEFAULT_ALPHA_GROWTH,
            gamma: DEFAULT_GAMMA,
            alpha: None,
            hard_balance: true,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be at least 1"));
        }
        if self.passes == 0 {
            return Err(Error::config("passes must be at least 1"));
        }
        if !(self.restream_alpha_growth >= 1.0) {
            return Err(Error::config("alpha growth must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::config("epsilon must be nonnegative"));
        }
        Ok(())
    }

    pub fn fennel_params(&self, n: usize, m: usize) -> FennelParams {
        FennelParams {
            gamma: self.gamma,
            alpha: self
                .alpha
                .unwrap_or_else(|| FennelParams::classic_alpha(n, m, self.k)),
            hard_balance: self.hard_balance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassStats {
    pub pass: u32,
    pub runtime_ms: f64,
    pub balance_violations: u64,
}

#[derive(Debug, Clone)]
pub struct OnePassRun {
    pub state: PartitionState,
    /// One entry per pass; a single-pass run has exactly one.
    pub passes: Vec<PassStats>,
    pub params: FennelParams,
}

#[inline]
pub fn hashing_assign(node: NodeId, k: u32) -> BlockId {
    node % k
}

/// LDG argmax over `aff·(1 − c(V_i)/L_max)`. Ties go to the lighter block,
/// then the lower index. Returns the block and whether it had to be
/// overloaded.
fn choose_ldg(tally: &BlockTally<Weight>, state: &PartitionState, c: Weight) -> (BlockId, bool) {
    let l_max = state.l_max as f64;
    let mut best: Option<Candidate> = None;
    for b in 0..state.k {
        let w = state.block_weight[b as usize];
        if w + c > state.l_max {
            continue;
        }
        let score = tally.get(b) as f64 * (1.0 - w as f64 / l_max);
        keep_best(
            &mut best,
            Candidate {
                score,
                affinity: 0.0,
                weight: w,
                block: b,
            },
        );
    }
    match best {
        Some(c) => (c.block, false),
        None => (state.lightest_block(), true),
    }
}

fn choose_fennel(
    tally: &BlockTally<Weight>,
    state: &PartitionState,
    c: Weight,
    params: &FennelParams,
) -> (BlockId, bool) {
    let mut best: Option<Candidate> = None;
    for b in 0..state.k {
        let w = state.block_weight[b as usize];
        if params.hard_balance && w + c > state.l_max {
            continue;
        }
        let affinity = tally.get(b) as f64;
        keep_best(
            &mut best,
            Candidate {
                score: fennel_gain(affinity, c, w, params),
                affinity,
                weight: w,
                block: b,
            },
        );
    }
    match best {
        Some(c) => (c.block, false),
        None => (state.lightest_block(), true),
    }
}

fn tally_assigned(rec: &NodeRecord, assignment: &[BlockId], tally: &mut BlockTally<Weight>) {
    tally.clear();
    for &(u, w) in &rec.neighbors {
        let b = assignment[u as usize];
        if b != UNASSIGNED {
            tally.add(b, w);
        }
    }
}

/// Assigns `rec` with LDG and updates `state`.
pub fn ldg_assign(rec: &NodeRecord, state: &mut PartitionState, tally: &mut BlockTally<Weight>) -> BlockId {
    tally_assigned(rec, &state.assignment, tally);
    let (b, violated) = choose_ldg(tally, state, rec.weight);
    state.balance_violations += violated as u64;
    state.assign(rec.id, b, rec.weight);
    b
}

/// Assigns `rec` with generalized Fennel and updates `state`.
pub fn fennel_assign(
    rec: &NodeRecord,
    state: &mut PartitionState,
    params: &FennelParams,
    tally: &mut BlockTally<Weight>,
) -> BlockId {
    tally_assigned(rec, &state.assignment, tally);
    let (b, violated) = choose_fennel(tally, state, rec.weight, params);
    state.balance_violations += violated as u64;
    state.assign(rec.id, b, rec.weight);
    b
}

fn check_record(rec: &NodeRecord, n: usize) -> Result<()> {
    if rec.id as usize >= n {
        return Err(Error::Invariant(format!("record id {} outside 0..{n}", rec.id)));
    }
    Ok(())
}

/// Runs the configured algorithm for `config.passes` passes. Passes after
/// the first restream: ReLDG reassigns against block weights of the current
/// pass only, ReFennel removes each node before rescoring it and multiplies
/// α by the growth factor per pass. Hashing is order independent, so extra
/// passes leave it unchanged.
pub fn run_onepass<S: GraphStream + ?Sized>(stream: &mut S, config: &OnePassConfig) -> Result<OnePassRun> {
    config.validate()?;
    let header = stream.header().clone();
    let total = stream.total_node_weight()?;
    let mut state = PartitionState::new(header.n, config.k, config.epsilon, total.max(1));
    let mut params = config.fennel_params(header.n, header.m);
    params.validate()?;
    let mut tally = BlockTally::<Weight>::new(config.k);
    let mut rec = NodeRecord::default();
    let mut passes = Vec::with_capacity(config.passes as usize);

    let start = Instant::now();
    stream.rewind()?;
    while stream.next_node(&mut rec)? {
        check_record(&rec, header.n)?;
        match config.algorithm {
            OnePassAlgorithm::Hashing => {
                let b = hashing_assign(rec.id, config.k);
                if !state.fits(b, rec.weight) {
                    state.balance_violations += 1;
                }
                state.assign(rec.id, b, rec.weight);
            }
            OnePassAlgorithm::Ldg => {
                ldg_assign(&rec, &mut state, &mut tally);
            }
            OnePassAlgorithm::Fennel => {
                fennel_assign(&rec, &mut state, &params, &mut tally);
            }
        }
    }
    passes.push(PassStats {
        pass: 1,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        balance_violations: state.balance_violations,
    });

    for pass in 2..=config.passes {
        let start = Instant::now();
        let before = state.balance_violations;
        match config.algorithm {
            OnePassAlgorithm::Hashing => {}
            OnePassAlgorithm::Ldg => restream_ldg(stream, &mut state, &mut tally, &mut rec)?,
            OnePassAlgorithm::Fennel => {
                params.alpha *= config.restream_alpha_growth;
                restream_fennel(stream, &mut state, &params, &mut tally, &mut rec)?;
            }
        }
        passes.push(PassStats {
            pass,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            balance_violations: state.balance_violations - before,
        });
    }
    Ok(OnePassRun {
        state,
        passes,
        params,
    })
}

fn restream_ldg<S: GraphStream + ?Sized>(
    stream: &mut S,
    state: &mut PartitionState,
    tally: &mut BlockTally<Weight>,
    rec: &mut NodeRecord,
) -> Result<()> {
    let n = state.n();
    let previous = std::mem::replace(&mut state.assignment, vec![UNASSIGNED; n]);
    state.block_weight.iter_mut().for_each(|w| *w = 0);
    stream.rewind()?;
    while stream.next_node(rec)? {
        check_record(rec, state.n())?;
        tally.clear();
        for &(u, w) in &rec.neighbors {
            let b = match state.assignment[u as usize] {
                UNASSIGNED => previous[u as usize],
                b => b,
            };
            if b != UNASSIGNED {
                tally.add(b, w);
            }
        }
        let (b, violated) = choose_ldg(tally, state, rec.weight);
        state.balance_violations += violated as u64;
        state.assign(rec.id, b, rec.weight);
    }
    Ok(())
}

fn restream_fennel<S: GraphStream + ?Sized>(
    stream: &mut S,
    state: &mut PartitionState,
    params: &FennelParams,
    tally: &mut BlockTally<Weight>,
    rec: &mut NodeRecord,
) -> Result<()> {
    stream.rewind()?;
    while stream.next_node(rec)? {
        check_record(rec, state.n())?;
        state.unassign(rec.id, rec.weight);
        fennel_assign(rec, state, params, tally);
    }
    Ok(())
}
