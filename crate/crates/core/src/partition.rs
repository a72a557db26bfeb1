use crate::{BlockId, Error, NodeId, Result, Weight};

/// Marker for nodes that have not been assigned yet.
pub const UNASSIGNED: BlockId = BlockId::MAX;

/// Per-block capacity `⌈(1+ε)·c(V)/k⌉`.
pub fn compute_lmax(total_weight: Weight, k: u32, epsilon: f64) -> Weight {
    assert!(k >= 1, "k must be at least 1");
    assert!(epsilon >= 0.0, "epsilon must be nonnegative");
    let x = (1.0 + epsilon) * total_weight as f64 / k as f64;
    // (1+ε)·W/k is often an integer in exact arithmetic but lands a few ulps
    // above it in floating point; do not round those up.
    let r = x.round();
    let l = if (x - r).abs() <= 1e-9 * r.max(1.0) { r } else { x.ceil() };
    (l as Weight).max(1)
}

/// Assignment array and block weights; the single source of truth for
/// balance.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionState {
    pub k: u32,
    pub epsilon: f64,
    pub l_max: Weight,
    pub assignment: Vec<BlockId>,
    pub block_weight: Vec<Weight>,
    /// Number of assignments that had to overload a block because no
    /// feasible block existed.
    pub balance_violations: u64,
}

impl PartitionState {
    pub fn new(n: usize, k: u32, epsilon: f64, total_weight: Weight) -> Self {
        Self {
            k,
            epsilon,
            l_max: compute_lmax(total_weight, k, epsilon),
            assignment: vec![UNASSIGNED; n],
            block_weight: vec![0; k as usize],
            balance_violations: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    #[inline]
    pub fn block_of(&self, v: NodeId) -> Option<BlockId> {
        match self.assignment[v as usize] {
            UNASSIGNED => None,
            b => Some(b),
        }
    }

    #[inline]
    pub fn assign(&mut self, v: NodeId, block: BlockId, weight: Weight) {
        debug_assert!(block < self.k);
        debug_assert_eq!(self.assignment[v as usize], UNASSIGNED);
        self.assignment[v as usize] = block;
        self.block_weight[block as usize] += weight;
    }

    /// Removes `v` from its block, returning the block it was in.
    #[inline]
    pub fn unassign(&mut self, v: NodeId, weight: Weight) -> Option<BlockId> {
        let b = self.block_of(v)?;
        self.block_weight[b as usize] -= weight;
        self.assignment[v as usize] = UNASSIGNED;
        Some(b)
    }

    #[inline]
    pub fn fits(&self, block: BlockId, weight: Weight) -> bool {
        self.block_weight[block as usize] + weight <= self.l_max
    }

    /// Lowest-index block of minimum weight.
    pub fn lightest_block(&self) -> BlockId {
        let mut best = 0;
        for (i, &w) in self.block_weight.iter().enumerate() {
            if w < self.block_weight[best] {
                best = i;
            }
        }
        best as BlockId
    }

    pub fn is_complete(&self) -> bool {
        !self.assignment.contains(&UNASSIGNED)
    }

    pub fn total_weight(&self) -> Weight {
        self.block_weight.iter().sum()
    }

    pub fn max_block_weight(&self) -> Weight {
        self.block_weight.iter().copied().max().unwrap_or(0)
    }

    /// `max_i c(V_i)·k / c(V) − 1`.
    pub fn imbalance(&self) -> f64 {
        imbalance(&self.block_weight)
    }

    /// Checks that the stored block weights equal the recomputed sums.
    pub fn verify_weights(&self, node_weight: impl Fn(NodeId) -> Weight) -> Result<()> {
        let mut recomputed = vec![0 as Weight; self.k as usize];
        for (v, &b) in self.assignment.iter().enumerate() {
            if b != UNASSIGNED {
                if b >= self.k {
                    return Err(Error::Invariant(format!("node {v} assigned to block {b} >= k")));
                }
                recomputed[b as usize] += node_weight(v as NodeId);
            }
        }
        if recomputed != self.block_weight {
            return Err(Error::Invariant("block weights differ from assignment sums".into()));
        }
        Ok(())
    }
}

/// Sparse per-block accumulator: dense storage with a list of touched
/// blocks so that clearing costs O(touched) rather than O(k).
#[derive(Debug, Clone)]
pub struct BlockTally<T> {
    value: Vec<T>,
    touched: Vec<BlockId>,
}

impl<T: Copy + Default + PartialEq + std::ops::AddAssign> BlockTally<T> {
    pub fn new(k: u32) -> Self {
        Self {
            value: vec![T::default(); k as usize],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, block: BlockId, x: T) {
        let slot = &mut self.value[block as usize];
        if *slot == T::default() {
            self.touched.push(block);
        }
        *slot += x;
    }

    #[inline]
    pub fn get(&self, block: BlockId) -> T {
        self.value[block as usize]
    }

    /// Blocks that received a contribution since the last clear, in first
    /// touch order. May contain duplicates if a block returned to zero.
    pub fn touched(&self) -> &[BlockId] {
        &self.touched
    }

    pub fn clear(&mut self) {
        for &b in &self.touched {
            self.value[b as usize] = T::default();
        }
        self.touched.clear();
    }
}

pub fn imbalance(block_weight: &[Weight]) -> f64 {
    let total: Weight = block_weight.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let max = block_weight.iter().copied().max().unwrap_or(0);
    (max as f64 * block_weight.len() as f64 / total as f64 - 1.0).max(0.0)
}
