use std::collections::BTreeSet;

use super::SortedBlocks;
use crate::{BlockId, Weight};

/// Answers "lowest-index block of minimum weight" while blocks only grow.
#[derive(Debug, Clone)]
pub enum MinBlocks {
    /// Unit node weights. The minimum comes from [`SortedBlocks`]; the
    /// lowest index holding it is found by a cursor that only moves forward
    /// while the minimum stays the same. The minimum rises only after all
    /// `k` blocks left the old level, so the scans cost O(1) amortized.
    Unit {
        sorted: SortedBlocks,
        level: u64,
        cursor: u32,
    },
    /// Arbitrary node weights, ordered by `(weight, index)`.
    Weighted(BTreeSet<(Weight, BlockId)>),
}

impl MinBlocks {
    pub fn unit(k: u32) -> Self {
        MinBlocks::Unit {
            sorted: SortedBlocks::new(k),
            level: 0,
            cursor: 0,
        }
    }

    pub fn weighted(k: u32) -> Self {
        MinBlocks::Weighted((0..k).map(|b| (0, b)).collect())
    }

    pub fn lowest_min(&mut self) -> BlockId {
        match self {
            MinBlocks::Unit {
                sorted,
                level,
                cursor,
            } => {
                let min = sorted.min_cardinality();
                if min != *level {
                    *level = min;
                    *cursor = 0;
                }
                while sorted.cardinality(*cursor) != min {
                    *cursor += 1;
                }
                *cursor
            }
            MinBlocks::Weighted(set) => set.first().expect("at least one block").1,
        }
    }

    /// Records that `block` grew from `old` by `delta`.
    pub fn add(&mut self, block: BlockId, old: Weight, delta: Weight) {
        match self {
            MinBlocks::Unit { sorted, .. } => {
                debug_assert_eq!(delta, 1);
                sorted.increment(block);
            }
            MinBlocks::Weighted(set) => {
                set.remove(&(old, block));
                set.insert((old + delta, block));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_lowest_index_among_minimum() {
        let mut m = MinBlocks::unit(4);
        assert_eq!(m.lowest_min(), 0);
        m.add(0, 0, 1);
        m.add(2, 0, 1);
        assert_eq!(m.lowest_min(), 1);
        m.add(1, 0, 1);
        assert_eq!(m.lowest_min(), 3);
        m.add(3, 0, 1);
        assert_eq!(m.lowest_min(), 0);
    }

    #[test]
    fn weighted_orders_by_weight_then_index() {
        let mut m = MinBlocks::weighted(3);
        m.add(0, 0, 5);
        assert_eq!(m.lowest_min(), 1);
        m.add(1, 0, 2);
        m.add(2, 0, 2);
        assert_eq!(m.lowest_min(), 1);
    }
}
