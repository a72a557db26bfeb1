use crate::{BlockId, NetId};

const UNTOUCHED: BlockId = BlockId::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetStatus {
    Untouched,
    /// All pins streamed so far lie in this block.
    SingleBlock(BlockId),
    /// Pins span at least two blocks; the block is that of the most
    /// recently streamed pin.
    Cut(BlockId),
}

/// Per-net state: the block `d_e` of the most recently streamed pin and a
/// cut flag.
#[derive(Debug, Clone)]
pub struct NetTracker {
    last: Vec<BlockId>,
    cut: Vec<bool>,
}

impl NetTracker {
    pub fn new(m: usize) -> Self {
        Self {
            last: vec![UNTOUCHED; m],
            cut: vec![false; m],
        }
    }

    pub fn len(&self) -> usize {
        self.last.len()
    }

    pub fn is_empty(&self) -> bool {
        self.last.is_empty()
    }

    #[inline]
    pub fn status(&self, e: NetId) -> NetStatus {
        match self.last[e as usize] {
            UNTOUCHED => NetStatus::Untouched,
            b if self.cut[e as usize] => NetStatus::Cut(b),
            b => NetStatus::SingleBlock(b),
        }
    }

    /// Records that a pin of `e` was assigned to `block`.
    #[inline]
    pub fn update(&mut self, e: NetId, block: BlockId) {
        let last = &mut self.last[e as usize];
        if *last != UNTOUCHED && *last != block {
            self.cut[e as usize] = true;
        }
        *last = block;
    }
}
