use crate::BlockId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bucket {
    cardinality: u64,
    left: u32,
    right: u32,
}

/// Blocks kept sorted by cardinality with O(1) increments.
///
/// `A` lists the blocks in ascending order of cardinality and `B` is its
/// inverse. Maximal runs of equal cardinality in `A` are described by
/// buckets holding the run's bounds; every position of `A` points to the
/// bucket covering it.
#[derive(Debug, Clone)]
pub struct SortedBlocks {
    a: Vec<BlockId>,
    b: Vec<u32>,
    bucket_at: Vec<u32>,
    buckets: Vec<Bucket>,
    free: Vec<u32>,
}

impl SortedBlocks {
    pub fn new(k: u32) -> Self {
        assert!(k >= 1);
        Self {
            a: (0..k).collect(),
            b: (0..k).collect(),
            bucket_at: vec![0; k as usize],
            buckets: vec![Bucket {
                cardinality: 0,
                left: 0,
                right: k - 1,
            }],
            free: Vec::new(),
        }
    }

    pub fn k(&self) -> u32 {
        self.a.len() as u32
    }

    /// Adds one to the cardinality of block `d`.
    pub fn increment(&mut self, d: BlockId) {
        let p = self.b[d as usize];
        let c = self.bucket_at[p as usize];
        let q = self.buckets[c as usize].right;
        let other = self.a[q as usize];
        self.a.swap(p as usize, q as usize);
        self.b.swap(other as usize, d as usize);
        self.buckets[c as usize].right = q.wrapping_sub(1);
        let new_card = self.buckets[c as usize].cardinality + 1;
        let next = (q as usize + 1 < self.a.len()).then(|| self.bucket_at[q as usize + 1]);
        match next {
            Some(n) if self.buckets[n as usize].cardinality == new_card => {
                self.bucket_at[q as usize] = n;
                self.buckets[n as usize].left -= 1;
            }
            _ => {
                let bucket = Bucket {
                    cardinality: new_card,
                    left: q,
                    right: q,
                };
                let id = match self.free.pop() {
                    Some(id) => {
                        self.buckets[id as usize] = bucket;
                        id
                    }
                    None => {
                        self.buckets.push(bucket);
                        (self.buckets.len() - 1) as u32
                    }
                };
                self.bucket_at[q as usize] = id;
            }
        }
        // The bucket is empty once its right bound passed its left bound.
        let cb = self.buckets[c as usize];
        if q == 0 || cb.right < cb.left {
            self.free.push(c);
        }
    }

    /// A block of minimum cardinality.
    #[inline]
    pub fn min_block(&self) -> BlockId {
        self.a[0]
    }

    #[inline]
    pub fn min_cardinality(&self) -> u64 {
        self.buckets[self.bucket_at[0] as usize].cardinality
    }

    pub fn cardinality(&self, block: BlockId) -> u64 {
        let p = self.b[block as usize];
        self.buckets[self.bucket_at[p as usize] as usize].cardinality
    }

    /// Blocks in ascending order of cardinality.
    pub fn order(&self) -> &[BlockId] {
        &self.a
    }

    pub fn position(&self, block: BlockId) -> u32 {
        self.b[block as usize]
    }

    /// Live buckets as `(cardinality, left, right)`, sorted by position.
    pub fn buckets(&self) -> Vec<(u64, u32, u32)> {
        let mut out = Vec::new();
        let mut p = 0usize;
        while p < self.a.len() {
            let bk = self.buckets[self.bucket_at[p] as usize];
            out.push((bk.cardinality, bk.left, bk.right));
            p = bk.right as usize + 1;
        }
        out
    }

    /// Full consistency check, O(k).
    pub fn check(&self) -> Result<(), String> {
        let k = self.a.len();
        for p in 0..k {
            if self.b[self.a[p] as usize] as usize != p {
                return Err(format!("B does not invert A at position {p}"));
            }
            let bk = self.buckets[self.bucket_at[p] as usize];
            if !(bk.left as usize <= p && p <= bk.right as usize) {
                return Err(format!("position {p} outside its bucket [{}, {}]", bk.left, bk.right));
            }
            if p > 0 {
                let prev = self.buckets[self.bucket_at[p - 1] as usize];
                if prev.cardinality > bk.cardinality {
                    return Err(format!("A is not sorted at position {p}"));
                }
                if prev.cardinality == bk.cardinality && self.bucket_at[p - 1] != self.bucket_at[p] {
                    return Err(format!("run split across buckets at position {p}"));
                }
                if prev.cardinality < bk.cardinality && bk.left as usize != p {
                    return Err(format!("bucket starting at {p} has left bound {}", bk.left));
                }
            }
        }
        Ok(())
    }
}
