//! Implicit PE distance matrix.
//!
//! Every PE `b` gets a bit string made of ℓ sections of `s` bits, where
//! section `i` (counted from the outermost layer) holds the mixed-radix digit
//! of `b` for that layer. Two PEs first differ in the section that contains
//! the leftmost set bit of `code(a) XOR code(b)`, which a leading-zero count
//! finds in constant time.

use super::HierarchySpec;
use crate::BlockId;

#[derive(Debug, Clone)]
pub struct DistanceCode {
    fanouts: Vec<u32>,
    distances: Vec<u64>,
    bits_per_section: u32,
    /// One code per PE; `None` when ℓ·s does not fit in 64 bits, in which
    /// case distances are answered by repeated division.
    codes: Option<Vec<u64>>,
}

impl DistanceCode {
    pub fn new(spec: &HierarchySpec) -> Self {
        let fanouts = spec.fanouts().to_vec();
        let max_a = fanouts.iter().copied().max().unwrap_or(1);
        let bits_per_section = if max_a <= 1 {
            0
        } else {
            32 - (max_a - 1).leading_zeros()
        };
        let total_bits = bits_per_section as usize * fanouts.len();
        let codes = (total_bits <= 64).then(|| {
            (0..spec.k())
                .map(|b| encode(b, &fanouts, bits_per_section))
                .collect()
        });
        Self {
            fanouts,
            distances: spec.distances().to_vec(),
            bits_per_section,
            codes,
        }
    }

    pub fn bits_per_section(&self) -> u32 {
        self.bits_per_section
    }

    pub fn code(&self, pe: BlockId) -> Option<u64> {
        self.codes.as_ref().map(|c| c[pe as usize])
    }

    pub fn k(&self) -> u32 {
        self.fanouts.iter().product()
    }

    /// Communication distance between two PEs.
    #[inline]
    pub fn distance(&self, a: BlockId, b: BlockId) -> u64 {
        if a == b {
            return 0;
        }
        match &self.codes {
            Some(codes) => {
                let x = codes[a as usize] ^ codes[b as usize];
                let layers = self.fanouts.len() as u32;
                let used_bits = layers * self.bits_per_section;
                let lz = x.leading_zeros() - (64 - used_bits);
                let section_from_top = lz / self.bits_per_section;
                let layer = layers - 1 - section_from_top;
                self.distances[layer as usize]
            }
            None => self.distance_by_division(a, b),
        }
    }

    fn distance_by_division(&self, mut a: BlockId, mut b: BlockId) -> u64 {
        let mut layer = 0;
        for (i, &f) in self.fanouts.iter().enumerate() {
            if a % f != b % f {
                layer = i;
            }
            a /= f;
            b /= f;
        }
        self.distances[layer]
    }
}

fn encode(mut pe: u32, fanouts: &[u32], bits: u32) -> u64 {
    let mut code = 0u64;
    for (i, &f) in fanouts.iter().enumerate() {
        code |= ((pe % f) as u64) << (i as u32 * bits);
        pe /= f;
    }
    code
}
