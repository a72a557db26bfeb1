use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Machine hierarchy `S = a_1:…:a_ℓ` with per-layer distances
/// `D = d_1:…:d_ℓ`. Layer 1 is the innermost (e.g. cores of a processor).
///
/// Layers with fan-out 1 carry no communication and are dropped on
/// construction, so `4:16:1` becomes the two-layer hierarchy `4:16`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchySpec {
    fanouts: Vec<u32>,
    distances: Vec<u64>,
}

impl HierarchySpec {
    pub fn new(fanouts: Vec<u32>, distances: Vec<u64>) -> Result<Self> {
        if fanouts.is_empty() {
            return Err(Error::config("hierarchy needs at least one layer"));
        }
        if fanouts.len() != distances.len() {
            return Err(Error::config(format!(
                "hierarchy has {} layers but {} distances",
                fanouts.len(),
                distances.len()
            )));
        }
        if fanouts.contains(&0) {
            return Err(Error::config("hierarchy fan-outs must be positive"));
        }
        let (fanouts, distances): (Vec<u32>, Vec<u64>) = fanouts
            .into_iter()
            .zip(distances)
            .filter(|&(a, _)| a > 1)
            .unzip();
        let k = fanouts.iter().map(|&a| a as u64).product::<u64>();
        if k > u32::MAX as u64 {
            return Err(Error::config("hierarchy product exceeds 32-bit block ids"));
        }
        Ok(Self {
            fanouts,
            distances,
        })
    }

    /// Parses `"4:16:2"` and `"1:10:100"`.
    pub fn parse(hierarchy: &str, distances: &str) -> Result<Self> {
        Self::new(parse_list(hierarchy)?, parse_list(distances)?)
    }

    /// Effective fan-outs `a_1..a_ℓ`, innermost first.
    pub fn fanouts(&self) -> &[u32] {
        &self.fanouts
    }

    pub fn distances(&self) -> &[u64] {
        &self.distances
    }

    pub fn layers(&self) -> usize {
        self.fanouts.len()
    }

    pub fn k(&self) -> u32 {
        self.fanouts.iter().product()
    }

    /// True when distances grow strictly from the inner to the outer layers.
    pub fn distances_increasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[0] < w[1])
    }

    pub fn check_k(&self, k: u32) -> Result<()> {
        let product = self.fanouts.iter().map(|&a| a as u64).product::<u64>();
        if product != k as u64 {
            return Err(Error::HierarchyMismatch { product, k });
        }
        Ok(())
    }
}

impl fmt::Display for HierarchySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(":");
        write!(
            f,
            "S={} D={}",
            join(self.fanouts.iter().map(|a| a.to_string()).collect()),
            join(self.distances.iter().map(|d| d.to_string()).collect())
        )
    }
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(':')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Error::config(format!("invalid hierarchy entry {t:?} in {s:?}")))
        })
        .collect()
}
