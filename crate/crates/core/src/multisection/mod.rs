//! Online recursive multi-section (OMS) for process mapping and for
//! partitioning into arbitrary `k` through a multi-section tree.

mod distance;
mod hierarchy;
mod oms;
mod tree;

pub use distance::DistanceCode;
pub use hierarchy::HierarchySpec;
pub use oms::{oms_assign, run_oms, run_oms_parallel, OmsConfig, OmsScorer, OmsState};
pub use tree::{MultisectionTree, TreeNode, NO_PARENT};

/// Default base of the multi-section tree when no hierarchy is given.
pub const DEFAULT_BASE: u32 = 4;
