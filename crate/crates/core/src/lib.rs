//! Streaming (hyper)graph decomposition.
//!
//! The crate bundles four families of streaming algorithms that share one
//! set of input readers, one partition state and one set of exact quality
//! metrics:
//!
//! * [`onepass`]: Hashing, LDG and generalized Fennel, plus the ReLDG /
//!   ReFennel restreaming drivers.
//! * [`heistream`]: buffered streaming partitioning. Each batch of nodes is
//!   turned into a small model graph that is partitioned with a multilevel
//!   label-propagation scheme optimizing the weighted Fennel objective.
//! * [`freight`]: streaming hypergraph partitioning for the cut-net and
//!   connectivity objectives, with an O(1) structure that keeps blocks
//!   sorted by cardinality.
//! * [`multisection`]: online recursive multi-section for hierarchical
//!   process mapping and for partitioning into arbitrary `k` through a
//!   multi-section tree.
//!
//! Node ids are 0-based everywhere inside the crate; the METIS and hMetis
//! readers translate from the 1-based file convention at the boundary.

pub mod bench;
pub mod cli;
pub mod error;
pub mod freight;
pub mod generate;
pub mod graph;
pub mod heistream;
pub mod io;
pub mod metrics;
pub mod multisection;
pub mod onepass;
pub mod partition;

pub use error::{Error, Result};
pub use graph::{
    CsrGraph, GraphHeader, GraphStream, HyperNodeRecord, Hypergraph, HypergraphHeader,
    HypergraphStream, NodeRecord,
};
pub use partition::{compute_lmax, PartitionState, UNASSIGNED};

/// Node index inside a graph or hypergraph stream.
pub type NodeId = u32;
/// Block (part) index, `0..k`.
pub type BlockId = u32;
/// Net (hyperedge) index.
pub type NetId = u32;
/// Integer node, edge and net weights.
pub type Weight = u64;
