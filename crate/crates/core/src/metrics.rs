//! Exact quality metrics, computed by a dedicated verification pass over the
//! input stream.

use serde::{Deserialize, Serialize};

use crate::graph::{GraphStream, HyperNodeRecord, HypergraphStream, NodeRecord};
use crate::multisection::{DistanceCode, HierarchySpec};
use crate::partition::{imbalance, UNASSIGNED};
use crate::{BlockId, Error, NodeId, Result, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub edge_cut: Option<Weight>,
    pub cut_net: Option<Weight>,
    pub connectivity: Option<Weight>,
    pub imbalance: f64,
    pub comm_cost: Option<Weight>,
    pub max_block_weight: Weight,
    pub l_max: Weight,
}

fn block(assignment: &[BlockId], v: NodeId) -> Result<BlockId> {
    match assignment.get(v as usize) {
        Some(&b) if b != UNASSIGNED => Ok(b),
        _ => Err(Error::Unassigned(v as usize)),
    }
}

/// Σ ω(e) over edges whose endpoints lie in different blocks. Each
/// undirected edge is counted once (from its lower endpoint).
pub fn edge_cut<S: GraphStream + ?Sized>(stream: &mut S, assignment: &[BlockId]) -> Result<Weight> {
    stream.rewind()?;
    let mut rec = NodeRecord::default();
    let mut cut = 0;
    while stream.next_node(&mut rec)? {
        let bu = block(assignment, rec.id)?;
        for &(v, w) in &rec.neighbors {
            if rec.id < v && bu != block(assignment, v)? {
                cut += w;
            }
        }
    }
    Ok(cut)
}

/// Communication cost `J = Σ_{u,v} ω(u,v)·D(Π(u),Π(v))`, each undirected
/// edge counted once.
pub fn comm_cost<S: GraphStream + ?Sized>(
    stream: &mut S,
    assignment: &[BlockId],
    k: u32,
    hierarchy: &HierarchySpec,
) -> Result<Weight> {
    hierarchy.check_k(k)?;
    let code = DistanceCode::new(hierarchy);
    stream.rewind()?;
    let mut rec = NodeRecord::default();
    let mut cost = 0;
    while stream.next_node(&mut rec)? {
        let bu = block(assignment, rec.id)?;
        for &(v, w) in &rec.neighbors {
            if rec.id < v {
                cost += w * code.distance(bu, block(assignment, v)?);
            }
        }
    }
    Ok(cost)
}

/// Returns `(cut_net, connectivity)`: the weight of nets touching at least
/// two blocks, and `Σ (λ(e) − 1)·ω(e)` with λ(e) the exact number of blocks
/// a net touches.
pub fn cut_net_and_connectivity<S: HypergraphStream + ?Sized>(
    stream: &mut S,
    assignment: &[BlockId],
) -> Result<(Weight, Weight)> {
    stream.rewind()?;
    let m = stream.header().m;
    let mut net_weight = vec![0 as Weight; m];
    let mut pairs: Vec<u64> = Vec::with_capacity(stream.header().pins);
    let mut rec = HyperNodeRecord::default();
    while stream.next_node(&mut rec)? {
        let b = block(assignment, rec.id)?;
        for &(e, w) in &rec.nets {
            net_weight[e as usize] = w;
            pairs.push(((e as u64) << 32) | b as u64);
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let mut cut_net = 0;
    let mut connectivity = 0;
    let mut i = 0;
    while i < pairs.len() {
        let e = (pairs[i] >> 32) as usize;
        let mut j = i;
        while j < pairs.len() && (pairs[j] >> 32) as usize == e {
            j += 1;
        }
        let lambda = (j - i) as Weight;
        if lambda >= 2 {
            cut_net += net_weight[e];
            connectivity += (lambda - 1) * net_weight[e];
        }
        i = j;
    }
    Ok((cut_net, connectivity))
}

/// Block weights recomputed from the stream.
pub fn block_weights_graph<S: GraphStream + ?Sized>(
    stream: &mut S,
    assignment: &[BlockId],
    k: u32,
) -> Result<Vec<Weight>> {
    stream.rewind()?;
    let mut rec = NodeRecord::default();
    let mut w = vec![0; k as usize];
    while stream.next_node(&mut rec)? {
        let b = block(assignment, rec.id)?;
        if b >= k {
            return Err(Error::Invariant(format!("block {b} not below k = {k}")));
        }
        w[b as usize] += rec.weight;
    }
    Ok(w)
}

pub fn block_weights_hypergraph<S: HypergraphStream + ?Sized>(
    stream: &mut S,
    assignment: &[BlockId],
    k: u32,
) -> Result<Vec<Weight>> {
    stream.rewind()?;
    let mut rec = HyperNodeRecord::default();
    let mut w = vec![0; k as usize];
    while stream.next_node(&mut rec)? {
        let b = block(assignment, rec.id)?;
        if b >= k {
            return Err(Error::Invariant(format!("block {b} not below k = {k}")));
        }
        w[b as usize] += rec.weight;
    }
    Ok(w)
}

/// Full report for a graph partition. Graph edges are 2-pin nets, so the
/// cut-net and connectivity values coincide with the edge cut.
pub fn graph_report<S: GraphStream + ?Sized>(
    stream: &mut S,
    assignment: &[BlockId],
    k: u32,
    epsilon: f64,
    hierarchy: Option<&HierarchySpec>,
) -> Result<QualityReport> {
    let weights = block_weights_graph(stream, assignment, k)?;
    let cut = edge_cut(stream, assignment)?;
    let comm = hierarchy
        .map(|h| comm_cost(stream, assignment, k, h))
        .transpose()?;
    let total: Weight = weights.iter().sum();
    Ok(QualityReport {
        edge_cut: Some(cut),
        cut_net: Some(cut),
        connectivity: Some(cut),
        imbalance: imbalance(&weights),
        comm_cost: comm,
        max_block_weight: weights.iter().copied().max().unwrap_or(0),
        l_max: crate::compute_lmax(total.max(1), k, epsilon),
    })
}

pub fn hypergraph_report<S: HypergraphStream + ?Sized>(
    stream: &mut S,
    assignment: &[BlockId],
    k: u32,
    epsilon: f64,
) -> Result<QualityReport> {
    let weights = block_weights_hypergraph(stream, assignment, k)?;
    let (cut_net, connectivity) = cut_net_and_connectivity(stream, assignment)?;
    let total: Weight = weights.iter().sum();
    Ok(QualityReport {
        edge_cut: None,
        cut_net: Some(cut_net),
        connectivity: Some(connectivity),
        imbalance: imbalance(&weights),
        comm_cost: None,
        max_block_weight: weights.iter().copied().max().unwrap_or(0),
        l_max: crate::compute_lmax(total.max(1), k, epsilon),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CsrGraph, Hypergraph};

    fn triangle() -> CsrGraph {
        CsrGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)])
    }

    #[test]
    fn triangle_cuts() {
        let g = triangle();
        assert_eq!(edge_cut(&mut g.stream(), &[0, 0, 0]).unwrap(), 0);
        assert_eq!(edge_cut(&mut g.stream(), &[0, 0, 1]).unwrap(), 2);
    }

    #[test]
    fn unassigned_node_is_an_error() {
        let g = triangle();
        let err = edge_cut(&mut g.stream(), &[0, UNASSIGNED, 0]).unwrap_err();
        assert!(matches!(err, Error::Unassigned(1)));
    }

    #[test]
    fn single_net_lambda() {
        let hg = Hypergraph::from_nets(3, &[vec![0, 1, 2]], None, None).unwrap();
        assert_eq!(cut_net_and_connectivity(&mut hg.stream(), &[0, 0, 0]).unwrap(), (0, 0));
        assert_eq!(cut_net_and_connectivity(&mut hg.stream(), &[0, 1, 2]).unwrap(), (1, 2));
        assert_eq!(cut_net_and_connectivity(&mut hg.stream(), &[0, 1, 1]).unwrap(), (1, 1));
    }

    #[test]
    fn comm_cost_examples() {
        let h = HierarchySpec::parse("4:16:1", "1:10:100").unwrap();
        let g = CsrGraph::from_edges(2, &[(0, 1)]);
        assert_eq!(comm_cost(&mut g.stream(), &[0, 0], 64, &h).unwrap(), 0);
        assert_eq!(comm_cost(&mut g.stream(), &[0, 1], 64, &h).unwrap(), 1);
        assert_eq!(comm_cost(&mut g.stream(), &[0, 4], 64, &h).unwrap(), 10);
        assert!(matches!(
            comm_cost(&mut g.stream(), &[0, 4], 32, &h),
            Err(Error::HierarchyMismatch { .. })
        ));
    }

    #[test]
    fn graph_report_fields() {
        let g = triangle();
        let r = graph_report(&mut g.stream(), &[0, 0, 1], 2, 0.03, None).unwrap();
        assert_eq!(r.edge_cut, Some(2));
        assert_eq!(r.max_block_weight, 2);
        assert!((r.imbalance - (2.0 * 2.0 / 3.0 - 1.0)).abs() < 1e-12);
        assert_eq!(r.comm_cost, None);
    }
}
