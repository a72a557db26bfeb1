//! Stream abstractions and in-memory graph containers.
//!
//! Every algorithm consumes input through [`GraphStream`] or
//! [`HypergraphStream`]: one record per node, in ascending id order. File
//! readers live in [`crate::io`]; [`CsrGraph`] and [`Hypergraph`] stream
//! themselves and are used by the generators, the FFI layer and tests.

use crate::{Error, NetId, NodeId, Result, Weight};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphHeader {
    pub n: usize,
    /// Number of undirected edges.
    pub m: usize,
    pub has_node_weights: bool,
    pub has_edge_weights: bool,
}

/// One streamed node with its weighted neighborhood.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub weight: Weight,
    pub neighbors: Vec<(NodeId, Weight)>,
}

pub trait GraphStream {
    fn header(&self) -> &GraphHeader;

    /// Reads the next node into `rec`. Returns `Ok(false)` once every node
    /// has been produced; end-of-stream validation errors are reported by
    /// that final call.
    fn next_node(&mut self, rec: &mut NodeRecord) -> Result<bool>;

    /// Restarts the stream at node 0.
    fn rewind(&mut self) -> Result<()>;

    /// Total node weight c(V). Streams with node weights are scanned once
    /// and rewound.
    fn total_node_weight(&mut self) -> Result<Weight> {
        if !self.header().has_node_weights {
            return Ok(self.header().n as Weight);
        }
        self.rewind()?;
        let mut rec = NodeRecord::default();
        let mut total = 0;
        while self.next_node(&mut rec)? {
            total += rec.weight;
        }
        self.rewind()?;
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergraphHeader {
    /// Number of nodes.
    pub n: usize,
    /// Number of nets.
    pub m: usize,
    /// Total pin count, Σ|e|.
    pub pins: usize,
    pub has_node_weights: bool,
    pub has_net_weights: bool,
}

/// One streamed hypergraph node with its incident nets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HyperNodeRecord {
    pub id: NodeId,
    pub weight: Weight,
    pub nets: Vec<(NetId, Weight)>,
}

pub trait HypergraphStream {
    fn header(&self) -> &HypergraphHeader;
    fn next_node(&mut self, rec: &mut HyperNodeRecord) -> Result<bool>;
    fn rewind(&mut self) -> Result<()>;

    fn total_node_weight(&mut self) -> Result<Weight> {
        if !self.header().has_node_weights {
            return Ok(self.header().n as Weight);
        }
        self.rewind()?;
        let mut rec = HyperNodeRecord::default();
        let mut total = 0;
        while self.next_node(&mut rec)? {
            total += rec.weight;
        }
        self.rewind()?;
        Ok(total)
    }
}

/// Undirected graph in compressed sparse row form. Each edge is stored in
/// both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    xadj: Vec<usize>,
    adjncy: Vec<NodeId>,
    adjwgt: Option<Vec<Weight>>,
    vwgt: Option<Vec<Weight>>,
}

impl CsrGraph {
    /// Builds a graph from raw CSR arrays, validating symmetry-independent
    /// structure (offsets, ranges, self loops, positive edge weights).
    pub fn from_csr(
        xadj: Vec<usize>,
        adjncy: Vec<NodeId>,
        vwgt: Option<Vec<Weight>>,
        adjwgt: Option<Vec<Weight>>,
    ) -> Result<Self> {
        if xadj.is_empty() || xadj[0] != 0 {
            return Err(Error::config("xadj must start with 0"));
        }
        let n = xadj.len() - 1;
        if *xadj.last().unwrap() != adjncy.len() {
            return Err(Error::config("xadj[n] must equal adjncy length"));
        }
        if xadj.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::config("xadj must be non-decreasing"));
        }
        if adjncy.len() % 2 != 0 {
            return Err(Error::config("adjacency must list every edge twice"));
        }
        for v in 0..n {
            for &u in &adjncy[xadj[v]..xadj[v + 1]] {
                if u as usize >= n {
                    return Err(Error::NeighborOutOfRange {
                        line: v + 2,
                        neighbor: u as u64 + 1,
                        n,
                    });
                }
                if u as usize == v {
                    return Err(Error::config(format!("self loop at node {v}")));
                }
            }
        }
        if let Some(w) = &vwgt {
            if w.len() != n {
                return Err(Error::config("vwgt length must equal n"));
            }
        }
        if let Some(w) = &adjwgt {
            if w.len() != adjncy.len() {
                return Err(Error::config("adjwgt length must equal adjncy length"));
            }
            if w.contains(&0) {
                return Err(Error::config("edge weights must be positive"));
            }
        }
        Ok(Self {
            xadj,
            adjncy,
            adjwgt,
            vwgt,
        })
    }

    /// Builds a unit-weight graph from an undirected edge list. Duplicate
    /// edges and self loops are dropped.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        let mut g = Self::from_weighted_edges(n, &weighted, None);
        g.adjwgt = None;
        g
    }

    /// Builds a graph from an undirected weighted edge list; parallel edges
    /// are merged by summing their weights, self loops are dropped.
    pub fn from_weighted_edges(
        n: usize,
        edges: &[(NodeId, NodeId, Weight)],
        node_weights: Option<Vec<Weight>>,
    ) -> Self {
        let mut directed: Vec<(NodeId, NodeId, Weight)> = Vec::with_capacity(edges.len() * 2);
        for &(u, v, w) in edges {
            if u == v {
                continue;
            }
            assert!((u as usize) < n && (v as usize) < n, "edge endpoint out of range");
            directed.push((u, v, w));
            directed.push((v, u, w));
        }
        directed.sort_unstable_by_key(|&(u, v, _)| (u, v));
        let mut merged: Vec<(NodeId, NodeId, Weight)> = Vec::with_capacity(directed.len());
        for (u, v, w) in directed {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }
        let mut xadj = vec![0usize; n + 1];
        for &(u, _, _) in &merged {
            xadj[u as usize + 1] += 1;
        }
        for i in 0..n {
            xadj[i + 1] += xadj[i];
        }
        let adjncy = merged.iter().map(|e| e.1).collect();
        let adjwgt = merged.iter().map(|e| e.2).collect();
        Self {
            xadj,
            adjncy,
            adjwgt: Some(adjwgt),
            vwgt: node_weights,
        }
    }

    pub fn n(&self) -> usize {
        self.xadj.len() - 1
    }

    pub fn m(&self) -> usize {
        self.adjncy.len() / 2
    }

    pub fn has_node_weights(&self) -> bool {
        self.vwgt.is_some()
    }

    pub fn has_edge_weights(&self) -> bool {
        self.adjwgt.as_ref().is_some_and(|w| w.iter().any(|&x| x != 1))
    }

    pub fn node_weight(&self, v: NodeId) -> Weight {
        self.vwgt.as_ref().map_or(1, |w| w[v as usize])
    }

    pub fn total_node_weight(&self) -> Weight {
        self.vwgt
            .as_ref()
            .map_or(self.n() as Weight, |w| w.iter().sum())
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.xadj[v as usize + 1] - self.xadj[v as usize]
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = (NodeId, Weight)> + '_ {
        let range = self.xadj[v as usize]..self.xadj[v as usize + 1];
        let weights = self.adjwgt.as_deref();
        range.map(move |i| (self.adjncy[i], weights.map_or(1, |w| w[i])))
    }

    /// Undirected edges with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, Weight)> + '_ {
        (0..self.n() as NodeId).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    pub fn header(&self) -> GraphHeader {
        GraphHeader {
            n: self.n(),
            m: self.m(),
            has_node_weights: self.has_node_weights(),
            has_edge_weights: self.has_edge_weights(),
        }
    }

    pub fn stream(&self) -> CsrStream<'_> {
        CsrStream {
            graph: self,
            header: self.header(),
            next: 0,
        }
    }

    /// Copies node `v` into a stream record.
    pub fn fill_record(&self, v: NodeId, rec: &mut NodeRecord) {
        rec.id = v;
        rec.weight = self.node_weight(v);
        rec.neighbors.clear();
        rec.neighbors.extend(self.neighbors(v));
    }

    /// Relabels nodes so that node `order[i]` becomes node `i`.
    pub fn permuted(&self, order: &[NodeId]) -> Self {
        let n = self.n();
        assert_eq!(order.len(), n);
        let mut new_id = vec![0 as NodeId; n];
        for (i, &v) in order.iter().enumerate() {
            new_id[v as usize] = i as NodeId;
        }
        let edges: Vec<_> = self
            .edges()
            .map(|(u, v, w)| (new_id[u as usize], new_id[v as usize], w))
            .collect();
        let vwgt = self
            .vwgt
            .as_ref()
            .map(|w| order.iter().map(|&v| w[v as usize]).collect());
        let mut g = Self::from_weighted_edges(n, &edges, vwgt);
        if self.adjwgt.is_none() {
            g.adjwgt = None;
        }
        g
    }
}

/// Streams a [`CsrGraph`] node by node.
pub struct CsrStream<'a> {
    graph: &'a CsrGraph,
    header: GraphHeader,
    next: usize,
}

impl GraphStream for CsrStream<'_> {
    fn header(&self) -> &GraphHeader {
        &self.header
    }

    fn next_node(&mut self, rec: &mut NodeRecord) -> Result<bool> {
        if self.next >= self.graph.n() {
            return Ok(false);
        }
        self.graph.fill_record(self.next as NodeId, rec);
        self.next += 1;
        Ok(true)
    }

    fn rewind(&mut self) -> Result<()> {
        self.next = 0;
        Ok(())
    }

    fn total_node_weight(&mut self) -> Result<Weight> {
        Ok(self.graph.total_node_weight())
    }
}

/// Hypergraph stored both node-major (for streaming) and net-major (for
/// metrics and expansion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    node_ptr: Vec<usize>,
    node_nets: Vec<NetId>,
    net_ptr: Vec<usize>,
    net_pins: Vec<NodeId>,
    net_weights: Option<Vec<Weight>>,
    node_weights: Option<Vec<Weight>>,
}

impl Hypergraph {
    /// Builds a hypergraph from net pin lists. Repeated pins inside one net
    /// are collapsed.
    pub fn from_nets(
        n: usize,
        nets: &[Vec<NodeId>],
        net_weights: Option<Vec<Weight>>,
        node_weights: Option<Vec<Weight>>,
    ) -> Result<Self> {
        if let Some(w) = &net_weights {
            if w.len() != nets.len() {
                return Err(Error::config("net weight count must equal net count"));
            }
        }
        if let Some(w) = &node_weights {
            if w.len() != n {
                return Err(Error::config("node weight count must equal node count"));
            }
        }
        let mut net_ptr = Vec::with_capacity(nets.len() + 1);
        let mut net_pins = Vec::new();
        net_ptr.push(0);
        for net in nets {
            let mut pins = net.clone();
            pins.sort_unstable();
            pins.dedup();
            if let Some(&p) = pins.last() {
                if p as usize >= n {
                    return Err(Error::config(format!("pin {p} out of range (n = {n})")));
                }
            }
            net_pins.extend_from_slice(&pins);
            net_ptr.push(net_pins.len());
        }
        let mut node_ptr = vec![0usize; n + 1];
        for &p in &net_pins {
            node_ptr[p as usize + 1] += 1;
        }
        for i in 0..n {
            node_ptr[i + 1] += node_ptr[i];
        }
        let mut fill = node_ptr.clone();
        let mut node_nets = vec![0 as NetId; net_pins.len()];
        for e in 0..nets.len() {
            for &p in &net_pins[net_ptr[e]..net_ptr[e + 1]] {
                node_nets[fill[p as usize]] = e as NetId;
                fill[p as usize] += 1;
            }
        }
        Ok(Self {
            node_ptr,
            node_nets,
            net_ptr,
            net_pins,
            net_weights,
            node_weights,
        })
    }

    pub fn n(&self) -> usize {
        self.node_ptr.len() - 1
    }

    pub fn m(&self) -> usize {
        self.net_ptr.len() - 1
    }

    pub fn pins(&self) -> usize {
        self.net_pins.len()
    }

    pub fn node_weight(&self, v: NodeId) -> Weight {
        self.node_weights.as_ref().map_or(1, |w| w[v as usize])
    }

    pub fn net_weight(&self, e: NetId) -> Weight {
        self.net_weights.as_ref().map_or(1, |w| w[e as usize])
    }

    pub fn node_weights(&self) -> Option<&[Weight]> {
        self.node_weights.as_deref()
    }

    pub fn net_weights(&self) -> Option<&[Weight]> {
        self.net_weights.as_deref()
    }

    pub fn total_node_weight(&self) -> Weight {
        self.node_weights
            .as_ref()
            .map_or(self.n() as Weight, |w| w.iter().sum())
    }

    pub fn incident_nets(&self, v: NodeId) -> &[NetId] {
        &self.node_nets[self.node_ptr[v as usize]..self.node_ptr[v as usize + 1]]
    }

    pub fn pins_of(&self, e: NetId) -> &[NodeId] {
        &self.net_pins[self.net_ptr[e as usize]..self.net_ptr[e as usize + 1]]
    }

    pub fn header(&self) -> HypergraphHeader {
        HypergraphHeader {
            n: self.n(),
            m: self.m(),
            pins: self.pins(),
            has_node_weights: self.node_weights.is_some(),
            has_net_weights: self.net_weights.is_some(),
        }
    }

    pub fn stream(&self) -> HypergraphMemStream<'_> {
        HypergraphMemStream {
            hg: self,
            header: self.header(),
            next: 0,
        }
    }

    /// Graph in which every net becomes a clique; parallel edges are merged
    /// by summing net weights.
    pub fn clique_expansion(&self) -> CsrGraph {
        let mut edges = Vec::new();
        for e in 0..self.m() as NetId {
            let pins = self.pins_of(e);
            let w = self.net_weight(e);
            for (i, &u) in pins.iter().enumerate() {
                for &v in &pins[i + 1..] {
                    edges.push((u, v, w));
                }
            }
        }
        CsrGraph::from_weighted_edges(self.n(), &edges, self.node_weights.clone())
    }

    /// Encodes a graph as a hypergraph with one size-2 net per edge.
    pub fn from_graph(g: &CsrGraph) -> Self {
        let mut nets = Vec::with_capacity(g.m());
        let mut weights = Vec::with_capacity(g.m());
        for (u, v, w) in g.edges() {
            nets.push(vec![u, v]);
            weights.push(w);
        }
        let node_weights = g
            .has_node_weights()
            .then(|| (0..g.n() as NodeId).map(|v| g.node_weight(v)).collect());
        let net_weights = g.has_edge_weights().then_some(weights);
        Self::from_nets(g.n(), &nets, net_weights, node_weights)
            .expect("graph edges are valid nets")
    }
}

pub struct HypergraphMemStream<'a> {
    hg: &'a Hypergraph,
    header: HypergraphHeader,
    next: usize,
}

impl HypergraphStream for HypergraphMemStream<'_> {
    fn header(&self) -> &HypergraphHeader {
        &self.header
    }

    fn next_node(&mut self, rec: &mut HyperNodeRecord) -> Result<bool> {
        if self.next >= self.hg.n() {
            return Ok(false);
        }
        let v = self.next as NodeId;
        rec.id = v;
        rec.weight = self.hg.node_weight(v);
        rec.nets.clear();
        rec.nets.extend(
            self.hg
                .incident_nets(v)
                .iter()
                .map(|&e| (e, self.hg.net_weight(e))),
        );
        self.next += 1;
        Ok(true)
    }

    fn rewind(&mut self) -> Result<()> {
        self.next = 0;
        Ok(())
    }

    fn total_node_weight(&mut self) -> Result<Weight> {
        Ok(self.hg.total_node_weight())
    }
}
