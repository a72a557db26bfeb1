use super::HierarchySpec;
use crate::BlockId;

pub const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: u32,
    /// Children are stored contiguously starting here.
    pub first_child: u32,
    pub num_children: u32,
    /// Covered leaf (block) range, inclusive, 0-based.
    pub leaf_lo: BlockId,
    pub leaf_hi: BlockId,
    pub depth: u32,
}

impl TreeNode {
    /// Number of final blocks `t` under this node.
    #[inline]
    pub fn leaves(&self) -> u32 {
        self.leaf_hi - self.leaf_lo + 1
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.num_children == 0
    }

    #[inline]
    pub fn covers(&self, leaf: BlockId) -> bool {
        self.leaf_lo <= leaf && leaf <= self.leaf_hi
    }
}

/// Hierarchy of nested partitioning subproblems. The root covers all `k`
/// blocks; every internal node splits its leaf range into contiguous,
/// near-equal parts (larger parts first), and the leaves are the blocks.
#[derive(Debug, Clone)]
pub struct MultisectionTree {
    nodes: Vec<TreeNode>,
    k: u32,
    height: u32,
    /// Tree node id of every leaf block.
    leaf_node: Vec<u32>,
}

impl MultisectionTree {
    /// Recursive `b`-section tree for an arbitrary number of blocks.
    pub fn build_hierarchy(k: u32, base: u32) -> Self {
        assert!(k >= 1, "k must be at least 1");
        assert!(base >= 2, "base must be at least 2");
        Self::build(k, |_, t| base.min(t))
    }

    /// Tree whose layers follow a machine hierarchy from the outermost layer
    /// (fan-out `a_ℓ`) down to the innermost (`a_1`).
    pub fn build_from_spec(spec: &HierarchySpec) -> Self {
        let fan: Vec<u32> = spec.fanouts().iter().rev().copied().collect();
        Self::build(spec.k(), |depth, _| fan.get(depth as usize).copied().unwrap_or(1))
    }

    fn build(k: u32, fanout: impl Fn(u32, u32) -> u32) -> Self {
        let mut nodes = vec![TreeNode {
            parent: NO_PARENT,
            first_child: 0,
            num_children: 0,
            leaf_lo: 0,
            leaf_hi: k - 1,
            depth: 0,
        }];
        let mut height = 0;
        let mut next = 0;
        // Breadth-first so that siblings are contiguous.
        while next < nodes.len() {
            let node = nodes[next];
            let t = node.leaves();
            let parts = if t > 1 { fanout(node.depth, t).min(t) } else { 1 };
            if parts > 1 {
                let first = nodes.len() as u32;
                let (q, r) = (t / parts, t % parts);
                let mut lo = node.leaf_lo;
                for j in 0..parts {
                    let size = q + u32::from(j < r);
                    nodes.push(TreeNode {
                        parent: next as u32,
                        first_child: 0,
                        num_children: 0,
                        leaf_lo: lo,
                        leaf_hi: lo + size - 1,
                        depth: node.depth + 1,
                    });
                    lo += size;
                }
                nodes[next].first_child = first;
                nodes[next].num_children = parts;
                height = height.max(node.depth + 1);
            }
            next += 1;
        }
        let mut leaf_node = vec![0; k as usize];
        for (i, node) in nodes.iter().enumerate() {
            if node.is_leaf() {
                debug_assert_eq!(node.leaves(), 1);
                leaf_node[node.leaf_lo as usize] = i as u32;
            }
        }
        Self {
            nodes,
            k,
            height,
            leaf_node,
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn root(&self) -> u32 {
        0
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn node(&self, id: u32) -> &TreeNode {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn children(&self, id: u32) -> std::ops::Range<u32> {
        let n = self.node(id);
        n.first_child..n.first_child + n.num_children
    }

    pub fn leaf_node(&self, block: BlockId) -> u32 {
        self.leaf_node[block as usize]
    }

    /// Index (0-based, among the node's children) of the child covering
    /// `leaf`. Constant time: the split sizes are arithmetic.
    #[inline]
    pub fn child_index(&self, id: u32, leaf: BlockId) -> u32 {
        let n = self.node(id);
        debug_assert!(n.covers(leaf) && !n.is_leaf());
        let off = leaf - n.leaf_lo;
        let t = n.leaves();
        let c = n.num_children;
        let (q, r) = (t / c, t % c);
        let big = r * (q + 1);
        if off < big {
            off / (q + 1)
        } else {
            r + (off - big) / q
        }
    }

    /// Penalty scale for Fennel on the subproblem block `id`: `α/√t`.
    pub fn heterogeneous_alpha(&self, id: u32, alpha: f64) -> f64 {
        alpha / (self.node(id).leaves() as f64).sqrt()
    }

    /// Capacity `t·L_max` of the subproblem block `id`.
    pub fn capacity(&self, id: u32, l_max: u64) -> u64 {
        self.node(id).leaves() as u64 * l_max
    }

    /// Nodes on the path from the root (exclusive) down to the leaf block.
    pub fn path_to_leaf(&self, block: BlockId) -> Vec<u32> {
        let mut path = Vec::new();
        let mut cur = self.leaf_node(block);
        while cur != 0 {
            path.push(cur);
            cur = self.node(cur).parent;
        }
        path.reverse();
        path
    }
}
