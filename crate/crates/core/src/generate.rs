//! Seeded synthetic instances: random geometric graphs, grids, random
//! graphs and hypergraphs, and row-net hypergraphs of stencil matrices.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{CsrGraph, Hypergraph};
use crate::{NodeId, Result, Weight};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random geometric graph in the unit `D`-cube: `n` uniform points joined
/// when closer than the radius giving the requested average degree. Node
/// ids follow a cell-major order, so nearby points get nearby ids.
pub fn rgg<const D: usize>(n: usize, avg_degree: f64, seed: u64) -> CsrGraph {
    let mut r = rng(seed);
    let ball = match D {
        2 => std::f64::consts::PI,
        3 => 4.0 / 3.0 * std::f64::consts::PI,
        _ => panic!("only 2 and 3 dimensions are supported"),
    };
    let radius = (avg_degree / (ball * n as f64)).powf(1.0 / D as f64);
    let cells_per_dim = ((1.0 / radius).floor() as usize).max(1);
    let cell_of = |p: &[f64; D]| -> usize {
        let mut c = 0;
        for &x in p.iter() {
            c = c * cells_per_dim + ((x * cells_per_dim as f64) as usize).min(cells_per_dim - 1);
        }
        c
    };
    let mut pts: Vec<[f64; D]> = (0..n)
        .map(|_| {
            let mut p = [0.0; D];
            for x in p.iter_mut() {
                *x = r.gen::<f64>();
            }
            p
        })
        .collect();
    pts.sort_by_key(|p| cell_of(p));
    let cells = cells_per_dim.pow(D as u32);
    let mut start = vec![0usize; cells + 1];
    for p in &pts {
        start[cell_of(p) + 1] += 1;
    }
    for i in 0..cells {
        start[i + 1] += start[i];
    }
    let r2 = radius * radius;
    let mut edges = Vec::new();
    let offsets: Vec<[isize; D]> = {
        let mut out = vec![[0isize; D]];
        for d in 0..D {
            let mut next = Vec::new();
            for o in &out {
                for delta in -1..=1 {
                    let mut q = *o;
                    q[d] = delta;
                    next.push(q);
                }
            }
            out = next;
        }
        out
    };
    for (i, p) in pts.iter().enumerate() {
        let mut coord = [0isize; D];
        for d in 0..D {
            coord[d] = ((p[d] * cells_per_dim as f64) as isize).min(cells_per_dim as isize - 1);
        }
        for o in &offsets {
            let mut c = 0usize;
            let mut inside = true;
            for d in 0..D {
                let x = coord[d] + o[d];
                if x < 0 || x >= cells_per_dim as isize {
                    inside = false;
                    break;
                }
                c = c * cells_per_dim + x as usize;
            }
            if !inside {
                continue;
            }
            for j in start[c]..start[c + 1] {
                if j <= i {
                    continue;
                }
                let q = &pts[j];
                let d2: f64 = (0..D).map(|d| (p[d] - q[d]) * (p[d] - q[d])).sum();
                if d2 < r2 {
                    edges.push((i as NodeId, j as NodeId));
                }
            }
        }
    }
    CsrGraph::from_edges(n, &edges)
}

/// `w × h` grid with 4-neighborhoods, plus one diagonal per cell when
/// `triangulated`.
pub fn grid2d(w: u32, h: u32, triangulated: bool) -> CsrGraph {
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                edges.push((v, v + 1));
            }
            if y + 1 < h {
                edges.push((v, v + w));
                if triangulated && x + 1 < w {
                    edges.push((v, v + w + 1));
                }
            }
        }
    }
    CsrGraph::from_edges((w * h) as usize, &edges)
}

pub fn grid3d(a: u32, b: u32, c: u32) -> CsrGraph {
    let id = |x: u32, y: u32, z: u32| (z * b + y) * a + x;
    let mut edges = Vec::new();
    for z in 0..c {
        for y in 0..b {
            for x in 0..a {
                let v = id(x, y, z);
                if x + 1 < a {
                    edges.push((v, id(x + 1, y, z)));
                }
                if y + 1 < b {
                    edges.push((v, id(x, y + 1, z)));
                }
                if z + 1 < c {
                    edges.push((v, id(x, y, z + 1)));
                }
            }
        }
    }
    CsrGraph::from_edges((a * b * c) as usize, &edges)
}

/// Erdős–Rényi `G(n, p)`.
pub fn gnp(n: usize, p: f64, seed: u64) -> CsrGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(p) {
                edges.push((u as NodeId, v as NodeId));
            }
        }
    }
    CsrGraph::from_edges(n, &edges)
}

/// Random graph with `m` distinct edges drawn uniformly.
pub fn gnm(n: usize, m: usize, seed: u64) -> CsrGraph {
    let mut r = rng(seed);
    let max = n * (n - 1) / 2;
    let m = m.min(max);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = r.gen_range(0..n) as NodeId;
        let v = r.gen_range(0..n) as NodeId;
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if seen.insert(e) {
            edges.push(e);
        }
    }
    CsrGraph::from_edges(n, &edges)
}

/// Preferential attachment: each new node links to `d` earlier nodes chosen
/// proportionally to their degree.
pub fn barabasi_albert(n: usize, d: usize, seed: u64) -> CsrGraph {
    let mut r = rng(seed);
    let mut targets: Vec<NodeId> = Vec::new();
    let mut edges = Vec::new();
    for v in 1..n {
        let picks = d.min(v);
        let mut chosen = Vec::with_capacity(picks);
        while chosen.len() < picks {
            let u = if targets.is_empty() || r.gen_bool(0.1) {
                r.gen_range(0..v) as NodeId
            } else {
                targets[r.gen_range(0..targets.len())]
            };
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for u in chosen {
            edges.push((u, v as NodeId));
            targets.push(u);
            targets.push(v as NodeId);
        }
    }
    CsrGraph::from_edges(n, &edges)
}

/// Random edge weights in `1..=max_weight` and node weights in
/// `1..=max_node_weight` on top of a graph.
pub fn with_random_weights(g: &CsrGraph, max_weight: Weight, max_node_weight: Weight, seed: u64) -> CsrGraph {
    let mut r = rng(seed);
    let edges: Vec<_> = g
        .edges()
        .map(|(u, v, _)| (u, v, r.gen_range(1..=max_weight)))
        .collect();
    let nw = (0..g.n()).map(|_| r.gen_range(1..=max_node_weight)).collect();
    CsrGraph::from_weighted_edges(g.n(), &edges, Some(nw))
}

/// Random hypergraph with `m` nets of `2..=max_size` distinct pins.
pub fn random_hypergraph(n: usize, m: usize, max_size: usize, seed: u64) -> Result<Hypergraph> {
    let mut r = rng(seed);
    let ids: Vec<NodeId> = (0..n as NodeId).collect();
    let nets: Vec<Vec<NodeId>> = (0..m)
        .map(|_| {
            let size = r.gen_range(2..=max_size.max(2)).min(n);
            ids.choose_multiple(&mut r, size).copied().collect()
        })
        .collect();
    Hypergraph::from_nets(n, &nets, None, None)
}

/// Row-net hypergraph of a 2D stencil matrix on a `w × h` grid: node `j`
/// is column `j`, net `i` holds the columns of row `i`'s nonzeros. `wide`
/// selects the 9-point instead of the 5-point stencil.
pub fn stencil2d_rownet(w: u32, h: u32, wide: bool) -> Result<Hypergraph> {
    let mut nets = Vec::with_capacity((w * h) as usize);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut row = Vec::new();
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if !wide && dx != 0 && dy != 0 {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                        row.push((ny * w as i64 + nx) as NodeId);
                    }
                }
            }
            nets.push(row);
        }
    }
    Hypergraph::from_nets((w * h) as usize, &nets, None, None)
}

/// Row-net hypergraph of the 7-point stencil on an `a × b × c` grid.
pub fn stencil3d_rownet(a: u32, b: u32, c: u32) -> Result<Hypergraph> {
    let id = |x: i64, y: i64, z: i64| ((z * b as i64 + y) * a as i64 + x) as NodeId;
    let mut nets = Vec::with_capacity((a * b * c) as usize);
    for z in 0..c as i64 {
        for y in 0..b as i64 {
            for x in 0..a as i64 {
                let mut row = vec![id(x, y, z)];
                for (dx, dy, dz) in [(-1, 0, 0), (1, 0, 0), (0, -1, 0), (0, 1, 0), (0, 0, -1), (0, 0, 1)] {
                    let (nx, ny, nz) = (x + dx, y + dy, z + dz);
                    if nx >= 0 && ny >= 0 && nz >= 0 && nx < a as i64 && ny < b as i64 && nz < c as i64 {
                        row.push(id(nx, ny, nz));
                    }
                }
                nets.push(row);
            }
        }
    }
    Hypergraph::from_nets((a * b * c) as usize, &nets, None, None)
}

/// Row-net hypergraph of a random sparse matrix with a banded diagonal
/// structure plus `extra` random nonzeros per row.
pub fn banded_rownet(n: usize, band: usize, extra: usize, seed: u64) -> Result<Hypergraph> {
    let mut r = rng(seed);
    let nets: Vec<Vec<NodeId>> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(band);
            let hi = (i + band).min(n - 1);
            let mut row: Vec<NodeId> = (lo..=hi).map(|j| j as NodeId).collect();
            for _ in 0..extra {
                row.push(r.gen_range(0..n) as NodeId);
            }
            row
        })
        .collect();
    Hypergraph::from_nets(n, &nets, None, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgg_is_seeded_and_sized() {
        let a = rgg::<2>(2000, 8.0, 1);
        let b = rgg::<2>(2000, 8.0, 1);
        assert_eq!(a, b);
        let avg = 2.0 * a.m() as f64 / a.n() as f64;
        assert!((5.0..11.0).contains(&avg), "average degree {avg}");
        let c = rgg::<3>(2000, 8.0, 1);
        assert!(c.m() > 0);
    }

    #[test]
    fn grid_edge_counts() {
        assert_eq!(grid2d(4, 3, false).m(), 3 * 3 + 4 * 2);
        assert_eq!(grid2d(4, 3, true).m(), 3 * 3 + 4 * 2 + 3 * 2);
        assert_eq!(grid3d(2, 2, 2).m(), 12);
    }

    #[test]
    fn stencil_pins() {
        let h = stencil2d_rownet(3, 3, false).unwrap();
        assert_eq!(h.m(), 9);
        assert_eq!(h.pins(), 9 + 2 * 12);
        let h9 = stencil2d_rownet(3, 3, true).unwrap();
        assert_eq!(h9.pins_of(4).len(), 9);
        let h3 = stencil3d_rownet(2, 2, 2).unwrap();
        assert_eq!(h3.pins(), 8 * 4);
    }

    #[test]
    fn random_generators_are_valid() {
        assert_eq!(gnm(50, 100, 3).m(), 100);
        let ba = barabasi_albert(200, 3, 4);
        assert!(ba.m() > 500);
        let h = random_hypergraph(30, 40, 5, 2).unwrap();
        assert_eq!(h.m(), 40);
        let w = with_random_weights(&ba, 5, 3, 1);
        assert!(w.has_node_weights());
        assert!(banded_rownet(100, 2, 1, 0).unwrap().pins() >= 100 * 3);
    }
}
