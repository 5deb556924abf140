//! Seeded random instance generators, shared by the `verify` subcommand and
//! the integration test suites.
//!
//! All generators draw from a caller-supplied deterministic generator, so a
//! seed pins the whole instance stream.  Some draws degenerate (no interior
//! pair to connect, no path around the forbidden set); those return `None`
//! and the caller moves on to the next draw.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::{Capacities, Graph};
use crate::forms::{OneForm, VertexFunction};
use crate::lattice::LatticeDomain;
use crate::removal::ChargedGraph;

/// A deterministic generator for the given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected graph on `n` vertices: a random spanning tree plus a few
/// chords, at most `max_edges` edges in total.
pub fn random_connected_graph(r: &mut ChaCha8Rng, n: u32, max_edges: usize) -> Graph {
    let mut g = Graph::new();
    if n == 1 {
        g.add_vertex(0);
        return g;
    }
    for v in 1..n {
        g.add_edge(v, r.gen_range(0..v));
    }
    let extra = r.gen_range(0..=n as usize);
    for _ in 0..extra {
        if g.edge_count() >= max_edges {
            break;
        }
        let a = r.gen_range(0..n);
        let b = r.gen_range(0..n);
        if a != b && !g.contains_edge(a, b) {
            g.add_edge(a, b);
        }
    }
    g
}

/// Random flow problem small enough for the exhaustive cut oracle:
/// a connected graph, positive capacities, and disjoint terminal sets.
pub fn random_flow_network(
    r: &mut ChaCha8Rng,
) -> (Graph, Capacities, BTreeSet<u32>, BTreeSet<u32>) {
    let n = r.gen_range(4..=8);
    let g = random_connected_graph(r, n, 14);
    let mut cap = Capacities::new();
    for (a, b) in g.edges() {
        cap.set(a, b, r.gen_range(0.05..1.0));
    }
    let mut v1 = BTreeSet::new();
    let mut v2 = BTreeSet::new();
    v1.insert(r.gen_range(0..n));
    loop {
        let v = r.gen_range(0..n);
        if !v1.contains(&v) {
            v2.insert(v);
            break;
        }
    }
    if r.gen_bool(0.3) {
        let v = r.gen_range(0..n);
        if !v1.contains(&v) && !v2.contains(&v) {
            v2.insert(v);
        }
    }
    (g, cap, v1, v2)
}

/// Shortest path from `from` to `to` whose intermediate vertices avoid
/// `forbidden` (the endpoints themselves may be listed).
fn path_avoiding(g: &Graph, from: u32, to: u32, forbidden: &BTreeSet<u32>) -> Option<Vec<u32>> {
    let mut prev = std::collections::BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut w = to;
            while w != from {
                w = prev[&w];
                path.push(w);
            }
            path.reverse();
            return Some(path);
        }
        for w in g.neighbors(v) {
            if prev.contains_key(&w) || (w != to && forbidden.contains(&w)) {
                continue;
            }
            prev.insert(w, v);
            queue.push_back(w);
        }
    }
    None
}

/// Random charged graph with the stated total flux (`0`, `1`, or `-1`),
/// built by superposing unit path flows:
///
/// * one or two unit dipole paths between interior vertices, routed through
///   the interior only, so every interior divergence is a small integer and
///   at least one charge exists;
/// * for flux 0, up to two weighted boundary-to-boundary pass-through
///   flows whose weights keep the boundary variation within `1`;
/// * for flux ±1, a single unit path from one boundary vertex into the
///   interior, making the boundary variation exactly `1`.
///
/// Returns `None` when the draw degenerates; try the next seed.
pub fn charged_instance(r: &mut ChaCha8Rng, flux: i64) -> Option<ChargedGraph> {
    let n = r.gen_range(6..=12);
    let g = random_connected_graph(r, n, 24);
    let mut boundary = BTreeSet::new();
    let bsize = r.gen_range(2..=3);
    while boundary.len() < bsize {
        boundary.insert(r.gen_range(0..n));
    }
    let interior: Vec<u32> = (0..n).filter(|v| !boundary.contains(v)).collect();
    if interior.len() < 2 {
        return None;
    }

    let mut alpha = OneForm::new();
    let mut placed = 0;
    for _ in 0..r.gen_range(1..=2_u32) {
        let x = interior[r.gen_range(0..interior.len())];
        let y = interior[r.gen_range(0..interior.len())];
        if x == y {
            continue;
        }
        if let Some(path) = path_avoiding(&g, x, y, &boundary) {
            for w in path.windows(2) {
                alpha.add(w[0], w[1], 1.0);
            }
            placed += 1;
        }
    }
    if placed == 0 {
        return None;
    }

    match flux {
        0 => {
            let k = r.gen_range(0..=2_u32);
            if k > 0 {
                let budget = r.gen_range(0.3..0.98);
                let share = budget / (2.0 * k as f64);
                let bvec: Vec<u32> = boundary.iter().copied().collect();
                for _ in 0..k {
                    let b1 = bvec[r.gen_range(0..bvec.len())];
                    let b2 = bvec[r.gen_range(0..bvec.len())];
                    if b1 == b2 {
                        continue;
                    }
                    let others: BTreeSet<u32> = boundary
                        .iter()
                        .copied()
                        .filter(|&v| v != b1 && v != b2)
                        .collect();
                    if let Some(path) = path_avoiding(&g, b1, b2, &others) {
                        let c = if r.gen_bool(0.5) { share } else { -share };
                        for w in path.windows(2) {
                            alpha.add(w[0], w[1], c);
                        }
                    }
                }
            }
        }
        1 | -1 => {
            let bvec: Vec<u32> = boundary.iter().copied().collect();
            let b = bvec[r.gen_range(0..bvec.len())];
            let others: BTreeSet<u32> =
                boundary.iter().copied().filter(|&v| v != b).collect();
            let x = interior[r.gen_range(0..interior.len())];
            let path = path_avoiding(&g, b, x, &others)?;
            for w in path.windows(2) {
                alpha.add(w[0], w[1], flux as f64);
            }
        }
        _ => return None,
    }

    let cg = ChargedGraph::new(g, boundary, alpha).ok()?;
    let charged = cg
        .interior_vertices()
        .any(|v| cg.divergence(v).round().abs() >= 1.0);
    charged.then_some(cg)
}

/// Random connected polyomino of unit cells grown by a random walk, turned
/// into a lattice domain.  Draws that enclose a pocket are rejected.
pub fn random_polyomino(r: &mut ChaCha8Rng, cells: usize) -> Option<LatticeDomain> {
    let mut set = BTreeSet::from([(0i64, 0i64)]);
    let mut frontier = vec![(0i64, 0i64)];
    for _ in 0..cells * 200 {
        if set.len() >= cells || frontier.is_empty() {
            break;
        }
        let k = r.gen_range(0..frontier.len());
        let (x, y) = frontier[k];
        let dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        let (dx, dy) = dirs[r.gen_range(0..4)];
        let c = (x + dx, y + dy);
        if set.insert(c) {
            frontier.push(c);
        } else if r.gen_bool(0.25) {
            frontier.swap_remove(k);
        }
    }
    LatticeDomain::from_cells(1.0, set).ok()
}

/// Vertex field whose boundary datum stays in the zero-winding class: the
/// boundary walk is a closed chain of small increments with total variation
/// at most `budget`, and interior vertices are filled with independent
/// uniform values (seeding plenty of interior charges).
pub fn dipole_class_field(
    r: &mut ChaCha8Rng,
    dom: &LatticeDomain,
    budget: f64,
) -> VertexFunction {
    let cycle = dom.boundary_cycle();
    let n = cycle.len();
    let mut steps: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    let mean = steps.iter().sum::<f64>() / n as f64;
    for s in steps.iter_mut() {
        *s -= mean;
    }
    let total: f64 = steps.iter().map(|s| s.abs()).sum();
    let largest = steps.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let scale = if total > 0.0 {
        // Keep the variation in budget and every single increment well away
        // from the wrap point at 1/2.
        (r.gen_range(0.2..1.0) * budget / total).min(0.45 / largest)
    } else {
        0.0
    };
    let mut u = VertexFunction::new();
    let mut acc = r.gen_range(0.0..1.0);
    for (k, &(a, _)) in cycle.iter().enumerate() {
        u.set(a, acc);
        if k + 1 < n {
            acc += steps[k] * scale;
        }
    }
    for v in dom.interior_vertices() {
        u.set(v, r.gen_range(0.0..1.0));
    }
    u
}

/// Uniform random values on every vertex.
pub fn random_field(r: &mut ChaCha8Rng, dom: &LatticeDomain) -> VertexFunction {
    let mut u = VertexFunction::new();
    for v in dom.complex().vertex_ids() {
        u.set(v, r.gen_range(0.0..1.0));
    }
    u
}
