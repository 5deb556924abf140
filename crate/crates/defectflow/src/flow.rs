//! Max-flow / min-cut on bidirectional graphs with symmetric capacities.
//!
//! Edges are undirected pairs carrying a capacity `c(e) >= 0`; a flow is an
//! antisymmetric 1-form with `-c(e) <= flow(e) <= c(e)`. The solver is a
//! deterministic Edmonds-Karp: breadth-first shortest augmenting paths over
//! the residual graph, neighbors scanned in ascending vertex order.
//! Residual capacities below [`crate::tol::RESIDUAL_ZERO`] count as zero, so
//! augmentation terminates cleanly on real-valued capacities.

use crate::error::{Error, Result};
use crate::forms::OneForm;
use crate::tol::RESIDUAL_ZERO;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Undirected simple graph over u32 vertex ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    adj: BTreeMap<u32, BTreeSet<u32>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: u32) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, a: u32, b: u32) {
        assert_ne!(a, b, "loops are not allowed");
        self.adj.entry(a).or_default().insert(b);
        self.adj.entry(b).or_default().insert(a);
    }

    pub fn remove_edge(&mut self, a: u32, b: u32) {
        if let Some(s) = self.adj.get_mut(&a) {
            s.remove(&b);
        }
        if let Some(s) = self.adj.get_mut(&b) {
            s.remove(&a);
        }
    }

    /// Removes `v` together with all incident edges. No-op if absent.
    pub fn remove_vertex(&mut self, v: u32) {
        if let Some(nbrs) = self.adj.remove(&v) {
            for x in nbrs {
                if let Some(s) = self.adj.get_mut(&x) {
                    s.remove(&v);
                }
            }
        }
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn contains_edge(&self, a: u32, b: u32) -> bool {
        self.adj.get(&a).map(|s| s.contains(&b)).unwrap_or(false)
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.adj.keys().copied()
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj.get(&v).map(|s| s.len()).unwrap_or(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Undirected edges as canonical `(a, b)` pairs with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&v, s)| s.iter().copied().map(move |w| (v, w)))
            .filter(|&(v, w)| v < w)
    }

    pub fn max_vertex_id(&self) -> Option<u32> {
        self.adj.keys().next_back().copied()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    pub fn connected_components(&self) -> Vec<BTreeSet<u32>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for w in self.neighbors(v) {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Subgraph induced on `keep` (vertices kept even if isolated there).
    pub fn induced(&self, keep: &BTreeSet<u32>) -> Graph {
        let mut g = Graph::new();
        for &v in keep {
            if self.contains_vertex(v) {
                g.add_vertex(v);
            }
        }
        for (a, b) in self.edges() {
            if keep.contains(&a) && keep.contains(&b) {
                g.add_edge(a, b);
            }
        }
        g
    }
}

/// Symmetric nonnegative edge capacities; absent edges read as zero.
#[derive(Debug, Clone, Default)]
pub struct Capacities {
    vals: BTreeMap<(u32, u32), f64>,
}

impl Capacities {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: u32, b: u32, c: f64) {
        assert_ne!(a, b);
        let k = if a < b { (a, b) } else { (b, a) };
        self.vals.insert(k, c);
    }

    pub fn get(&self, a: u32, b: u32) -> f64 {
        let k = if a < b { (a, b) } else { (b, a) };
        self.vals.get(&k).copied().unwrap_or(0.0)
    }

    /// Edgewise absolute values of a 1-form.
    pub fn from_abs(form: &OneForm) -> Self {
        Self {
            vals: form.iter().map(|(k, v)| (k, v.abs())).collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.vals.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.vals.iter().map(|(&k, &v)| (k, v))
    }
}

/// Output of [`max_flow_min_cut`]. The cut is source-side minimal: its
/// source side is exactly the set of vertices reachable from the sources in
/// the final residual graph.
#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Max-flow value; equals the cut capacity up to rounding.
    pub value: f64,
    /// Antisymmetric net flow; positive from source side toward sink side.
    pub flow: OneForm,
    /// Min-cut edges oriented `(source side, sink side)`; zero-capacity
    /// crossings are omitted.
    pub cut: Vec<(u32, u32)>,
    /// Sum of capacities over `cut`.
    pub cut_capacity: f64,
    /// Vertices reachable from the sources in the residual graph.
    pub source_side: BTreeSet<u32>,
    /// Vertices reachable from the sinks without entering `source_side`.
    pub sink_side: BTreeSet<u32>,
    /// Cut endpoints on the source side.
    pub cut_sources: BTreeSet<u32>,
    /// Cut endpoints on the sink side.
    pub cut_sinks: BTreeSet<u32>,
}

struct Arena {
    /// dense id -> public id; last two entries are super source / sink
    ids: Vec<u32>,
    /// adjacency as (neighbor, edge index), sorted by neighbor
    adj: Vec<Vec<(usize, usize)>>,
    /// per edge: canonical (lo, hi) dense endpoints, capacity, net flow lo->hi
    ends: Vec<(usize, usize)>,
    cap: Vec<f64>,
    flow: Vec<f64>,
    real_edges: usize,
}

impl Arena {
    fn residual(&self, from: usize, e: usize) -> f64 {
        let (lo, _hi) = self.ends[e];
        let f = if from == lo { self.flow[e] } else { -self.flow[e] };
        self.cap[e] - f
    }

    fn push(&mut self, from: usize, e: usize, amount: f64) {
        let (lo, _hi) = self.ends[e];
        if from == lo {
            self.flow[e] += amount;
        } else {
            self.flow[e] -= amount;
        }
    }
}

/// Deterministic max-flow / min-cut between vertex sets `v1` and `v2`.
///
/// Requires a connected graph, disjoint nonempty terminal sets inside it,
/// and nonnegative capacities.
pub fn max_flow_min_cut(
    g: &Graph,
    cap: &Capacities,
    v1: &BTreeSet<u32>,
    v2: &BTreeSet<u32>,
) -> Result<FlowResult> {
    if v1.is_empty() || v2.is_empty() {
        return Err(Error::BadTerminals("empty terminal set".into()));
    }
    if let Some(&v) = v1.intersection(v2).next() {
        return Err(Error::BadTerminals(format!(
            "vertex {v} is in both terminal sets"
        )));
    }
    for &v in v1.iter().chain(v2.iter()) {
        if !g.contains_vertex(v) {
            return Err(Error::BadTerminals(format!(
                "terminal {v} is not a graph vertex"
            )));
        }
    }
    if !g.is_connected() {
        return Err(Error::Disconnected("flow input must be connected".into()));
    }
    for ((a, b), c) in cap.iter() {
        if c < 0.0 {
            return Err(Error::InvalidInput(format!(
                "negative capacity {c} on edge ({a}, {b})"
            )));
        }
    }

    let ids: Vec<u32> = g.vertices().collect();
    let dense: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = ids.len();
    let (src, snk) = (n, n + 1);

    let mut arena = Arena {
        ids,
        adj: vec![Vec::new(); n + 2],
        ends: Vec::new(),
        cap: Vec::new(),
        flow: Vec::new(),
        real_edges: 0,
    };
    for (a, b) in g.edges() {
        let (da, db) = (dense[&a], dense[&b]);
        let e = arena.ends.len();
        arena.ends.push((da.min(db), da.max(db)));
        arena.cap.push(cap.get(a, b));
        arena.flow.push(0.0);
        arena.adj[da].push((db, e));
        arena.adj[db].push((da, e));
    }
    arena.real_edges = arena.ends.len();
    let big = 1.0 + arena.cap.iter().sum::<f64>();
    let terminals: [(&BTreeSet<u32>, usize); 2] = [(v1, src), (v2, snk)];
    for (terms, tvert) in terminals {
        for &v in terms.iter() {
            let d = dense[&v];
            let e = arena.ends.len();
            arena.ends.push((d.min(tvert), d.max(tvert)));
            arena.cap.push(big);
            arena.flow.push(0.0);
            arena.adj[d].push((tvert, e));
            arena.adj[tvert].push((d, e));
        }
    }
    for l in arena.adj.iter_mut() {
        l.sort_unstable();
    }

    let mut value = 0.0;
    let guard = 10 * (n + 2) * (arena.ends.len() + 1) + 16;
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > guard {
            return Err(Error::Internal(
                "augmentation did not terminate within the phase bound".into(),
            ));
        }
        // BFS for a shortest augmenting path src -> snk
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n + 2];
        let mut seen = vec![false; n + 2];
        seen[src] = true;
        let mut queue = VecDeque::from([src]);
        'bfs: while let Some(v) = queue.pop_front() {
            for &(w, e) in &arena.adj[v] {
                if !seen[w] && arena.residual(v, e) > RESIDUAL_ZERO {
                    seen[w] = true;
                    parent[w] = Some((v, e));
                    if w == snk {
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if !seen[snk] {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = snk;
        while let Some((p, e)) = parent[v] {
            bottleneck = bottleneck.min(arena.residual(p, e));
            v = p;
        }
        let mut v = snk;
        while let Some((p, e)) = parent[v] {
            arena.push(p, e, bottleneck);
            v = p;
        }
        value += bottleneck;
    }

    // Source side = residual reachability from the super source.
    let mut reach = vec![false; n + 2];
    reach[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &arena.adj[v] {
            if !reach[w] && arena.residual(v, e) > RESIDUAL_ZERO {
                reach[w] = true;
                queue.push_back(w);
            }
        }
    }
    if reach[snk] {
        return Err(Error::Internal("sink residual-reachable after max flow".into()));
    }
    let source_side: BTreeSet<u32> = (0..n).filter(|&i| reach[i]).map(|i| arena.ids[i]).collect();
    for &v in v2 {
        if source_side.contains(&v) {
            return Err(Error::Internal(format!("sink vertex {v} on source side")));
        }
    }

    let mut flow = OneForm::new();
    for e in 0..arena.real_edges {
        let (lo, hi) = arena.ends[e];
        if arena.flow[e] != 0.0 {
            flow.set(arena.ids[lo], arena.ids[hi], arena.flow[e]);
        }
    }

    let mut cut = Vec::new();
    let mut cut_capacity = 0.0;
    for e in 0..arena.real_edges {
        let (lo, hi) = arena.ends[e];
        if reach[lo] != reach[hi] && arena.cap[e] > RESIDUAL_ZERO {
            let (s, t) = if reach[lo] { (lo, hi) } else { (hi, lo) };
            if arena.residual(s, e) > RESIDUAL_ZERO {
                return Err(Error::Internal("unsaturated cut edge".into()));
            }
            cut.push((arena.ids[s], arena.ids[t]));
            cut_capacity += arena.cap[e];
        }
    }
    cut.sort_unstable();
    let scale = 1.0 + value.abs() + cut_capacity.abs();
    if (value - cut_capacity).abs() > 1e-9 * scale {
        return Err(Error::Internal(format!(
            "flow value {value} and cut capacity {cut_capacity} disagree"
        )));
    }

    // Sink side: reachable from v2 without entering the source side.
    let mut sink_side: BTreeSet<u32> = BTreeSet::new();
    let mut queue: VecDeque<u32> = v2.iter().copied().collect();
    sink_side.extend(v2.iter().copied());
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if !source_side.contains(&w) && sink_side.insert(w) {
                queue.push_back(w);
            }
        }
    }

    let cut_sources: BTreeSet<u32> = cut.iter().map(|&(s, _)| s).collect();
    let cut_sinks: BTreeSet<u32> = cut.iter().map(|&(_, t)| t).collect();

    Ok(FlowResult {
        value,
        flow,
        cut,
        cut_capacity,
        source_side,
        sink_side,
        cut_sources,
        cut_sinks,
    })
}

/// Decompose a flow form into simple paths from `v1` to `v2` with positive
/// multiplicities. Circulation (flow around cycles) is stripped and
/// discarded. Returns `NotAFlow` if the leftover does not conserve.
pub fn decompose(
    g: &Graph,
    form: &OneForm,
    v1: &BTreeSet<u32>,
    v2: &BTreeSet<u32>,
) -> Result<Vec<(Vec<u32>, f64)>> {
    if v1.is_empty() || v2.is_empty() {
        return Err(Error::BadTerminals("empty terminal set".into()));
    }
    if v1.intersection(v2).next().is_some() {
        return Err(Error::BadTerminals("terminal sets overlap".into()));
    }
    let mut r = form.clone();
    let mut out: Vec<(Vec<u32>, f64)> = Vec::new();
    let guard = 4 * (g.edge_count() + g.vertex_count()) + 16;
    let mut rounds = 0usize;

    'sources: loop {
        rounds += 1;
        if rounds > guard {
            return Err(Error::Internal("path extraction did not terminate".into()));
        }
        let Some(&s) = v1
            .iter()
            .find(|&&s| g.neighbors(s).any(|x| r.get(s, x) > RESIDUAL_ZERO))
        else {
            break 'sources;
        };
        // Greedy walk along positive arcs; cancel any cycle encountered.
        let mut path = vec![s];
        let mut on_path: BTreeMap<u32, usize> = BTreeMap::from([(s, 0)]);
        loop {
            let v = *path.last().unwrap();
            if v2.contains(&v) {
                let bottleneck = path
                    .windows(2)
                    .map(|w| r.get(w[0], w[1]))
                    .fold(f64::INFINITY, f64::min);
                for w in path.windows(2) {
                    r.add(w[0], w[1], -bottleneck);
                }
                out.push((path, bottleneck));
                continue 'sources;
            }
            let Some(next) = g.neighbors(v).find(|&x| r.get(v, x) > RESIDUAL_ZERO) else {
                return Err(Error::NotAFlow(format!(
                    "walk stuck at vertex {v} with inflow and no outflow"
                )));
            };
            if let Some(&i) = on_path.get(&next) {
                // cycle path[i..] + (v, next): cancel it and restart
                let mut cyc: Vec<u32> = path[i..].to_vec();
                cyc.push(next);
                let m = cyc
                    .windows(2)
                    .map(|w| r.get(w[0], w[1]))
                    .fold(f64::INFINITY, f64::min);
                for w in cyc.windows(2) {
                    r.add(w[0], w[1], -m);
                }
                continue 'sources;
            }
            on_path.insert(next, path.len());
            path.push(next);
        }
    }

    // Leftover must be circulation only: conservation at every vertex.
    for v in g.vertices() {
        let d: f64 = g.neighbors(v).map(|x| r.get(v, x)).sum();
        if d.abs() > 1e-9 {
            return Err(Error::NotAFlow(format!(
                "residual divergence {d} at vertex {v} after path extraction"
            )));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[u32]) -> BTreeSet<u32> {
        vs.iter().copied().collect()
    }

    /// chain A(0) - x(1) - y(2) - B(3), capacities 0.6, 0.4, 0.6
    fn chain() -> (Graph, Capacities) {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b, w) in [(0, 1, 0.6), (1, 2, 0.4), (2, 3, 0.6)] {
            g.add_edge(a, b);
            c.set(a, b, w);
        }
        (g, c)
    }

    #[test]
    fn chain_bottleneck() {
        let (g, c) = chain();
        let r = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        assert!((r.value - 0.4).abs() < 1e-12);
        assert_eq!(r.cut, vec![(1, 2)]);
        assert!((r.cut_capacity - 0.4).abs() < 1e-12);
        assert_eq!(r.source_side, set(&[0, 1]));
        assert_eq!(r.sink_side, set(&[2, 3]));
        assert_eq!(r.cut_sources, set(&[1]));
        assert_eq!(r.cut_sinks, set(&[2]));
        assert!((r.flow.get(0, 1) - 0.4).abs() < 1e-12);
        assert!((r.flow.get(1, 2) - 0.4).abs() < 1e-12);
        assert!((r.flow.get(2, 3) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn square_two_routes() {
        // 0 - 1, 1 - 2, 0 - 3, 3 - 2: two disjoint routes of capacity 0.3
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b) in [(0, 1), (1, 2), (0, 3), (3, 2)] {
            g.add_edge(a, b);
            c.set(a, b, 0.3);
        }
        let r = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[2])).unwrap();
        assert!((r.value - 0.6).abs() < 1e-12);
        assert_eq!(r.cut.len(), 2);
        assert_eq!(r.source_side, set(&[0]));
    }

    #[test]
    fn k4_unit_capacities() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for a in 0..4u32 {
            for b in (a + 1)..4 {
                g.add_edge(a, b);
                c.set(a, b, 1.0);
            }
        }
        let r = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!((r.cut_capacity - 3.0).abs() < 1e-12);
    }

    #[test]
    fn multi_terminal() {
        // two sources feed one sink through a shared middle edge
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b, w) in [(0, 2, 0.5), (1, 2, 0.5), (2, 3, 0.7)] {
            g.add_edge(a, b);
            c.set(a, b, w);
        }
        let r = max_flow_min_cut(&g, &c, &set(&[0, 1]), &set(&[3])).unwrap();
        assert!((r.value - 0.7).abs() < 1e-12);
        assert_eq!(r.cut, vec![(2, 3)]);
    }

    #[test]
    fn zero_capacity_edges_not_reported_in_cut() {
        let (g, mut c) = chain();
        c.set(1, 2, 0.0);
        let r = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.cut.is_empty());
        assert_eq!(r.cut_capacity, 0.0);
        assert_eq!(r.source_side, set(&[0, 1]));
    }

    #[test]
    fn terminal_validation() {
        let (g, c) = chain();
        assert!(matches!(
            max_flow_min_cut(&g, &c, &set(&[]), &set(&[3])),
            Err(Error::BadTerminals(_))
        ));
        assert!(matches!(
            max_flow_min_cut(&g, &c, &set(&[0, 3]), &set(&[3])),
            Err(Error::BadTerminals(_))
        ));
        assert!(matches!(
            max_flow_min_cut(&g, &c, &set(&[9]), &set(&[3])),
            Err(Error::BadTerminals(_))
        ));
    }

    #[test]
    fn disconnected_rejected() {
        let mut g = Graph::new();
        g.add_edge(0, 1);
        g.add_edge(2, 3);
        let mut c = Capacities::new();
        c.set(0, 1, 1.0);
        c.set(2, 3, 1.0);
        assert!(matches!(
            max_flow_min_cut(&g, &c, &set(&[0]), &set(&[1])),
            Err(Error::Disconnected(_))
        ));
    }

    #[test]
    fn determinism() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b, w) in [
            (0, 1, 0.9),
            (0, 2, 0.4),
            (1, 2, 0.3),
            (1, 3, 0.5),
            (2, 3, 0.8),
            (2, 4, 0.2),
            (3, 4, 0.9),
        ] {
            g.add_edge(a, b);
            c.set(a, b, w);
        }
        let r1 = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[4])).unwrap();
        let r2 = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[4])).unwrap();
        assert_eq!(r1.value, r2.value);
        assert_eq!(r1.cut, r2.cut);
        assert_eq!(r1.flow, r2.flow);
    }

    #[test]
    fn decompose_chain() {
        let (g, c) = chain();
        let r = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        let paths = decompose(&g, &r.flow, &set(&[0]), &set(&[3])).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].0, vec![0, 1, 2, 3]);
        assert!((paths[0].1 - 0.4).abs() < 1e-12);
    }

    #[test]
    fn decompose_strips_circulation() {
        let mut g = Graph::new();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (1, 3)] {
            g.add_edge(a, b);
        }
        let mut f = OneForm::new();
        // path 0 -> 1 -> 2 with 0.5 plus a cycle 1 -> 3 -> 2 -> 1... use
        // cycle 1 -> 2 -> 3 -> 1 with 0.2 on top
        f.set(0, 1, 0.5);
        f.set(1, 2, 0.5 + 0.2);
        f.set(2, 3, 0.2);
        f.set(3, 1, 0.2);
        let paths = decompose(&g, &f, &set(&[0]), &set(&[2])).unwrap();
        let total: f64 = paths.iter().map(|p| p.1).sum();
        assert!((total - 0.5).abs() < 1e-12);
        for (p, _) in &paths {
            assert_eq!(p.first(), Some(&0));
            assert_eq!(p.last(), Some(&2));
        }
    }

    #[test]
    fn decompose_rejects_non_flow() {
        let mut g = Graph::new();
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let mut f = OneForm::new();
        f.set(0, 1, 0.5);
        f.set(1, 2, 0.1); // vertex 1 swallows 0.4
        assert!(matches!(
            decompose(&g, &f, &set(&[0]), &set(&[2])),
            Err(Error::NotAFlow(_))
        ));
    }

    #[test]
    fn flow_conserves_and_respects_capacity() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b, w) in [
            (0, 1, 0.9),
            (0, 2, 0.4),
            (1, 2, 0.3),
            (1, 3, 0.5),
            (2, 3, 0.8),
        ] {
            g.add_edge(a, b);
            c.set(a, b, w);
        }
        let r = max_flow_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        for ((a, b), v) in r.flow.iter() {
            assert!(v.abs() <= c.get(a, b) + 1e-12);
        }
        for v in [1u32, 2] {
            let d: f64 = g.neighbors(v).map(|x| r.flow.get(v, x)).sum();
            assert!(d.abs() < 1e-12, "conservation at {v}: {d}");
        }
        let out: f64 = g.neighbors(0).map(|x| r.flow.get(0, x)).sum();
        assert!((out - r.value).abs() < 1e-12);
    }
}
