//! Planar complexes: graphs with a straight-line embedding in the plane,
//! every edge present in both orientations, and faces recovered from the
//! rotation system (neighbors in counterclockwise angular order).
//!
//! Bounded faces are traced counterclockwise (positive signed area); the
//! single unbounded face is traced clockwise. The boundary edge list `E∂`
//! is the outer cycle reversed, so it runs counterclockwise around the
//! complex. A complex is admissible when every boundary edge also lies on
//! a bounded face.

use crate::error::{Error, Result};
use crate::flow::Graph;
use crate::forms::OneForm;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// The face on one side of an oriented edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceRef {
    Bounded(usize),
    Outer,
}

/// Edge count above which the quadratic segment-crossing check is skipped
/// (the rotation-system and Euler checks still run; large inputs are
/// lattice-generated and planar by construction).
const CROSSING_CHECK_EDGE_CAP: usize = 1200;

#[derive(Debug, Clone)]
pub struct PlanarComplex {
    ids: Vec<u32>,
    idx: BTreeMap<u32, usize>,
    pts: Vec<Point>,
    rot: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    eidx: BTreeMap<(usize, usize), usize>,
    faces: Vec<Vec<(usize, usize)>>,
    outer: Vec<(usize, usize)>,
    left: Vec<[FaceRef; 2]>,
    boundary_v: BTreeSet<usize>,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Angular half-plane of a direction, counting counterclockwise from east:
/// 0 for angles in [0, pi), 1 for [pi, 2pi).
fn half(dx: f64, dy: f64) -> u8 {
    if dy < 0.0 || (dy == 0.0 && dx < 0.0) {
        1
    } else {
        0
    }
}

type RawParts = (Vec<u32>, BTreeMap<u32, usize>, Vec<Point>, Vec<(usize, usize)>);

fn validate_raw(vertices: &[(u32, f64, f64)], edges: &[(u32, u32)]) -> Result<RawParts> {
    if vertices.is_empty() || edges.is_empty() {
        return Err(Error::InvalidInput(
            "a complex needs at least one vertex and one edge".into(),
        ));
    }
    let mut ids: Vec<u32> = vertices.iter().map(|&(id, _, _)| id).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("duplicate vertex id".into()));
    }
    let idx: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut pts = vec![Point { x: 0.0, y: 0.0 }; ids.len()];
    for &(id, x, y) in vertices {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidInput(format!(
                "vertex {id} has non-finite coordinates"
            )));
        }
        pts[idx[&id]] = Point { x, y };
    }
    let mut seen_pts: BTreeMap<(u64, u64), u32> = BTreeMap::new();
    for &(id, _, _) in vertices {
        let p = pts[idx[&id]];
        let k = (p.x.to_bits(), p.y.to_bits());
        if let Some(&other) = seen_pts.get(&k) {
            return Err(Error::InvalidInput(format!(
                "vertices {other} and {id} share a position"
            )));
        }
        seen_pts.insert(k, id);
    }
    let mut dense = Vec::with_capacity(edges.len());
    let mut seen = BTreeSet::new();
    for &(a, b) in edges {
        if a == b {
            return Err(Error::InvalidInput(format!("loop edge at vertex {a}")));
        }
        let (Some(&da), Some(&db)) = (idx.get(&a), idx.get(&b)) else {
            return Err(Error::InvalidInput(format!(
                "edge ({a}, {b}) references a missing vertex"
            )));
        };
        let k = (da.min(db), da.max(db));
        if !seen.insert(k) {
            return Err(Error::InvalidInput(format!("duplicate edge ({a}, {b})")));
        }
        dense.push(k);
    }
    dense.sort_unstable();
    Ok((ids, idx, pts, dense))
}

/// Sort each adjacency list counterclockwise starting from east; two
/// incident edges with the same direction are an embedding error.
fn rotation(
    ids: &[u32],
    pts: &[Point],
    edges: &[(usize, usize)],
) -> Result<Vec<Vec<usize>>> {
    let mut rot = vec![Vec::new(); pts.len()];
    for &(a, b) in edges {
        rot[a].push(b);
        rot[b].push(a);
    }
    for (v, list) in rot.iter_mut().enumerate() {
        let o = pts[v];
        list.sort_by(|&a, &b| {
            let (da, db) = (
                (pts[a].x - o.x, pts[a].y - o.y),
                (pts[b].x - o.x, pts[b].y - o.y),
            );
            let (ha, hb) = (half(da.0, da.1), half(db.0, db.1));
            ha.cmp(&hb).then_with(|| {
                let c = da.0 * db.1 - da.1 * db.0;
                c.partial_cmp(&0.0).unwrap().reverse()
            })
        });
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let (a, b) = (list[i], list[j]);
                let (da, db) = (
                    (pts[a].x - o.x, pts[a].y - o.y),
                    (pts[b].x - o.x, pts[b].y - o.y),
                );
                let c = da.0 * db.1 - da.1 * db.0;
                let d = da.0 * db.0 + da.1 * db.1;
                if c == 0.0 && d > 0.0 {
                    return Err(Error::NonPlanarEmbedding(format!(
                        "edges from vertex {} toward {} and {} overlap",
                        ids[v], ids[a], ids[b]
                    )));
                }
            }
        }
    }
    Ok(rot)
}

/// Partition all oriented edges into face cycles; returns the cycles and
/// their signed areas. The successor of dart (u, v) is (v, w) with w the
/// cyclic predecessor of u in the counterclockwise order around v.
fn trace(pts: &[Point], rot: &[Vec<usize>]) -> (Vec<Vec<(usize, usize)>>, Vec<f64>) {
    let pos: Vec<BTreeMap<usize, usize>> = rot
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, &w)| (w, i)).collect())
        .collect();
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut cycles = Vec::new();
    let mut areas = Vec::new();
    for v in 0..rot.len() {
        for &w in &rot[v] {
            if used.contains(&(v, w)) {
                continue;
            }
            let mut cyc = Vec::new();
            let (mut t, mut h) = (v, w);
            loop {
                cyc.push((t, h));
                used.insert((t, h));
                let i = pos[h][&t];
                let d = rot[h].len();
                let next = rot[h][(i + d - 1) % d];
                t = h;
                h = next;
                if (t, h) == (v, w) {
                    break;
                }
            }
            // normalize: start at the smallest dart
            let k = (0..cyc.len()).min_by_key(|&i| cyc[i]).unwrap();
            cyc.rotate_left(k);
            let area = 0.5
                * cyc
                    .iter()
                    .map(|&(t, h)| pts[t].x * pts[h].y - pts[t].y * pts[h].x)
                    .sum::<f64>();
            cycles.push(cyc);
            areas.push(area);
        }
    }
    (cycles, areas)
}

fn on_segment(p: Point, q: Point, r: Point) -> bool {
    // r collinear with p-q assumed; is r within the bounding box?
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

fn segments_intersect(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p3, p4, p1))
        || (d2 == 0.0 && on_segment(p3, p4, p2))
        || (d3 == 0.0 && on_segment(p1, p2, p3))
        || (d4 == 0.0 && on_segment(p1, p2, p4))
}

impl PlanarComplex {
    /// Build a complex from vertices `(id, x, y)` and undirected edges.
    ///
    /// Fails on malformed input, a disconnected graph, or a drawing that is
    /// not a planar embedding (overlapping incident edges, inconsistent
    /// face structure, crossing segments).
    pub fn build(vertices: &[(u32, f64, f64)], edges: &[(u32, u32)]) -> Result<Self> {
        let (ids, idx, pts, dense) = validate_raw(vertices, edges)?;

        let mut g = Graph::new();
        for &(a, b) in &dense {
            g.add_edge(a as u32, b as u32);
        }
        for (i, id) in ids.iter().enumerate() {
            if !g.contains_vertex(i as u32) {
                return Err(Error::Disconnected(format!(
                    "vertex {id} has no incident edge"
                )));
            }
        }
        if !g.is_connected() {
            return Err(Error::Disconnected("complex must be connected".into()));
        }

        let rot = rotation(&ids, &pts, &dense)?;
        let (cycles, areas) = trace(&pts, &rot);

        let mut faces = Vec::new();
        let mut outer: Option<Vec<(usize, usize)>> = None;
        for (cyc, &area) in cycles.into_iter().zip(areas.iter()) {
            if area > 0.0 {
                faces.push(cyc);
            } else if outer.is_none() {
                outer = Some(cyc);
            } else {
                return Err(Error::NonPlanarEmbedding(
                    "more than one unbounded face cycle".into(),
                ));
            }
        }
        let Some(outer) = outer else {
            return Err(Error::NonPlanarEmbedding(
                "no unbounded face cycle found".into(),
            ));
        };
        faces.sort_by_key(|c| c[0]);

        let v = ids.len();
        let e = dense.len();
        if v as i64 - e as i64 + (faces.len() as i64 + 1) != 2 {
            return Err(Error::NonPlanarEmbedding(format!(
                "Euler check failed: V={v}, E={e}, F={}",
                faces.len() + 1
            )));
        }

        if e <= CROSSING_CHECK_EDGE_CAP {
            for i in 0..dense.len() {
                for j in (i + 1)..dense.len() {
                    let (a, b) = dense[i];
                    let (c, d) = dense[j];
                    if a == c || a == d || b == c || b == d {
                        continue;
                    }
                    if segments_intersect(pts[a], pts[b], pts[c], pts[d]) {
                        return Err(Error::NonPlanarEmbedding(format!(
                            "edges ({}, {}) and ({}, {}) intersect",
                            ids[a], ids[b], ids[c], ids[d]
                        )));
                    }
                }
            }
            for (vi, &p) in pts.iter().enumerate() {
                for &(a, b) in &dense {
                    if vi == a || vi == b {
                        continue;
                    }
                    if cross(pts[a], pts[b], p) == 0.0 && on_segment(pts[a], pts[b], p) {
                        return Err(Error::NonPlanarEmbedding(format!(
                            "vertex {} lies on edge ({}, {})",
                            ids[vi], ids[a], ids[b]
                        )));
                    }
                }
            }
        }

        let eidx: BTreeMap<(usize, usize), usize> =
            dense.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut left = vec![[FaceRef::Outer; 2]; dense.len()];
        let mut assign = |cyc: &[(usize, usize)], f: FaceRef| {
            for &(t, h) in cyc {
                let slot = usize::from(t > h);
                left[eidx[&(t.min(h), t.max(h))]][slot] = f;
            }
        };
        for (fi, cyc) in faces.iter().enumerate() {
            assign(cyc, FaceRef::Bounded(fi));
        }
        assign(&outer, FaceRef::Outer);

        let boundary_v: BTreeSet<usize> = outer.iter().map(|&(t, _)| t).collect();

        Ok(PlanarComplex {
            ids,
            idx,
            pts,
            rot,
            edges: dense,
            eidx,
            faces,
            outer,
            left,
            boundary_v,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.ids.iter().copied()
    }

    pub fn contains_vertex(&self, id: u32) -> bool {
        self.idx.contains_key(&id)
    }

    pub fn point(&self, id: u32) -> Option<Point> {
        self.idx.get(&id).map(|&i| self.pts[i])
    }

    pub fn contains_edge(&self, a: u32, b: u32) -> bool {
        match (self.idx.get(&a), self.idx.get(&b)) {
            (Some(&da), Some(&db)) => self.eidx.contains_key(&(da.min(db), da.max(db))),
            _ => false,
        }
    }

    /// Undirected edges as `(a, b)` pairs of vertex ids with `a < b`.
    pub fn edge_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().map(|&(a, b)| (self.ids[a], self.ids[b]))
    }

    /// Neighbors of `id` in counterclockwise angular order.
    pub fn neighbors_ccw(&self, id: u32) -> Vec<u32> {
        match self.idx.get(&id) {
            Some(&i) => self.rot[i].iter().map(|&w| self.ids[w]).collect(),
            None => Vec::new(),
        }
    }

    /// Oriented edge cycle of a bounded face, counterclockwise.
    pub fn face_cycle(&self, face: usize) -> Vec<(u32, u32)> {
        self.faces[face]
            .iter()
            .map(|&(t, h)| (self.ids[t], self.ids[h]))
            .collect()
    }

    /// Oriented edge cycle of the unbounded face, clockwise.
    pub fn outer_cycle(&self) -> Vec<(u32, u32)> {
        self.outer
            .iter()
            .map(|&(t, h)| (self.ids[t], self.ids[h]))
            .collect()
    }

    /// Boundary edges `E∂`: the outer cycle reversed, so the walk runs
    /// counterclockwise around the complex.
    pub fn boundary_edges(&self) -> Vec<(u32, u32)> {
        self.outer
            .iter()
            .rev()
            .map(|&(t, h)| (self.ids[h], self.ids[t]))
            .collect()
    }

    pub fn boundary_vertices(&self) -> BTreeSet<u32> {
        self.boundary_v.iter().map(|&i| self.ids[i]).collect()
    }

    pub fn interior_vertices(&self) -> BTreeSet<u32> {
        (0..self.ids.len())
            .filter(|i| !self.boundary_v.contains(i))
            .map(|i| self.ids[i])
            .collect()
    }

    /// Face to the left of the oriented edge `(i, j)`, i.e. the face whose
    /// cycle contains that orientation.
    pub fn left_face(&self, i: u32, j: u32) -> Option<FaceRef> {
        let (&di, &dj) = (self.idx.get(&i)?, self.idx.get(&j)?);
        let e = *self.eidx.get(&(di.min(dj), di.max(dj)))?;
        Some(self.left[e][usize::from(di > dj)])
    }

    /// Every boundary edge lies on a bounded face.
    pub fn is_admissible(&self) -> bool {
        self.outer.iter().all(|&(t, h)| {
            let e = self.eidx[&(t.min(h), t.max(h))];
            matches!(self.left[e][usize::from(h > t)], FaceRef::Bounded(_))
        })
    }

    pub fn require_admissible(&self) -> Result<()> {
        for &(t, h) in &self.outer {
            let e = self.eidx[&(t.min(h), t.max(h))];
            if self.left[e][usize::from(h > t)] == FaceRef::Outer {
                return Err(Error::NotAdmissible(format!(
                    "boundary edge ({}, {}) lies on no bounded face",
                    self.ids[h], self.ids[t]
                )));
            }
        }
        Ok(())
    }

    /// Circulation of `form` around a bounded face.
    pub fn curl(&self, form: &OneForm, face: usize) -> f64 {
        self.faces[face]
            .iter()
            .map(|&(t, h)| form.get(self.ids[t], self.ids[h]))
            .sum()
    }

    /// Sum of `form` over the boundary edges.
    pub fn boundary_sum(&self, form: &OneForm) -> f64 {
        self.boundary_edges()
            .iter()
            .map(|&(i, j)| form.get(i, j))
            .sum()
    }

    pub fn as_graph(&self) -> Graph {
        let mut g = Graph::new();
        for (a, b) in self.edge_pairs() {
            g.add_edge(a, b);
        }
        g
    }
}

/// Split an arbitrary embedded graph into admissible complexes: repeatedly
/// drop edges lying on no bounded face, then split into connected
/// components. Components that end up with no edges are discarded; a tree
/// input therefore yields an empty list.
pub fn decompose_to_admissible(
    vertices: &[(u32, f64, f64)],
    edges: &[(u32, u32)],
) -> Result<Vec<PlanarComplex>> {
    let (ids, _idx, pts, mut dense) = validate_raw(vertices, edges)?;

    loop {
        if dense.is_empty() {
            return Ok(Vec::new());
        }
        let rot = rotation(&ids, &pts, &dense)?;
        let (cycles, areas) = trace(&pts, &rot);
        let mut on_face: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (cyc, &area) in cycles.iter().zip(areas.iter()) {
            if area > 0.0 {
                for &(t, h) in cyc {
                    on_face.insert((t.min(h), t.max(h)));
                }
            }
        }
        let before = dense.len();
        dense.retain(|k| on_face.contains(k));
        if dense.len() == before {
            break;
        }
    }

    let mut g = Graph::new();
    for &(a, b) in &dense {
        g.add_edge(a as u32, b as u32);
    }
    let mut out = Vec::new();
    for comp in g.connected_components() {
        let vs: Vec<(u32, f64, f64)> = comp
            .iter()
            .map(|&i| (ids[i as usize], pts[i as usize].x, pts[i as usize].y))
            .collect();
        let es: Vec<(u32, u32)> = dense
            .iter()
            .filter(|&&(a, b)| comp.contains(&(a as u32)) && comp.contains(&(b as u32)))
            .map(|&(a, b)| (ids[a], ids[b]))
            .collect();
        let c = PlanarComplex::build(&vs, &es)?;
        c.require_admissible()
            .map_err(|e| Error::Internal(format!("decomposition produced {e}")))?;
        out.push(c);
    }
    Ok(out)
}
