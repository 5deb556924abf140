//! The oriented dual of an admissible planar complex.
//!
//! Dual vertices are the bounded faces plus one pendant vertex per boundary
//! edge. Every primal edge induces one dual edge, oriented so that its
//! source is the face whose counterclockwise cycle contains the primal
//! orientation stored in `along`; a form value pushed across then satisfies
//!
//! * `curl(alpha)(f) = div(alpha_dual)(f_dual)` for every bounded face, and
//! * `flux(alpha_dual) = -sum of alpha over the boundary edges`.
//!
//! The dual is a multigraph: two faces sharing several edges give parallel
//! dual edges, and an edge with the same bounded face on both sides (a slit
//! reaching into a face) gives a loop. Loops carry form values like any
//! other dual edge but contribute nothing to any divergence.

use crate::complex::{FaceRef, PlanarComplex};
use crate::error::{Error, Result};
use crate::forms::OneForm;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualEdge {
    pub src: u32,
    pub dst: u32,
    /// Primal oriented edge with the face of `src` on its left.
    pub along: (u32, u32),
}

#[derive(Debug, Clone)]
pub struct DualGraph {
    face_count: usize,
    /// Boundary edges in counterclockwise walk order; pendant dual vertex
    /// `face_count + k` corresponds to `boundary[k]`.
    boundary: Vec<(u32, u32)>,
    edges: Vec<DualEdge>,
    /// canonical primal edge -> dual edge index
    by_primal: BTreeMap<(u32, u32), usize>,
}

/// One value per dual edge, on the stored `src -> dst` orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct DualForm {
    pub values: Vec<f64>,
}

/// Build the oriented dual. The complex must be admissible.
pub fn dualize(c: &PlanarComplex) -> Result<DualGraph> {
    c.require_admissible()?;
    let boundary = c.boundary_edges();
    let face_count = c.face_count();
    let pendant: BTreeMap<(u32, u32), usize> = boundary
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| ((a.min(b), a.max(b)), k))
        .collect();

    let mut edges = Vec::new();
    let mut by_primal = BTreeMap::new();
    for (a, b) in c.edge_pairs() {
        let left_ab = c.left_face(a, b).unwrap();
        let left_ba = c.left_face(b, a).unwrap();
        let idx = edges.len();
        let e = match (left_ab, left_ba) {
            (FaceRef::Bounded(f), FaceRef::Bounded(g)) => DualEdge {
                src: f as u32,
                dst: g as u32,
                along: (a, b),
            },
            (FaceRef::Bounded(f), FaceRef::Outer) => DualEdge {
                src: f as u32,
                dst: (face_count + pendant[&(a, b)]) as u32,
                along: (a, b),
            },
            (FaceRef::Outer, FaceRef::Bounded(g)) => DualEdge {
                src: g as u32,
                dst: (face_count + pendant[&(a, b)]) as u32,
                along: (b, a),
            },
            (FaceRef::Outer, FaceRef::Outer) => {
                return Err(Error::NotAdmissible(format!(
                    "edge ({a}, {b}) lies on no bounded face"
                )))
            }
        };
        edges.push(e);
        by_primal.insert((a, b), idx);
    }

    Ok(DualGraph {
        face_count,
        boundary,
        edges,
        by_primal,
    })
}

impl DualGraph {
    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.face_count + self.boundary.len()
    }

    pub fn edges(&self) -> &[DualEdge] {
        &self.edges
    }

    /// Dual vertex of bounded face `f`.
    pub fn face_vertex(&self, f: usize) -> u32 {
        debug_assert!(f < self.face_count);
        f as u32
    }

    /// Is this dual vertex a bounded face (as opposed to a pendant)?
    pub fn is_face_vertex(&self, w: u32) -> bool {
        (w as usize) < self.face_count
    }

    /// The bounded face behind a dual vertex, if it is one.
    pub fn face_of_vertex(&self, w: u32) -> Option<usize> {
        self.is_face_vertex(w).then_some(w as usize)
    }

    /// Pendant dual vertex of the k-th boundary edge.
    pub fn boundary_vertex(&self, k: usize) -> u32 {
        (self.face_count + k) as u32
    }

    /// Boundary edges in counterclockwise order; entry k belongs to the
    /// pendant vertex `boundary_vertex(k)`.
    pub fn boundary_edges(&self) -> &[(u32, u32)] {
        &self.boundary
    }

    pub fn dual_edge_of_primal(&self, a: u32, b: u32) -> Option<usize> {
        self.by_primal.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].src == self.edges[e].dst
    }

    /// Push a primal 1-form across: one value per dual edge.
    pub fn push_form(&self, alpha: &OneForm) -> DualForm {
        DualForm {
            values: self
                .edges
                .iter()
                .map(|e| alpha.get(e.along.0, e.along.1))
                .collect(),
        }
    }

    /// Pull a dual form back to a primal 1-form.
    pub fn pull_form(&self, phi: &DualForm) -> OneForm {
        assert_eq!(phi.values.len(), self.edges.len());
        let mut out = OneForm::new();
        for (e, &v) in self.edges.iter().zip(phi.values.iter()) {
            out.set(e.along.0, e.along.1, v);
        }
        out
    }

    /// Divergence of a dual form at dual vertex `w`; loops contribute 0.
    pub fn divergence(&self, phi: &DualForm, w: u32) -> f64 {
        assert_eq!(phi.values.len(), self.edges.len());
        self.edges
            .iter()
            .zip(phi.values.iter())
            .map(|(e, &v)| {
                let mut d = 0.0;
                if e.src == w {
                    d += v;
                }
                if e.dst == w {
                    d -= v;
                }
                d
            })
            .sum()
    }

    /// Flux through the dual boundary: sum of pendant-vertex divergences.
    pub fn flux(&self, phi: &DualForm) -> f64 {
        (0..self.boundary.len())
            .map(|k| self.divergence(phi, self.boundary_vertex(k)))
            .sum()
    }

    /// Total variation over the dual boundary: each pendant vertex has one
    /// incident dual edge, so this is the sum of their absolute values.
    pub fn boundary_tv(&self, phi: &DualForm) -> f64 {
        assert_eq!(phi.values.len(), self.edges.len());
        let b = self.face_count as u32;
        self.edges
            .iter()
            .zip(phi.values.iter())
            .filter(|(e, _)| e.dst >= b)
            .map(|(_, &v)| v.abs())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::VertexFunction;

    fn unit_square() -> PlanarComplex {
        PlanarComplex::build(
            &[(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 1.0, 1.0), (3, 0.0, 1.0)],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
        )
        .unwrap()
    }

    fn grid2() -> PlanarComplex {
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for j in 0..3u32 {
            for i in 0..3u32 {
                vs.push((3 * j + i, i as f64, j as f64));
            }
        }
        for j in 0..3u32 {
            for i in 0..3u32 {
                let v = 3 * j + i;
                if i + 1 < 3 {
                    es.push((v, v + 1));
                }
                if j + 1 < 3 {
                    es.push((v, v + 3));
                }
            }
        }
        PlanarComplex::build(&vs, &es).unwrap()
    }

    fn random_form(c: &PlanarComplex, seed: f64) -> OneForm {
        let mut form = OneForm::new();
        let mut s = seed;
        for (a, b) in c.edge_pairs() {
            s = (s * 97.0 + 0.137).fract();
            form.set(a, b, s - 0.5);
        }
        form
    }

    #[test]
    fn square_dual_is_a_star() {
        let c = unit_square();
        let d = dualize(&c).unwrap();
        assert_eq!(d.face_count(), 1);
        assert_eq!(d.boundary_count(), 4);
        assert_eq!(d.edges().len(), 4);
        for e in d.edges() {
            assert_eq!(e.src, 0);
            assert!(e.dst >= 1);
            // stored primal orientation has the face on its left: it is the
            // counterclockwise (boundary) orientation
            assert!(c.boundary_edges().contains(&e.along));
        }
    }

    #[test]
    fn grid_dual_shape() {
        let c = grid2();
        let d = dualize(&c).unwrap();
        assert_eq!(d.face_count(), 4);
        assert_eq!(d.boundary_count(), 8);
        assert_eq!(d.edges().len(), 12);
        // interior dual edges form the 4-cycle between adjacent cells
        let interior: Vec<&DualEdge> = d
            .edges()
            .iter()
            .filter(|e| d.is_face_vertex(e.src) && d.is_face_vertex(e.dst))
            .collect();
        assert_eq!(interior.len(), 4);
        for e in &interior {
            assert_ne!(e.src, e.dst);
        }
    }

    #[test]
    fn curl_transfers_to_divergence() {
        let c = grid2();
        let d = dualize(&c).unwrap();
        let alpha = random_form(&c, 0.4217);
        let phi = d.push_form(&alpha);
        for f in 0..c.face_count() {
            let curl = c.curl(&alpha, f);
            let div = d.divergence(&phi, d.face_vertex(f));
            assert!((curl - div).abs() < 1e-12, "face {f}: {curl} vs {div}");
        }
    }

    #[test]
    fn flux_is_minus_boundary_sum() {
        let c = grid2();
        let d = dualize(&c).unwrap();
        let alpha = random_form(&c, 0.913);
        let phi = d.push_form(&alpha);
        assert!((d.flux(&phi) + c.boundary_sum(&alpha)).abs() < 1e-12);
    }

    #[test]
    fn pull_inverts_push() {
        let c = grid2();
        let d = dualize(&c).unwrap();
        let alpha = random_form(&c, 0.269);
        assert_eq!(d.pull_form(&d.push_form(&alpha)), alpha);
    }

    #[test]
    fn vortex_charge_lands_in_dual() {
        let c = unit_square();
        let d = dualize(&c).unwrap();
        let u = VertexFunction::from_pairs([(0, 0.0), (1, 0.25), (2, 0.5), (3, 0.75)]);
        let du = crate::forms::differential(&u, c.edge_pairs()).unwrap();
        let alpha = du.project();
        let phi = d.push_form(&alpha);
        assert!((d.divergence(&phi, 0) - 1.0).abs() < 1e-15);
        assert!((d.flux(&phi) + 1.0).abs() < 1e-15);
        assert!((d.boundary_tv(&phi) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slit_gives_loop() {
        let c = PlanarComplex::build(
            &[
                (0, 0.0, 0.0),
                (1, 1.0, 0.0),
                (2, 1.0, 1.0),
                (3, 0.0, 1.0),
                (4, 0.5, 0.5),
            ],
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)],
        )
        .unwrap();
        let d = dualize(&c).unwrap();
        let k = d.dual_edge_of_primal(0, 4).unwrap();
        assert!(d.is_loop(k));
        // a value on the slit shows up in no divergence
        let mut alpha = OneForm::new();
        alpha.set(0, 4, 0.41);
        let phi = d.push_form(&alpha);
        for w in 0..d.vertex_count() {
            assert_eq!(d.divergence(&phi, w as u32), 0.0);
        }
    }

    #[test]
    fn shared_path_gives_parallel_edges
    () {
        // square cut by a two-edge path through its middle: the two faces
        // share two primal edges, so the dual has parallel edges
        let c = PlanarComplex::build(
            &[
                (0, 0.0, 0.0),
                (1, 2.0, 0.0),
                (2, 2.0, 2.0),
                (3, 0.0, 2.0),
                (4, 1.0, 1.0),
            ],
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 2)],
        )
        .unwrap();
        assert_eq!(c.face_count(), 2);
        let d = dualize(&c).unwrap();
        let k1 = d.dual_edge_of_primal(0, 4).unwrap();
        let k2 = d.dual_edge_of_primal(4, 2).unwrap();
        let (e1, e2) = (d.edges()[k1], d.edges()[k2]);
        assert!(d.is_face_vertex(e1.src) && d.is_face_vertex(e1.dst));
        let pair = |e: DualEdge| (e.src.min(e.dst), e.src.max(e.dst));
        assert_eq!(pair(e1), pair(e2));
        assert_ne!(e1.src, e1.dst);
    }

    #[test]
    fn pinch_splits_dual_into_components() {
        let c = PlanarComplex::build(
            &[
                (0, 0.0, 0.0),
                (1, 1.0, 0.0),
                (2, 1.0, 1.0),
                (3, 0.0, 1.0),
                (4, 2.0, 1.0),
                (5, 2.0, 2.0),
                (6, 1.0, 2.0),
            ],
            &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (5, 6), (6, 2)],
        )
        .unwrap();
        let d = dualize(&c).unwrap();
        assert_eq!(d.face_count(), 2);
        // no dual edge joins the two faces
        for e in d.edges() {
            assert!(!(d.is_face_vertex(e.src) && d.is_face_vertex(e.dst)));
        }
    }

    #[test]
    fn non_admissible_rejected() {
        let c = PlanarComplex::build(
            &[(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 1.0, 1.0)],
            &[(0, 1), (1, 2)],
        )
        .unwrap();
        assert!(matches!(dualize(&c), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn stokes_via_dual() {
        // sum of all interior divergences equals minus the flux
        let c = grid2();
        let d = dualize(&c).unwrap();
        let alpha = random_form(&c, 0.777);
        let phi = d.push_form(&alpha);
        let interior: f64 = (0..d.face_count())
            .map(|f| d.divergence(&phi, d.face_vertex(f)))
            .sum();
        assert!((interior + d.flux(&phi)).abs() < 1e-12);
    }
}
