//! Rebuilding vertex functions from corrected 1-forms.
//!
//! After dipole removal a complex carries a form `alpha` that is curl-free
//! everywhere except possibly one singular face, together with the original
//! boundary values. This module turns that data back into a vertex function:
//!
//! * [`integrate_curl_free`] integrates an exactly curl-free form from a
//!   single base value; the result is path-independent by the discrete
//!   Green identity (every closed walk sums to zero).
//! * [`reconstruct_with_singularity`] handles one face of integer curl. The
//!   curl is rerouted to the defective boundary edge `e0` along a branch
//!   cut: a shortest dual path from the singular face to the pendant dual
//!   vertex of `e0` marks the crossed edges, and subtracting the integer
//!   multiple of that cut form leaves an exactly curl-free remainder. The
//!   remainder is integrated with every boundary value pinned, so the
//!   output matches the input function on the boundary bit for bit, and the
//!   nearest-integer projection of its differential reproduces `alpha` on
//!   every edge (the cut only shifts differentials by the integer).

use std::collections::{BTreeMap, VecDeque};

use crate::complex::PlanarComplex;
use crate::dual;
use crate::error::{Error, Result};
use crate::forms::{project_pi, OneForm, VertexFunction};
use crate::tol::DEFAULT_TOLERANCE;

/// Integrate an exactly curl-free 1-form into a vertex function.
///
/// `base` fixes the value at one vertex; every other value is obtained by
/// summing `alpha` along a breadth-first spanning tree. The differential of
/// the result equals `alpha` on every edge (up to roundoff), so when
/// `alpha` takes values in `[-1/2, 1/2]` the projection of the
/// differential reproduces `alpha` as well.
///
/// Errors with [`Error::PreconditionViolated`] when some face carries curl
/// beyond `1e-9`, and [`Error::InvalidInput`] when the base vertex is not
/// part of the complex.
pub fn integrate_curl_free(
    c: &PlanarComplex,
    base: (u32, f64),
    alpha: &OneForm,
) -> Result<VertexFunction> {
    if !c.contains_vertex(base.0) {
        return Err(Error::InvalidInput(format!(
            "base vertex {} is not in the complex",
            base.0
        )));
    }
    let mut total_curl = 0.0;
    for f in 0..c.face_count() {
        let curl = c.curl(alpha, f);
        if curl.abs() > DEFAULT_TOLERANCE {
            return Err(Error::PreconditionViolated(format!(
                "curl must vanish on every face: face {f} has curl {curl}"
            )));
        }
        total_curl += curl.abs();
    }
    let mut seeds = BTreeMap::new();
    seeds.insert(base.0, base.1);
    integrate_from_seeds(c, &seeds, alpha, DEFAULT_TOLERANCE + total_curl)
}

/// Rebuild a vertex function whose projected differential equals `alpha`
/// and whose boundary values equal `u` exactly.
///
/// `alpha` must take values in `[-1/2, 1/2]`, be curl-free away from the
/// face `f0`, and carry integer curl on `f0`. The function `u` must satisfy
/// the boundary hypotheses: its differential projects to itself on every
/// boundary edge except possibly `e0`, the projected boundary differential
/// must equal `alpha`, and the integer defect on `e0` must offset the curl
/// on `f0`. When the curl on `f0` vanishes the singular machinery is
/// skipped and the form is integrated directly.
///
/// The orientation of `e0` is normalized internally to the stored
/// counterclockwise boundary orientation, so both `(a, b)` and `(b, a)`
/// denote the same boundary edge.
///
/// Output guarantees: the returned function agrees with `u` on every
/// boundary vertex bitwise, and the projection of its differential equals
/// `alpha` on every edge. The projection identity can only fail when
/// `alpha` carries exactly `±1/2` across the branch cut, where the integer
/// shift flips the sign of the tie; that configuration is reported as an
/// internal error rather than silently returning a mismatched function.
pub fn reconstruct_with_singularity(
    c: &PlanarComplex,
    u: &VertexFunction,
    alpha: &OneForm,
    f0: usize,
    e0: (u32, u32),
) -> Result<VertexFunction> {
    if f0 >= c.face_count() {
        return Err(Error::InvalidInput(format!(
            "face index {f0} out of range (complex has {} faces)",
            c.face_count()
        )));
    }
    let boundary = c.boundary_edges();
    let e0_index = boundary
        .iter()
        .position(|&(a, b)| (a, b) == e0 || (b, a) == e0)
        .ok_or_else(|| {
            Error::InvalidInput(format!("({}, {}) is not a boundary edge", e0.0, e0.1))
        })?;
    let d0 = boundary[e0_index];
    for v in c.boundary_vertices() {
        if !u.contains(v) {
            return Err(Error::InvalidInput(format!(
                "function has no value at boundary vertex {v}"
            )));
        }
    }
    for ((a, b), value) in alpha.iter() {
        if value.abs() > 0.5 {
            return Err(Error::PreconditionViolated(format!(
                "the form must take values in [-1/2, 1/2]: edge ({a}, {b}) carries {value}"
            )));
        }
    }

    let mut k = 0i64;
    for f in 0..c.face_count() {
        let curl = c.curl(alpha, f);
        if f == f0 {
            let rounded = curl.round();
            if (curl - rounded).abs() > DEFAULT_TOLERANCE {
                return Err(Error::PreconditionViolated(format!(
                    "curl at the singular face must be an integer: face {f0} has curl {curl}"
                )));
            }
            k = rounded as i64;
        } else if curl.abs() > DEFAULT_TOLERANCE {
            return Err(Error::PreconditionViolated(format!(
                "curl must vanish away from the singular face: face {f} has curl {curl}"
            )));
        }
    }

    // Boundary hypotheses. `du` is compared against its own projection on
    // every boundary edge except `d0`, and against `alpha` everywhere.
    let du_dart = |(a, b): (u32, u32)| u.value(b) - u.value(a);
    let mut h0_bad: Vec<(u32, u32)> = Vec::new();
    for &(a, b) in &boundary {
        let d = du_dart((a, b));
        if (a, b) != d0 && (project_pi(d) - d).abs() > DEFAULT_TOLERANCE {
            h0_bad.push((a, b));
        }
        if (project_pi(d) - alpha.get(a, b)).abs() > DEFAULT_TOLERANCE {
            return Err(Error::PreconditionViolated(format!(
                "boundary trace: the form must equal the projected boundary \
                 differential; violated at ({a}, {b})"
            )));
        }
    }
    if let Some(&(a, b)) = h0_bad.first() {
        return Err(Error::PreconditionViolated(format!(
            "h0: du must equal its nearest-integer projection on every boundary \
             edge except e0; violated on {} edge(s), first at ({a}, {b})",
            h0_bad.len()
        )));
    }
    let z = du_dart(d0) - project_pi(du_dart(d0));
    if (z - z.round()).abs() > DEFAULT_TOLERANCE || z.round() as i64 != -k {
        return Err(Error::PreconditionViolated(format!(
            "boundary defect {z} at e0 does not offset the singular curl {k}"
        )));
    }

    let mut seeds = BTreeMap::new();
    for v in c.boundary_vertices() {
        seeds.insert(v, u.value(v));
    }

    if k == 0 {
        return integrate_from_seeds(c, &seeds, alpha, DEFAULT_TOLERANCE);
    }

    // Branch cut: reroute the curl from f0 out through e0, then rewrite the
    // boundary differentials exactly so the pinned integration is
    // consistent to the last bit on boundary-to-boundary edges.
    let beta = cut_form(c, f0, e0_index)?;
    if beta.get(d0.0, d0.1) != 1.0 {
        return Err(Error::Internal(format!(
            "branch cut does not exit through e0 ({}, {})",
            d0.0, d0.1
        )));
    }
    let mut corrected = alpha.clone();
    for ((a, b), s) in beta.iter() {
        corrected.add(a, b, -(k as f64) * s);
    }
    for &(a, b) in &boundary {
        corrected.set(a, b, du_dart((a, b)));
    }
    for f in 0..c.face_count() {
        // Residual curls are at the roundoff scale; a sign slip in the cut
        // form would leave an integer-sized residue, far above this gate.
        if c.curl(&corrected, f).abs() > 1e-6 {
            return Err(Error::Internal(format!(
                "cut-corrected form still has curl {} on face {f}",
                c.curl(&corrected, f)
            )));
        }
    }

    let rebuilt = integrate_from_seeds(c, &seeds, &corrected, DEFAULT_TOLERANCE)?;
    for (a, b) in c.edge_pairs() {
        let d = rebuilt.value(b) - rebuilt.value(a);
        if (project_pi(d) - alpha.get(a, b)).abs() > 10.0 * DEFAULT_TOLERANCE {
            return Err(Error::Internal(format!(
                "projection identity failed on edge ({a}, {b}); this happens \
                 only when the form carries exactly ±1/2 across the branch cut"
            )));
        }
    }
    Ok(rebuilt)
}

/// Integer 1-form supported on the edges crossed by a shortest dual path
/// from face `f0` to the pendant dual vertex of boundary edge `e0_index`.
///
/// Each crossing carries `+1` when the path traverses the dual edge from
/// its source face (the face left of the stored orientation) and `-1`
/// otherwise, so the form has curl `+1` on `f0`, curl `0` on every other
/// bounded face, and value `+1` on `e0` in boundary orientation.
fn cut_form(c: &PlanarComplex, f0: usize, e0_index: usize) -> Result<OneForm> {
    let dual = dual::dualize(c)?;
    let n = dual.vertex_count();
    let mut adj: Vec<Vec<(u32, usize, bool)>> = vec![Vec::new(); n];
    for (i, e) in dual.edges().iter().enumerate() {
        if e.src == e.dst {
            continue; // a loop never advances the path
        }
        adj[e.src as usize].push((e.dst, i, true));
        adj[e.dst as usize].push((e.src, i, false));
    }
    for row in adj.iter_mut() {
        row.sort_unstable();
    }

    let start = dual.face_vertex(f0);
    let target = dual.boundary_vertex(e0_index);
    let mut parent: Vec<Option<(u32, usize, bool)>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut queue = VecDeque::from([start]);
    'bfs: while let Some(v) = queue.pop_front() {
        for &(w, i, forward) in &adj[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                parent[w as usize] = Some((v, i, forward));
                if w == target {
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
    }
    if !seen[target as usize] {
        return Err(Error::Internal(format!(
            "no dual path from face {f0} to boundary edge index {e0_index}"
        )));
    }

    let mut beta = OneForm::new();
    let mut w = target;
    while w != start {
        let (v, i, forward) = parent[w as usize].expect("visited vertices have parents");
        let e = &dual.edges()[i];
        beta.set(e.along.0, e.along.1, if forward { 1.0 } else { -1.0 });
        w = v;
    }
    Ok(beta)
}

/// Breadth-first integration from pinned seed values.
///
/// Seed values are copied bitwise; every other vertex gets the seed value
/// plus the sum of `alpha` along the tree path. Afterwards every edge of
/// the complex is checked for consistency within `check_tol`, which callers
/// scale by the residual curl they allowed through their gates.
fn integrate_from_seeds(
    c: &PlanarComplex,
    seeds: &BTreeMap<u32, f64>,
    alpha: &OneForm,
    check_tol: f64,
) -> Result<VertexFunction> {
    let mut out = VertexFunction::new();
    let mut queue = VecDeque::new();
    for (&v, &value) in seeds {
        out.set(v, value);
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        let mut nbrs = c.neighbors_ccw(v);
        nbrs.sort_unstable();
        for w in nbrs {
            if !out.contains(w) {
                out.set(w, out.value(v) + alpha.get(v, w));
                queue.push_back(w);
            }
        }
    }
    if out.len() != c.vertex_count() {
        return Err(Error::Disconnected(
            "integration did not reach every vertex".into(),
        ));
    }
    for (a, b) in c.edge_pairs() {
        let defect = out.value(b) - out.value(a) - alpha.get(a, b);
        if defect.abs() > check_tol {
            return Err(Error::Internal(format!(
                "integration inconsistent on edge ({a}, {b}): defect {defect}"
            )));
        }
    }
    Ok(out)
}
