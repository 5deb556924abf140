//! End-to-end dipole removal: from a vertex field on an admissible complex
//! to a cleaned field with the same boundary values.
//!
//! The run proceeds in fixed stages: project the differential bondwise,
//! classify the boundary datum, push the projected form onto the dual
//! graph, cancel interior charges against each other (zero winding) or
//! collapse them onto a single face (winding ±1) with the max-flow removal
//! machinery, pull the repaired form back, and reintegrate it into a vertex
//! field that matches the input on every boundary vertex bitwise.
//!
//! The output never pays more than the input on any bond: `|π(dũ)| ≤
//! |π(du)|` edge by edge, so the energy drops simultaneously for every
//! nondecreasing bond-energy profile.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::complex::PlanarComplex;
use crate::dual::{dualize, DualForm, DualGraph};
use crate::error::{Error, Result};
use crate::flow::Graph;
use crate::forms::{differential, project_pi, OneForm, VertexFunction};
use crate::reconstruct::reconstruct_with_singularity;
use crate::removal::{
    remove_dipoles_unit_flux, remove_dipoles_zero_flux, ChargedGraph, RemovalCertificate, X0Rule,
};
use crate::tol::DEFAULT_TOLERANCE;

/// Boundary-datum classification.
///
/// `wrapped` lists the boundary darts where `π(du)` differs from `du`
/// (detected exactly: the projection is error-free).  `winding` is the
/// integer circulation of `π(du)` around the boundary; `projected_tv` is
/// `Σ|π(du)|` over the boundary cycle.  `dipole_class` holds when the
/// winding vanishes and the total variation stays within 1; `vortex_class`
/// holds when the winding is ±1 and the total variation equals 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    pub wrapped: Vec<(u32, u32)>,
    pub single_wrap: bool,
    pub winding: i64,
    pub projected_tv: f64,
    pub dipole_class: bool,
    pub vortex_class: bool,
}

/// Classify the boundary values of `u` on the outer cycle of `c`.  Only
/// boundary vertices are read.
pub fn classify_boundary(
    c: &PlanarComplex,
    u: &VertexFunction,
    tolerance: f64,
) -> Result<BoundaryReport> {
    let tol = if tolerance > 0.0 {
        tolerance
    } else {
        DEFAULT_TOLERANCE
    };
    let mut wrapped = Vec::new();
    let mut circ = 0.0;
    let mut tv = 0.0;
    for (a, b) in c.boundary_edges() {
        let ua = u
            .get(a)
            .ok_or_else(|| Error::InvalidInput(format!("no value at boundary vertex {a}")))?;
        let ub = u
            .get(b)
            .ok_or_else(|| Error::InvalidInput(format!("no value at boundary vertex {b}")))?;
        let du = ub - ua;
        let p = project_pi(du);
        if p != du {
            wrapped.push((a, b));
        }
        circ += p;
        tv += p.abs();
    }
    let winding = circ.round();
    if (circ - winding).abs() > tol.max(1e-9) {
        return Err(Error::InvalidInput(format!(
            "boundary circulation {circ} does not round to an integer; \
             the vertex values are too large for reliable rounding"
        )));
    }
    let winding = winding as i64;
    Ok(BoundaryReport {
        single_wrap: wrapped.len() <= 1,
        wrapped,
        winding,
        projected_tv: tv,
        dipole_class: winding == 0 && tv <= 1.0 + tol,
        vortex_class: winding.abs() == 1 && (tv - 1.0).abs() <= tol,
    })
}

/// Everything a caller may want to audit about one pipeline run.
#[derive(Clone, Debug)]
pub struct PipelineReport {
    /// Boundary classification of the input datum.
    pub boundary: BoundaryReport,
    /// Flux of the pushed form through the dual boundary.
    pub dual_flux: f64,
    /// Total variation of the pushed form over the dual boundary.
    pub dual_boundary_tv: f64,
    /// Certificate of the removal stage.
    pub certificate: RemovalCertificate,
    /// Face carrying the surviving charge, when the winding is ±1.
    pub singular_face: Option<usize>,
    /// The surviving total charge (the boundary winding).
    pub singular_charge: i64,
    /// A bond on which the output is strictly cheaper than the input, when
    /// one exists.
    pub witness: Option<(u32, u32)>,
    /// Max of `|π(dũ)| / |π(du)|` over bonds with `|π(du)| > 1e-9`.
    pub max_edge_ratio: f64,
}

/// Run the removal pipeline with the default tolerance and the
/// deterministic lowest-id charge placement.
pub fn run(c: &PlanarComplex, u: &VertexFunction) -> Result<(VertexFunction, PipelineReport)> {
    run_with(c, u, DEFAULT_TOLERANCE, X0Rule::LowestId)
}

/// Run the removal pipeline.
///
/// Requires an admissible complex, a total vertex field whose boundary
/// datum wraps on at most one bond, and a boundary winding in `{0, ±1}`
/// with the matching total-variation budget (within 1 for winding 0,
/// exactly 1 for winding ±1).  Hypothesis failures name the violated
/// clause.
///
/// Returns the rebuilt field and the audit report.  Guarantees: the output
/// equals the input on every boundary vertex bitwise; `|π(dũ)| ≤ |π(du)|`
/// on every bond; the projected differential of the output is curl-free on
/// every face except, for winding ±1, the single reported face where the
/// curl is the winding.
pub fn run_with(
    c: &PlanarComplex,
    u: &VertexFunction,
    tolerance: f64,
    rule: X0Rule,
) -> Result<(VertexFunction, PipelineReport)> {
    let tol = if tolerance > 0.0 {
        tolerance
    } else {
        DEFAULT_TOLERANCE
    };
    c.require_admissible()?;
    let du = differential(u, c.edge_pairs())?;
    let alpha = du.project();

    let boundary = classify_boundary(c, u, tol)?;
    if !boundary.single_wrap {
        return Err(Error::HypothesisViolated(format!(
            "the boundary datum wraps on {} bonds; at most one may wrap",
            boundary.wrapped.len()
        )));
    }
    let s = boundary.winding;
    if s.abs() > 1 {
        return Err(Error::HypothesisViolated(format!(
            "boundary winding {s} is outside the treatable classes 0 and ±1"
        )));
    }

    let dual = dualize(c)?;
    let phi = dual.push_form(&alpha);
    let dual_flux = dual.flux(&phi);
    let dual_boundary_tv = dual.boundary_tv(&phi);

    let (graph, merged, groups) = merge_parallel(&dual, &phi);
    let pendants: BTreeSet<u32> = (0..dual.boundary_count())
        .map(|k| dual.boundary_vertex(k))
        .collect();
    let cg = ChargedGraph::new(graph, pendants, merged)?;

    let (gamma_merged, certificate, x0) = if s == 0 {
        let r = remove_dipoles_zero_flux(&cg, tol)?;
        (r.gamma, r.certificate, None)
    } else {
        let r = remove_dipoles_unit_flux(&cg, tol, rule)?;
        (r.gamma, r.certificate, Some(r.x0))
    };

    let out_phi = split_back(&dual, &phi, &gamma_merged, &groups)?;
    let corrected = dual.pull_form(&out_phi);

    let (f0, singular_face) = match x0 {
        None => (0usize, None),
        Some(x0) => {
            let f = dual.face_of_vertex(x0).ok_or_else(|| {
                Error::Internal(format!(
                    "the collapsed charge sits on dual vertex {x0}, which is not a face"
                ))
            })?;
            (f, Some(f))
        }
    };
    let e0 = if let Some(&d) = boundary.wrapped.first() {
        d
    } else {
        c.boundary_edges()[0]
    };
    let utilde = reconstruct_with_singularity(c, u, &corrected, f0, e0)?;

    // Audit the advertised guarantees before handing the field back.
    for v in c.boundary_vertices() {
        if utilde.value(v) != u.value(v) {
            return Err(Error::Internal(format!(
                "boundary vertex {v} changed from {} to {}",
                u.value(v),
                utilde.value(v)
            )));
        }
    }
    let du_out = differential(&utilde, c.edge_pairs())?;
    let alpha_out = du_out.project();
    let mut max_ratio: f64 = 0.0;
    let mut witness = None;
    for (a, b) in c.edge_pairs() {
        let pa = alpha.get(a, b).abs();
        let pd = alpha_out.get(a, b).abs();
        if pd > pa + tol.max(1e-9) {
            return Err(Error::Internal(format!(
                "bond ({a}, {b}) grew from {pa} to {pd}"
            )));
        }
        if pa > 1e-9 {
            max_ratio = max_ratio.max(pd / pa);
        }
        if witness.is_none() && pd < pa - 1e-10 {
            witness = Some((a, b));
        }
    }
    for f in 0..c.face_count() {
        let want = if Some(f) == singular_face { s as f64 } else { 0.0 };
        let got = c.curl(&alpha_out, f);
        if (got - want).abs() > tol.max(1e-9) {
            return Err(Error::Internal(format!(
                "face {f} carries curl {got} after removal, expected {want}"
            )));
        }
    }

    Ok((
        utilde,
        PipelineReport {
            boundary,
            dual_flux,
            dual_boundary_tv,
            certificate,
            singular_face,
            singular_charge: s,
            witness,
            max_edge_ratio: max_ratio,
        },
    ))
}

type Groups = BTreeMap<(u32, u32), Vec<usize>>;

/// Collapse the dual multigraph to a simple graph: parallel dual edges
/// between the same pair of dual vertices merge by summing their values,
/// and dangling-edge loops are left out entirely (they border no second
/// face, so no charge can move across them).
fn merge_parallel(dual: &DualGraph, phi: &DualForm) -> (Graph, OneForm, Groups) {
    let mut g = Graph::new();
    let mut merged = OneForm::new();
    let mut groups: Groups = BTreeMap::new();
    for (k, e) in dual.edges().iter().enumerate() {
        if e.src == e.dst {
            continue;
        }
        g.add_edge(e.src, e.dst);
        merged.add(e.src, e.dst, phi.values[k]);
        groups
            .entry((e.src.min(e.dst), e.src.max(e.dst)))
            .or_default()
            .push(k);
    }
    (g, merged, groups)
}

/// Distribute the merged flow back over the parallel dual edges, keeping
/// each share within the input's absolute value on that edge.  Loops keep
/// their input value: nothing was removed across them.
fn split_back(
    dual: &DualGraph,
    phi: &DualForm,
    gamma: &OneForm,
    groups: &Groups,
) -> Result<DualForm> {
    let mut out = DualForm {
        values: phi.values.clone(),
    };
    for (&(p, q), idxs) in groups {
        let target = gamma.get(p, q);
        if idxs.len() == 1 {
            let k = idxs[0];
            let e = &dual.edges()[k];
            out.values[k] = if e.src == p { target } else { -target };
            continue;
        }
        let mut shares = vec![0.0; idxs.len()];
        let mut remaining = target;
        for (slot, &k) in idxs.iter().enumerate() {
            let cap = phi.values[k].abs();
            let s = remaining.clamp(-cap, cap);
            shares[slot] = s;
            remaining -= s;
        }
        if remaining != 0.0 {
            // Floating-point slack from the clamping; park it wherever
            // capacity is left.
            for (slot, &k) in idxs.iter().enumerate() {
                let cap = phi.values[k].abs();
                let add = remaining.clamp(-cap - shares[slot], cap - shares[slot]);
                shares[slot] += add;
                remaining -= add;
                if remaining == 0.0 {
                    break;
                }
            }
            if remaining.abs() > 1e-9 {
                return Err(Error::Internal(format!(
                    "cannot split flow {target} across the parallel dual edges between {p} and {q}"
                )));
            }
        }
        for (slot, &k) in idxs.iter().enumerate() {
            let e = &dual.edges()[k];
            out.values[k] = if e.src == p {
                shares[slot]
            } else {
                -shares[slot]
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{
        discretize, energy, relax, star_boundary, star_field, vorticity, Domain, EnergyProfile,
        LatticeDomain,
    };

    fn square(half: f64, eps: f64) -> LatticeDomain {
        let h = half;
        discretize(
            &Domain::Polygon(vec![(-h, -h), (h, -h), (h, h), (-h, h)]),
            eps,
        )
        .unwrap()
    }

    fn flat(dom: &LatticeDomain, value: f64) -> VertexFunction {
        let mut u = VertexFunction::new();
        for v in dom.complex().vertex_ids() {
            u.set(v, value);
        }
        u
    }

    #[test]
    fn constant_field_passes_through_unchanged() {
        let dom = square(1.0, 0.5);
        let u = flat(&dom, 0.37);
        let (out, report) = run(dom.complex(), &u).unwrap();
        for v in dom.complex().vertex_ids() {
            assert_eq!(out.value(v), 0.37);
        }
        assert_eq!(report.singular_charge, 0);
        assert_eq!(report.singular_face, None);
        assert!(report.boundary.dipole_class);
        assert_eq!(report.witness, None);
    }

    #[test]
    fn star_datum_keeps_exactly_one_vortex() {
        let dom = square(1.0, 0.125);
        let seeded = star_field(&dom, |t| t).unwrap();
        let u = relax(&seeded, &dom, &EnergyProfile::sd(), 3).unwrap();
        let (out, report) = run(dom.complex(), &u).unwrap();

        let m = vorticity(&out, &dom).unwrap();
        assert_eq!(m.total(), 1);
        assert_eq!(m.support_len(), 1);
        let f0 = report.singular_face.unwrap();
        let cell = dom.cell_of_face(f0).unwrap();
        assert_eq!(m.charge(cell), 1);
        assert_eq!(report.singular_charge, 1);
        assert!(report.boundary.vortex_class);
        assert!(report.max_edge_ratio <= 1.0 + 1e-12);

        for v in dom.boundary_vertices() {
            assert_eq!(out.value(v), u.value(v));
        }
        for profile in [EnergyProfile::sd(), EnergyProfile::xy()] {
            let before = energy(&u, &dom, &profile).unwrap();
            let after = energy(&out, &dom, &profile).unwrap();
            assert!(
                after <= before + 1e-9,
                "{}: {after} > {before}",
                profile.name()
            );
        }
    }

    #[test]
    fn interior_dipole_is_removed_with_a_strict_witness() {
        let dom = square(1.0, 0.25);
        let mut u = flat(&dom, 0.0);
        // A wrapped interior bond: the flanking cells pick up charges ±1.
        let a = dom.vertex_at((0, 0)).unwrap();
        let b = dom.vertex_at((1, 0)).unwrap();
        u.set(a, 0.3);
        u.set(b, -0.3);
        let m_in = vorticity(&u, &dom).unwrap();
        assert_eq!(m_in.support_len(), 2);
        assert_eq!(m_in.total(), 0);

        let (out, report) = run(dom.complex(), &u).unwrap();
        let m_out = vorticity(&out, &dom).unwrap();
        assert!(m_out.is_empty());
        assert!(report.witness.is_some());
        let sd = EnergyProfile::sd();
        let before = energy(&u, &dom, &sd).unwrap();
        let after = energy(&out, &dom, &sd).unwrap();
        assert!(after < before, "expected a strict drop: {after} vs {before}");
        for v in dom.boundary_vertices() {
            assert_eq!(out.value(v), u.value(v));
        }
    }

    #[test]
    fn rerunning_on_the_output_is_stable() {
        let dom = square(1.0, 0.125);
        let u = star_field(&dom, |t| t).unwrap();
        let (out, _) = run(dom.complex(), &u).unwrap();
        let (again, report) = run(dom.complex(), &out).unwrap();
        let m1 = vorticity(&out, &dom).unwrap();
        let m2 = vorticity(&again, &dom).unwrap();
        assert_eq!(m1, m2);
        assert!(report.max_edge_ratio <= 1.0 + 1e-12);
        for profile in [EnergyProfile::sd(), EnergyProfile::xy()] {
            let before = energy(&out, &dom, &profile).unwrap();
            let after = energy(&again, &dom, &profile).unwrap();
            assert!(after <= before + 1e-9);
        }
    }

    #[test]
    fn violated_hypotheses_name_the_clause() {
        let dom = square(1.0, 0.5);

        // Two wrapped boundary bonds.
        let mut u = flat(&dom, 0.0);
        let nw = dom.vertex_at((-2, 2)).unwrap();
        u.set(nw, 0.7);
        let err = run(dom.complex(), &u).unwrap_err();
        assert!(
            matches!(err, Error::HypothesisViolated(ref m) if m.contains("wrap")),
            "{err}"
        );

        // Boundary winding 2.
        let cycle: Vec<(u32, u32)> = dom.complex().boundary_edges();
        let n = cycle.len();
        let mut u = flat(&dom, 0.0);
        for (k, &(a, _)) in cycle.iter().enumerate() {
            u.set(a, 2.0 * k as f64 / n as f64);
        }
        let err = run(dom.complex(), &u).unwrap_err();
        assert!(
            matches!(err, Error::HypothesisViolated(ref m) if m.contains("winding")),
            "{err}"
        );

        // Zero winding but boundary variation beyond 1.
        let mut u = flat(&dom, 0.0);
        for (k, &(a, _)) in cycle.iter().enumerate() {
            // A tent profile: up to 0.6 and back down, total variation 1.2.
            let t = k as f64 / n as f64;
            u.set(a, 0.6 * (1.0 - (2.0 * t - 1.0).abs()));
        }
        let err = run(dom.complex(), &u).unwrap_err();
        assert!(
            matches!(err, Error::HypothesisViolated(ref m) if m.contains("boundary variation")),
            "{err}"
        );
    }

    #[test]
    fn single_cell_vortex_is_already_clean() {
        // The pipeline is complex-generic; run it on a bare square.
        let c = PlanarComplex::build(
            &[
                (0, 0.0, 0.0),
                (1, 1.0, 0.0),
                (2, 1.0, 1.0),
                (3, 0.0, 1.0),
            ],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
        )
        .unwrap();
        let u = VertexFunction::from_pairs([(0, 0.0), (1, 0.25), (2, 0.5), (3, 0.75)]);
        let (out, report) = run(&c, &u).unwrap();
        for v in 0..4 {
            assert_eq!(out.value(v), u.value(v));
        }
        assert_eq!(report.singular_face, Some(0));
        assert_eq!(report.singular_charge, 1);
        assert_eq!(report.max_edge_ratio, 1.0);
    }

    #[test]
    fn boundary_classifier_matches_the_lattice_report() {
        let dom = square(1.0, 0.25);
        let u = star_boundary(&dom, |t| t).unwrap();
        let a = classify_boundary(dom.complex(), &u, 1e-9).unwrap();
        let b = crate::lattice::boundary_report(&u, &dom, 1e-9).unwrap();
        assert_eq!(a, b);
    }
}
