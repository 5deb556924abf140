//! Property tests: randomized inputs against the structural invariants the
//! modules promise, with brute-force oracles where one exists.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng as _;

use defectflow::complex::{decompose_to_admissible, PlanarComplex};
use defectflow::dual::dualize;
use defectflow::flow::{max_flow_min_cut, Capacities, Graph};
use defectflow::forms::{
    boundary_tv, differential, divergence, flux, project_pi, OneForm, VertexFunction,
};
use defectflow::instances;
use defectflow::lattice::{discretize, Domain};
use defectflow::oracle::brute_min_cut;
use defectflow::removal::{remove_dipoles_zero_flux, remove_dipoles_unit_flux, X0Rule};

proptest! {
    /// The projection lands in [-1/2, 1/2] and differs from its input by an
    /// integer.
    #[test]
    fn projection_is_a_representative(y in -1.0e6f64..1.0e6) {
        let p = project_pi(y);
        prop_assert!((-0.5..=0.5).contains(&p));
        let k = y - p;
        prop_assert_eq!(k, k.round());
    }

    /// Antisymmetry of the projection away from the ties.
    #[test]
    fn projection_is_odd_off_ties(y in -1.0e3f64..1.0e3) {
        prop_assume!((y - y.round()).abs() != 0.5);
        prop_assert_eq!(project_pi(-y), -project_pi(y));
    }

    /// Projecting twice changes nothing.
    #[test]
    fn projection_is_idempotent(y in -1.0e6f64..1.0e6) {
        let p = project_pi(y);
        prop_assert_eq!(project_pi(p).to_bits(), p.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A differential has zero curl on every bounded face.
    #[test]
    fn differentials_are_curl_free(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let Some(dom) = instances::random_polyomino(&mut r, 10) else { return Ok(()); };
        let c = dom.complex();
        let u = instances::random_field(&mut r, &dom);
        let du = differential(&u, c.edge_pairs()).unwrap();
        for f in 0..c.face_count() {
            prop_assert!(c.curl(&du, f).abs() <= 1e-9);
        }
    }

    /// Summing divergences over all vertices gives zero (every edge cancels),
    /// and summing over the boundary gives the flux by definition.
    #[test]
    fn divergence_theorem(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let g = instances::random_connected_graph(&mut r, 8, 16);
        let mut form = OneForm::new();
        for (a, b) in g.edges() {
            form.set(a, b, r.gen_range(-1.0..1.0));
        }
        let total: f64 = g.vertices().map(|v| divergence(&g, &form, v)).sum();
        prop_assert!(total.abs() <= 1e-9);
        let boundary: BTreeSet<u32> = g.vertices().take(2).collect();
        let interior_sum: f64 = g
            .vertices()
            .filter(|v| !boundary.contains(v))
            .map(|v| divergence(&g, &form, v))
            .sum();
        prop_assert!((flux(&g, &boundary, &form) + interior_sum).abs() <= 1e-9);
    }

    /// Pushing a form to the dual and pulling it back is the identity.
    #[test]
    fn dual_transfer_round_trips(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let Some(dom) = instances::random_polyomino(&mut r, 10) else { return Ok(()); };
        let c = dom.complex();
        let mut alpha = OneForm::new();
        for (a, b) in c.edge_pairs() {
            alpha.set(a, b, r.gen_range(-1.0..1.0));
        }
        let dual = dualize(c).unwrap();
        let back = dual.pull_form(&dual.push_form(&alpha));
        for (a, b) in c.edge_pairs() {
            prop_assert_eq!(back.get(a, b).to_bits(), alpha.get(a, b).to_bits());
        }
    }

    /// Curl on the primal equals divergence on the dual, face by face.
    #[test]
    fn curl_is_dual_divergence(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let Some(dom) = instances::random_polyomino(&mut r, 12) else { return Ok(()); };
        let c = dom.complex();
        let mut alpha = OneForm::new();
        for (a, b) in c.edge_pairs() {
            alpha.set(a, b, r.gen_range(-1.0..1.0));
        }
        let dual = dualize(c).unwrap();
        let phi = dual.push_form(&alpha);
        for f in 0..c.face_count() {
            let lhs = c.curl(&alpha, f);
            let rhs = dual.divergence(&phi, dual.face_vertex(f));
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }

    /// Engine flow value against the exhaustive cut search.
    #[test]
    fn max_flow_matches_brute_force(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let (g, cap, v1, v2) = instances::random_flow_network(&mut r);
        let engine = max_flow_min_cut(&g, &cap, &v1, &v2).unwrap();
        let (brute, _) = brute_min_cut(&g, &cap, &v1, &v2).unwrap();
        prop_assert!((engine.value - brute).abs() <= 1e-9);
    }

    /// Flow conservation away from the terminals.
    #[test]
    fn max_flow_conserves_mass(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let (g, cap, v1, v2) = instances::random_flow_network(&mut r);
        let engine = max_flow_min_cut(&g, &cap, &v1, &v2).unwrap();
        for v in g.vertices() {
            if !v1.contains(&v) && !v2.contains(&v) {
                prop_assert!(divergence(&g, &engine.flow, v).abs() <= 1e-9);
            }
        }
    }

    /// Zero-flux removal never increases any edge and clears the interior.
    #[test]
    fn zero_flux_removal_invariants(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let Some(cg) = instances::charged_instance(&mut r, 0) else { return Ok(()); };
        prop_assume!(boundary_tv(&cg.graph, &cg.boundary, &cg.form) <= 1.0);
        let out = remove_dipoles_zero_flux(&cg, 1e-9).unwrap();
        for (a, b) in cg.graph.edges() {
            prop_assert!(out.gamma.get(a, b).abs() <= cg.form.get(a, b).abs() + 1e-12);
        }
        for v in cg.interior_vertices() {
            prop_assert!(divergence(&cg.graph, &out.gamma, v).abs() <= 1e-9);
        }
    }

    /// Unit-flux removal puts the whole flux on one interior vertex.
    #[test]
    fn unit_flux_removal_invariants(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let Some(cg) = instances::charged_instance(&mut r, 1) else { return Ok(()); };
        let out = remove_dipoles_unit_flux(&cg, 1e-9, X0Rule::LowestId).unwrap();
        let f = flux(&cg.graph, &cg.boundary, &cg.form);
        for v in cg.interior_vertices() {
            let want = if v == out.x0 { -f } else { 0.0 };
            prop_assert!((divergence(&cg.graph, &out.gamma, v) - want).abs() <= 1e-9);
        }
    }

    /// The pipeline pins the boundary bitwise and never grows an edge.
    #[test]
    fn pipeline_respects_the_boundary_and_the_edgewise_bound(seed in 0u64..1u64 << 48) {
        let mut r = instances::rng(seed);
        let Some(dom) = instances::random_polyomino(&mut r, 8) else { return Ok(()); };
        let c = dom.complex();
        let u = instances::dipole_class_field(&mut r, &dom, 0.9);
        let (out, report) = defectflow::pipeline::run(c, &u).unwrap();
        for v in c.boundary_vertices() {
            prop_assert_eq!(out.value(v).to_bits(), u.value(v).to_bits());
        }
        let before = differential(&u, c.edge_pairs()).unwrap().project();
        let after = differential(&out, c.edge_pairs()).unwrap().project();
        for (a, b) in c.edge_pairs() {
            prop_assert!(after.get(a, b).abs() <= before.get(a, b).abs() + 1e-9);
        }
        prop_assert_eq!(report.singular_face, None);
    }

    /// Discretization accepts exactly the cells whose center the domain
    /// covers; every emitted lattice is admissible.
    #[test]
    fn random_disks_discretize_admissibly(cx in -1.0f64..1.0, cy in -1.0f64..1.0, radius in 0.5f64..2.0) {
        let dom = discretize(&Domain::Disk { center: (cx, cy), radius }, 0.25);
        if let Ok(dom) = dom {
            prop_assert!(dom.complex().is_admissible());
            prop_assert!(dom.cell_count() > 0);
        }
    }
}

/// Decomposing an inadmissible complex yields admissible components that
/// partition its faces.
#[test]
fn decomposition_yields_admissible_components() {
    // Two unit cells joined by a dangling bridge edge: the bridge lies on
    // no bounded face, so splitting it off leaves two admissible squares.
    let vertices = [
        (0u32, 0.0, 0.0),
        (1, 1.0, 0.0),
        (2, 1.0, 1.0),
        (3, 0.0, 1.0),
        (4, 3.0, 0.0),
        (5, 4.0, 0.0),
        (6, 4.0, 1.0),
        (7, 3.0, 1.0),
    ];
    let edges = [
        (0u32, 1u32),
        (1, 2),
        (2, 3),
        (3, 0),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 4),
        (1, 4),
    ];
    let whole = PlanarComplex::build(&vertices, &edges).unwrap();
    assert!(!whole.is_admissible());
    let parts = decompose_to_admissible(&vertices, &edges).unwrap();
    assert_eq!(parts.len(), 2);
    let total_faces: usize = parts.iter().map(|p| p.face_count()).sum();
    assert_eq!(total_faces, whole.face_count());
    for p in &parts {
        assert!(p.is_admissible());
        assert_eq!(p.face_count(), 1);
    }
}

/// The flow engine refuses disconnected graphs and overlapping terminals.
#[test]
fn flow_engine_rejects_bad_terminals() {
    let mut g = Graph::new();
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    let mut cap = Capacities::new();
    cap.set(0, 1, 1.0);
    cap.set(2, 3, 1.0);
    let v1: BTreeSet<u32> = [0].into();
    let v2: BTreeSet<u32> = [3].into();
    assert!(max_flow_min_cut(&g, &cap, &v1, &v2).is_err());

    let mut g2 = Graph::new();
    g2.add_edge(0, 1);
    let mut cap2 = Capacities::new();
    cap2.set(0, 1, 1.0);
    let both: BTreeSet<u32> = [0].into();
    assert!(max_flow_min_cut(&g2, &cap2, &both, &both).is_err());
}

/// A constant field has zero differential, zero energy, and no charges.
#[test]
fn constant_fields_are_flat() {
    let dom = discretize(
        &Domain::Polygon(vec![(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]),
        0.5,
    )
    .unwrap();
    let mut u = VertexFunction::new();
    for v in dom.complex().vertex_ids() {
        u.set(v, 0.375);
    }
    let du = differential(&u, dom.complex().edge_pairs()).unwrap();
    for (a, b) in dom.complex().edge_pairs() {
        assert_eq!(du.get(a, b), 0.0);
    }
    assert!(defectflow::lattice::vorticity(&u, &dom).unwrap().is_empty());
}
