//! Brute-force oracles used to cross-check the flow and removal engines.
//!
//! Both oracles are deliberately independent of the engine code paths: the
//! cut oracle enumerates edge subsets, the form oracle propagates forced
//! values. They are slow and size-capped, and exist so that engine results
//! can be verified by a second route.

use crate::error::{Error, Result};
use crate::flow::{Capacities, Graph};
use crate::forms::OneForm;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Exhaustive enumeration cap for [`brute_min_cut`]: inputs with more
/// undirected edges are refused rather than silently approximated.
pub const BRUTE_EDGE_CAP: usize = 14;

/// Minimum-capacity edge set separating `v1` from `v2`, found by trying
/// every subset of edges. Returns the optimal value and one optimal cut
/// (the first in subset-enumeration order).
pub fn brute_min_cut(
    g: &Graph,
    cap: &Capacities,
    v1: &BTreeSet<u32>,
    v2: &BTreeSet<u32>,
) -> Result<(f64, Vec<(u32, u32)>)> {
    if v1.is_empty() || v2.is_empty() {
        return Err(Error::BadTerminals("empty terminal set".into()));
    }
    if v1.intersection(v2).next().is_some() {
        return Err(Error::BadTerminals("terminal sets overlap".into()));
    }
    let edges: Vec<(u32, u32)> = g.edges().collect();
    if edges.len() > BRUTE_EDGE_CAP {
        return Err(Error::TooLarge(format!(
            "{} edges exceeds the {BRUTE_EDGE_CAP}-edge enumeration cap",
            edges.len()
        )));
    }

    let separates = |mask: usize| -> bool {
        let mut seen: BTreeSet<u32> = v1.clone();
        let mut queue: VecDeque<u32> = v1.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            if v2.contains(&v) {
                return false;
            }
            for w in g.neighbors(v) {
                let (a, b) = (v.min(w), v.max(w));
                let idx = edges.binary_search(&(a, b)).unwrap();
                if mask & (1 << idx) != 0 {
                    continue;
                }
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        true
    };

    let mut best: Option<(f64, usize)> = None;
    for mask in 0..(1usize << edges.len()) {
        let value: f64 = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &(a, b))| cap.get(a, b))
            .sum();
        if let Some((bv, _)) = best {
            if value >= bv {
                continue;
            }
        }
        if separates(mask) {
            best = Some((value, mask));
        }
    }
    let Some((value, mask)) = best else {
        return Err(Error::BadTerminals(
            "terminals cannot be separated (shared vertex)".into(),
        ));
    };
    let cut = edges
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &e)| e)
        .collect();
    Ok((value, cut))
}

/// Outcome of [`forced_form`].
#[derive(Debug, Clone, PartialEq)]
pub enum ForcedVerdict {
    /// The constraints admit exactly one form; here it is.
    Forced(OneForm),
    /// Some edges are not determined by leaf propagation (a cycle of free
    /// edges remains); the oracle does not decide.
    Indeterminate,
    /// No form satisfies the constraints.
    Infeasible,
}

/// Decide, where propagation suffices, the unique form `gamma` with
///
/// * `gamma = alpha` on every edge touching a boundary vertex,
/// * divergence at each interior vertex equal to `targets` (0 if absent),
/// * `|gamma(e)| <= |alpha(e)|` on every edge.
///
/// Works by repeatedly fixing edges at degree-one vertices of the
/// undetermined subgraph, then checking all constraints. Tree-like regions
/// are always decided; leftover free cycles give `Indeterminate`.
pub fn forced_form(
    g: &Graph,
    boundary: &BTreeSet<u32>,
    alpha: &OneForm,
    targets: &BTreeMap<u32, f64>,
    tol: f64,
) -> Result<ForcedVerdict> {
    let mut gamma = OneForm::new();
    let mut free: BTreeSet<(u32, u32)> = g.edges().collect();

    for &v in boundary {
        if !g.contains_vertex(v) {
            return Err(Error::InvalidInput(format!(
                "boundary vertex {v} is not a graph vertex"
            )));
        }
        for w in g.neighbors(v) {
            gamma.set(v, w, alpha.get(v, w));
            free.remove(&(v.min(w), v.max(w)));
        }
    }

    loop {
        let mut progressed = false;
        let interior: Vec<u32> = g.vertices().filter(|v| !boundary.contains(v)).collect();
        for &v in &interior {
            let undecided: Vec<u32> = g
                .neighbors(v)
                .filter(|&w| free.contains(&(v.min(w), v.max(w))))
                .collect();
            if undecided.len() != 1 {
                continue;
            }
            let w = undecided[0];
            let target = targets.get(&v).copied().unwrap_or(0.0);
            let known: f64 = g
                .neighbors(v)
                .filter(|&x| x != w)
                .map(|x| gamma.get(v, x))
                .sum();
            let value = target - known;
            if value.abs() > alpha.get(v, w).abs() + tol {
                return Ok(ForcedVerdict::Infeasible);
            }
            gamma.set(v, w, value);
            free.remove(&(v.min(w), v.max(w)));
            progressed = true;
        }
        if !progressed {
            break;
        }
    }

    if !free.is_empty() {
        return Ok(ForcedVerdict::Indeterminate);
    }

    // Every edge is pinned; verify the remaining divergence constraints.
    for v in g.vertices() {
        if boundary.contains(&v) {
            continue;
        }
        let target = targets.get(&v).copied().unwrap_or(0.0);
        let d: f64 = g.neighbors(v).map(|x| gamma.get(v, x)).sum();
        if (d - target).abs() > tol {
            return Ok(ForcedVerdict::Infeasible);
        }
    }
    for ((a, b), v) in gamma.iter() {
        if v.abs() > alpha.get(a, b).abs() + tol {
            return Ok(ForcedVerdict::Infeasible);
        }
    }
    Ok(ForcedVerdict::Forced(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[u32]) -> BTreeSet<u32> {
        vs.iter().copied().collect()
    }

    #[test]
    fn cut_chain_bottleneck() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b, w) in [(0, 1, 0.6), (1, 2, 0.4), (2, 3, 0.6)] {
            g.add_edge(a, b);
            c.set(a, b, w);
        }
        let (value, cut) = brute_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        assert!((value - 0.4).abs() < 1e-15);
        assert_eq!(cut, vec![(1, 2)]);
    }

    #[test]
    fn cut_k4() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for a in 0..4u32 {
            for b in (a + 1)..4 {
                g.add_edge(a, b);
                c.set(a, b, 1.0);
            }
        }
        let (value, cut) = brute_min_cut(&g, &c, &set(&[0]), &set(&[3])).unwrap();
        assert!((value - 3.0).abs() < 1e-15);
        assert_eq!(cut.len(), 3);
    }

    #[test]
    fn cut_square_opposite_corners() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for (a, b) in [(0, 1), (1, 2), (0, 3), (3, 2)] {
            g.add_edge(a, b);
            c.set(a, b, 0.3);
        }
        let (value, _) = brute_min_cut(&g, &c, &set(&[0]), &set(&[2])).unwrap();
        assert!((value - 0.6).abs() < 1e-15);
    }

    #[test]
    fn cut_size_cap() {
        let mut g = Graph::new();
        let mut c = Capacities::new();
        for i in 0..15u32 {
            g.add_edge(i, i + 1);
            c.set(i, i + 1, 1.0);
        }
        assert!(matches!(
            brute_min_cut(&g, &c, &set(&[0]), &set(&[15])),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn cut_shared_vertex_inseparable() {
        let mut g = Graph::new();
        g.add_edge(0, 1);
        let c = Capacities::new();
        // v2 contains a v1 vertex: rejected up front
        assert!(matches!(
            brute_min_cut(&g, &c, &set(&[0]), &set(&[0])),
            Err(Error::BadTerminals(_))
        ));
    }

    /// path a(0) - x(1) - y(2) - b(3), boundary {a, b},
    /// alpha = (0.2, -0.8, 0.2)
    fn dipole_chain() -> (Graph, BTreeSet<u32>, OneForm) {
        let mut g = Graph::new();
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            g.add_edge(a, b);
        }
        let mut alpha = OneForm::new();
        alpha.set(0, 1, 0.2);
        alpha.set(1, 2, -0.8);
        alpha.set(2, 3, 0.2);
        (g, set(&[0, 3]), alpha)
    }

    #[test]
    fn forced_preserving_divergences_returns_alpha() {
        let (g, boundary, alpha) = dipole_chain();
        // divergence of alpha: -1 at x, +1 at y
        let targets = BTreeMap::from([(1, -1.0), (2, 1.0)]);
        let v = forced_form(&g, &boundary, &alpha, &targets, 1e-9).unwrap();
        assert_eq!(v, ForcedVerdict::Forced(alpha));
    }

    #[test]
    fn forced_zero_divergence_flattens_dipole() {
        let (g, boundary, alpha) = dipole_chain();
        let v = forced_form(&g, &boundary, &alpha, &BTreeMap::new(), 1e-9).unwrap();
        let ForcedVerdict::Forced(gamma) = v else {
            panic!("expected a forced form, got {v:?}");
        };
        assert!((gamma.get(0, 1) - 0.2).abs() < 1e-15);
        assert!((gamma.get(1, 2) - 0.2).abs() < 1e-12);
        assert!((gamma.get(2, 3) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn forced_infeasible_when_target_exceeds_band() {
        let (g, boundary, alpha) = dipole_chain();
        let targets = BTreeMap::from([(1, 5.0)]);
        let v = forced_form(&g, &boundary, &alpha, &targets, 1e-9).unwrap();
        assert_eq!(v, ForcedVerdict::Infeasible);
    }

    #[test]
    fn forced_inconsistent_closure_is_infeasible() {
        // star: boundary 0 and 2 pin both edges at vertex 1; the pinned
        // values cannot meet a nonzero divergence target at 1
        let mut g = Graph::new();
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let mut alpha = OneForm::new();
        alpha.set(0, 1, 0.3);
        alpha.set(1, 2, 0.3);
        let targets = BTreeMap::from([(1, 0.5)]);
        let v = forced_form(&g, &set(&[0, 2]), &alpha, &targets, 1e-9).unwrap();
        assert_eq!(v, ForcedVerdict::Infeasible);
    }

    #[test]
    fn interior_cycle_is_indeterminate() {
        // boundary 0 hangs off a free interior triangle 1-2-3
        let mut g = Graph::new();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 1)] {
            g.add_edge(a, b);
        }
        let mut alpha = OneForm::new();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 1)] {
            alpha.set(a, b, 0.25);
        }
        let v = forced_form(&g, &set(&[0]), &alpha, &BTreeMap::new(), 1e-9).unwrap();
        assert_eq!(v, ForcedVerdict::Indeterminate);
    }
}
