//! Vertex functions and antisymmetric 1-forms on graphs.
//!
//! A 1-form assigns a value to every oriented edge with `a(j,i) = -a(i,j)`.
//! Storage is one f64 per unordered edge, keyed by the ordered pair
//! `(min, max)`; lookups against the opposite orientation negate.

use crate::error::{Error, Result};
use crate::flow::Graph;
use std::collections::{BTreeMap, BTreeSet};

/// Nearest-integer remainder: `pi(y) = y - z` where `z` is the integer
/// closest to `y`. At half-integer ties the remainder keeps the sign of
/// `y`, so `pi` is odd and `|pi(y)|` equals the distance from `y` to the
/// integers exactly (the floor/remainder arithmetic below is error-free).
pub fn project_pi(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let a = y.abs();
    let r = a - a.floor();
    let p = if r > 0.5 { r - 1.0 } else { r };
    if y > 0.0 {
        p
    } else {
        -p
    }
}

/// A real-valued function on vertex ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VertexFunction {
    vals: BTreeMap<u32, f64>,
}

impl VertexFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, f64)>>(pairs: I) -> Self {
        Self {
            vals: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, v: u32) -> Option<f64> {
        self.vals.get(&v).copied()
    }

    /// Value at `v`; the vertex must be present.
    pub fn value(&self, v: u32) -> f64 {
        self.vals[&v]
    }

    pub fn set(&mut self, v: u32, value: f64) {
        self.vals.insert(v, value);
    }

    pub fn contains(&self, v: u32) -> bool {
        self.vals.contains_key(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.vals.iter().map(|(&v, &x)| (v, x))
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }
}

/// An antisymmetric 1-form; absent edges read as zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OneForm {
    vals: BTreeMap<(u32, u32), f64>,
}

fn key(i: u32, j: u32) -> ((u32, u32), f64) {
    debug_assert_ne!(i, j, "1-forms live on loop-free graphs");
    if i < j {
        ((i, j), 1.0)
    } else {
        ((j, i), -1.0)
    }
}

impl OneForm {
    pub fn new() -> Self {
        Self::default()
    }

    /// Value on the oriented edge `(i, j)`.
    pub fn get(&self, i: u32, j: u32) -> f64 {
        let (k, s) = key(i, j);
        self.vals.get(&k).map(|&v| s * v).unwrap_or(0.0)
    }

    pub fn set(&mut self, i: u32, j: u32, value: f64) {
        let (k, s) = key(i, j);
        self.vals.insert(k, s * value);
    }

    pub fn add(&mut self, i: u32, j: u32, value: f64) {
        let (k, s) = key(i, j);
        *self.vals.entry(k).or_insert(0.0) += s * value;
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        self.vals.contains_key(&key(i, j).0)
    }

    pub fn remove(&mut self, i: u32, j: u32) {
        self.vals.remove(&key(i, j).0);
    }

    /// Iterate stored edges as `((a, b), value)` with `a < b`.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.vals.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn scaled(&self, s: f64) -> OneForm {
        OneForm {
            vals: self.vals.iter().map(|(&k, &v)| (k, s * v)).collect(),
        }
    }

    /// Edgewise difference over the union of stored edges.
    pub fn minus(&self, other: &OneForm) -> OneForm {
        let mut out = self.clone();
        for ((a, b), v) in other.iter() {
            out.add(a, b, -v);
        }
        out
    }

    /// Edgewise nearest-integer remainder.
    pub fn project(&self) -> OneForm {
        OneForm {
            vals: self
                .vals
                .iter()
                .map(|(&k, &v)| (k, project_pi(v)))
                .collect(),
        }
    }
}

/// Discrete differential `du(i, j) = u(j) - u(i)` over the given edges.
pub fn differential<I>(u: &VertexFunction, edges: I) -> Result<OneForm>
where
    I: IntoIterator<Item = (u32, u32)>,
{
    let mut out = OneForm::new();
    for (i, j) in edges {
        match (u.get(i), u.get(j)) {
            (Some(a), Some(b)) => out.set(i, j, b - a),
            _ => {
                let v = if u.get(i).is_none() { i } else { j };
                return Err(Error::InvalidInput(format!(
                    "function has no value at vertex {v}"
                )));
            }
        }
    }
    Ok(out)
}

/// Divergence of `form` at `v`: sum of `form(v, x)` over neighbors `x`.
pub fn divergence(g: &Graph, form: &OneForm, v: u32) -> f64 {
    g.neighbors(v).map(|x| form.get(v, x)).sum()
}

/// Total flux through the boundary: sum of boundary divergences.
pub fn flux(g: &Graph, boundary: &BTreeSet<u32>, form: &OneForm) -> f64 {
    boundary.iter().map(|&v| divergence(g, form, v)).sum()
}

/// Boundary total variation: sum of `|form(v, x)|` over boundary vertices
/// `v` and all their neighbors `x`. Edges joining two boundary vertices
/// count once from each end.
pub fn boundary_tv(g: &Graph, boundary: &BTreeSet<u32>, form: &OneForm) -> f64 {
    boundary
        .iter()
        .map(|&v| g.neighbors(v).map(|x| form.get(v, x).abs()).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_plain_values() {
        assert_eq!(project_pi(0.3), 0.3);
        assert_eq!(project_pi(-0.3), -0.3);
        assert_eq!(project_pi(0.7), 0.7 - 1.0);
        assert_eq!(project_pi(-0.7), -(0.7 - 1.0));
        assert_eq!(project_pi(2.25), 0.25);
        assert_eq!(project_pi(-2.25), -0.25);
        assert_eq!(project_pi(4.0), 0.0);
        assert_eq!(project_pi(0.0), 0.0);
    }

    #[test]
    fn pi_tie_rule() {
        assert_eq!(project_pi(0.5), 0.5);
        assert_eq!(project_pi(-0.5), -0.5);
        assert_eq!(project_pi(1.5), 0.5);
        assert_eq!(project_pi(-1.5), -0.5);
        assert_eq!(project_pi(7.5), 0.5);
        assert_eq!(project_pi(-7.5), -0.5);
    }

    #[test]
    fn pi_is_distance_to_integers() {
        for k in 0..2000 {
            let y = -10.0 + (k as f64) * 0.01;
            let p = project_pi(y);
            // distance to the integers, computed independently
            let dist = (0..=21)
                .map(|z| (y - (z as f64 - 10.0)).abs())
                .fold(f64::INFINITY, f64::min);
            assert!((p.abs() - dist).abs() < 1e-12, "y={y} p={p} dist={dist}");
            assert_eq!(project_pi(-y), -p, "odd at {y}");
        }
    }

    #[test]
    fn pi_integer_shift() {
        // shift invariance away from ties
        for &y in &[0.125, -0.375, 0.25, 0.4375, -0.0625] {
            for k in -3i32..=3 {
                assert_eq!(project_pi(y + k as f64), project_pi(y), "y={y} k={k}");
            }
        }
        // at ties the remainder keeps the sign of the shifted argument
        for k in -3i32..=3 {
            let y = 0.5 + k as f64;
            if y != 0.5 {
                assert_eq!(project_pi(y), 0.5_f64.copysign(y), "y={y}");
            }
        }
    }

    #[test]
    fn one_form_antisymmetry() {
        let mut a = OneForm::new();
        a.set(3, 1, 0.25);
        assert_eq!(a.get(3, 1), 0.25);
        assert_eq!(a.get(1, 3), -0.25);
        a.add(1, 3, 0.25);
        assert_eq!(a.get(3, 1), 0.0);
        assert_eq!(a.get(1, 2), 0.0);
    }

    #[test]
    fn differential_and_divergence() {
        // path 0 - 1 - 2 with u = (0, 0.6, 0.2)
        let u = VertexFunction::from_pairs([(0, 0.0), (1, 0.6), (2, 0.2)]);
        let du = differential(&u, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(du.get(0, 1), 0.6);
        assert_eq!(du.get(1, 2), 0.2 - 0.6);
        assert_eq!(du.get(2, 1), 0.6 - 0.2);

        let mut g = Graph::new();
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        assert!((divergence(&g, &du, 1) - (-0.6 + (0.2 - 0.6))).abs() < 1e-15);

        let boundary: BTreeSet<u32> = [0, 2].into_iter().collect();
        // interior divergence + flux = 0 for any form
        let total = flux(&g, &boundary, &du) + divergence(&g, &du, 1);
        assert!(total.abs() < 1e-15);
        assert!((boundary_tv(&g, &boundary, &du) - (0.6 + 0.4)).abs() < 1e-12);
    }

    #[test]
    fn differential_missing_vertex() {
        let u = VertexFunction::from_pairs([(0, 0.0)]);
        let err = differential(&u, [(0, 1)]).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
