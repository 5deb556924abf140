//! Square-lattice discretization of planar domains.
//!
//! A region of the plane (a simple polygon or a disk) is replaced by the
//! union of closed axis-aligned cells of side `epsilon` that fit inside its
//! closure.  The cell corners become vertices, nearest-neighbour pairs become
//! bonds, and the result carries a [`PlanarComplex`] so that every
//! form/flow/reconstruction operation in this crate applies directly.
//!
//! On top of the geometry the module provides the physics bookkeeping:
//! bond energies driven by an [`EnergyProfile`], integer cell charges
//! ([`vorticity`]), boundary-datum builders ([`star_boundary`],
//! [`lift_boundary`]), a deterministic local relaxation sweep ([`relax`]),
//! and a classifier for the boundary hypotheses the removal pipeline needs
//! ([`boundary_report`]).
//!
//! Cell membership is decided in exact rational arithmetic, so a point on
//! the region's boundary never flips a cell in or out because of rounding.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::complex::PlanarComplex;
use crate::error::{Error, Result};
use crate::forms::{project_pi, VertexFunction};

type Rat = BigRational;

/// Number of evenly spaced rays used by the sampled star-shape test.
const STAR_RAY_COUNT: usize = 1000;

/// Number of grid points used to sample-check profile monotonicity.
const PROFILE_GRID: usize = 1000;

/// Safety bound on the candidate cells visited during discretization.
const MAX_CANDIDATE_CELLS: i64 = 4_000_000;

/// A bounded open region of the plane eligible for discretization.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// A simple polygon given by its vertices in order (either orientation);
    /// the closing edge from the last vertex back to the first is implied.
    Polygon(Vec<(f64, f64)>),
    /// An open disk.
    Disk { center: (f64, f64), radius: f64 },
}

fn rat(x: f64) -> Result<Rat> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!(
            "coordinate {x} is not a finite number"
        )));
    }
    BigRational::from_float(x)
        .ok_or_else(|| Error::InvalidInput(format!("coordinate {x} has no rational value")))
}

fn rint(k: i64) -> Rat {
    Rat::from_integer(BigInt::from(k))
}

fn cross(o: &(Rat, Rat), a: &(Rat, Rat), b: &(Rat, Rat)) -> Rat {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn on_segment(p: &(Rat, Rat), a: &(Rat, Rat), b: &(Rat, Rat)) -> bool {
    if !cross(a, b, p).is_zero() {
        return false;
    }
    let (xlo, xhi) = if a.0 <= b.0 { (&a.0, &b.0) } else { (&b.0, &a.0) };
    let (ylo, yhi) = if a.1 <= b.1 { (&a.1, &b.1) } else { (&b.1, &a.1) };
    *xlo <= p.0 && p.0 <= *xhi && *ylo <= p.1 && p.1 <= *yhi
}

/// Do two closed segments share at least one point?
fn segments_touch(p1: &(Rat, Rat), p2: &(Rat, Rat), p3: &(Rat, Rat), p4: &(Rat, Rat)) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    let neg = |r: &Rat| r.is_negative();
    let pos = |r: &Rat| r.is_positive();
    if ((pos(&d1) && neg(&d2)) || (neg(&d1) && pos(&d2)))
        && ((pos(&d3) && neg(&d4)) || (neg(&d3) && pos(&d4)))
    {
        return true;
    }
    (d1.is_zero() && on_segment(p1, p3, p4))
        || (d2.is_zero() && on_segment(p2, p3, p4))
        || (d3.is_zero() && on_segment(p3, p1, p2))
        || (d4.is_zero() && on_segment(p4, p1, p2))
}

/// Exact-arithmetic view of a domain, used only during discretization.
enum ExactDomain {
    Polygon(Vec<(Rat, Rat)>),
    Disk { center: (Rat, Rat), rr: Rat },
}

impl ExactDomain {
    fn new(domain: &Domain) -> Result<Self> {
        match domain {
            Domain::Polygon(pts) => {
                if pts.len() < 3 {
                    return Err(Error::InvalidInput(
                        "a polygon needs at least three vertices".into(),
                    ));
                }
                let mut exact = Vec::with_capacity(pts.len());
                for &(x, y) in pts {
                    exact.push((rat(x)?, rat(y)?));
                }
                let n = exact.len();
                for k in 0..n {
                    if exact[k] == exact[(k + 1) % n] {
                        return Err(Error::InvalidInput(format!(
                            "polygon vertices {k} and {} coincide",
                            (k + 1) % n
                        )));
                    }
                }
                for k in 0..n {
                    let a = &exact[k];
                    let b = &exact[(k + 1) % n];
                    let c = &exact[(k + 2) % n];
                    if cross(a, b, c).is_zero() {
                        let dot = (&b.0 - &a.0) * (&c.0 - &b.0) + (&b.1 - &a.1) * (&c.1 - &b.1);
                        if dot.is_negative() {
                            return Err(Error::InvalidInput(format!(
                                "polygon folds back on itself at vertex {}",
                                (k + 1) % n
                            )));
                        }
                    }
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        // Edges sharing an endpoint are adjacent, including the
                        // first/last pair around the closing corner.
                        if j == i + 1 || (i == 0 && j == n - 1) {
                            continue;
                        }
                        let (a, b) = (&exact[i], &exact[(i + 1) % n]);
                        let (c, d) = (&exact[j], &exact[(j + 1) % n]);
                        if segments_touch(a, b, c, d) {
                            return Err(Error::InvalidInput(format!(
                                "polygon is not simple: edges {i} and {j} meet"
                            )));
                        }
                    }
                }
                Ok(ExactDomain::Polygon(exact))
            }
            Domain::Disk { center, radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "disk radius must be positive and finite, got {radius}"
                    )));
                }
                let r = rat(*radius)?;
                Ok(ExactDomain::Disk {
                    center: (rat(center.0)?, rat(center.1)?),
                    rr: &r * &r,
                })
            }
        }
    }

    fn bounding_box(&self, domain: &Domain) -> (f64, f64, f64, f64) {
        match domain {
            Domain::Polygon(pts) => {
                let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
                let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
                for &(x, y) in pts {
                    xs = (xs.0.min(x), xs.1.max(x));
                    ys = (ys.0.min(y), ys.1.max(y));
                }
                (xs.0, xs.1, ys.0, ys.1)
            }
            Domain::Disk { center, radius } => (
                center.0 - radius,
                center.0 + radius,
                center.1 - radius,
                center.1 + radius,
            ),
        }
    }

    /// Is the point in the closed region?
    fn contains(&self, p: &(Rat, Rat)) -> bool {
        match self {
            ExactDomain::Disk { center, rr } => {
                let dx = &p.0 - &center.0;
                let dy = &p.1 - &center.1;
                &dx * &dx + &dy * &dy <= *rr
            }
            ExactDomain::Polygon(poly) => {
                let n = poly.len();
                for k in 0..n {
                    if on_segment(p, &poly[k], &poly[(k + 1) % n]) {
                        return true;
                    }
                }
                let mut inside = false;
                for k in 0..n {
                    let a = &poly[k];
                    let b = &poly[(k + 1) % n];
                    if (a.1 > p.1) != (b.1 > p.1) {
                        let t = (&p.1 - &a.1) / (&b.1 - &a.1);
                        let x = &a.0 + &t * (&b.0 - &a.0);
                        if p.0 < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Does any boundary edge of the region pass through the open cell with
    /// lower-left corner `lo` and side `eps`?  Always false for disks, whose
    /// boundary is handled by convexity (corner membership alone decides).
    fn boundary_meets_open_cell(&self, lo: &(Rat, Rat), eps: &Rat) -> bool {
        let ExactDomain::Polygon(poly) = self else {
            return false;
        };
        let n = poly.len();
        (0..n).any(|k| segment_meets_open_cell(&poly[k], &poly[(k + 1) % n], lo, eps))
    }
}

/// Does the closed segment `[a, b]` contain a point strictly inside the open
/// axis-aligned square at `lo` with side `eps`?  Exact parametric clipping.
fn segment_meets_open_cell(a: &(Rat, Rat), b: &(Rat, Rat), lo: &(Rat, Rat), eps: &Rat) -> bool {
    let mut t0 = Rat::zero();
    let mut t1 = Rat::from_integer(BigInt::from(1));
    let coords = [(&a.0, &b.0, &lo.0), (&a.1, &b.1, &lo.1)];
    for (pa, pb, l) in coords {
        let hi = l + eps;
        let d = pb - pa;
        if d.is_zero() {
            if *pa < *l || *pa > hi {
                return false;
            }
            continue;
        }
        let ta = (l - pa) / &d;
        let tb = (&hi - pa) / &d;
        let (tmin, tmax) = if d.is_positive() { (ta, tb) } else { (tb, ta) };
        if tmin > t0 {
            t0 = tmin;
        }
        if tmax < t1 {
            t1 = tmax;
        }
        if t0 > t1 {
            return false;
        }
    }
    if t0 >= t1 {
        // Empty overlap or a single touching point; neither reaches the
        // open interior.
        return false;
    }
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    let tm = (&t0 + &t1) * half;
    let mx = &a.0 + &tm * (&b.0 - &a.0);
    let my = &a.1 + &tm * (&b.1 - &a.1);
    let hx = &lo.0 + eps;
    let hy = &lo.1 + eps;
    mx > lo.0 && mx < hx && my > lo.1 && my < hy
}

/// A discretized domain: the set of lattice cells, their corner vertices and
/// bonds, and the planar complex they form.
///
/// Vertices are identified by lattice coordinates `(ix, iy)` (the geometric
/// position is `(ix * epsilon, iy * epsilon)`) and numbered row by row from
/// the bottom.  Cells are identified by the lattice coordinates of their
/// lower-left corner.
#[derive(Clone, Debug)]
pub struct LatticeDomain {
    epsilon: f64,
    cells: BTreeSet<(i64, i64)>,
    complex: PlanarComplex,
    ids: BTreeMap<(i64, i64), u32>,
    coords: BTreeMap<u32, (i64, i64)>,
    face_of_cell: BTreeMap<(i64, i64), usize>,
    cell_of_face: Vec<(i64, i64)>,
    boundary_cycle: Vec<(u32, u32)>,
}

/// Carve the lattice cells of side `epsilon` that fit inside the closed
/// region and assemble them into a [`LatticeDomain`].
///
/// Cell membership is exact: a cell is kept when every point of it lies in
/// the closure of the domain.  The derived complex must have a single outer
/// boundary; regions whose cell union encloses an unoccupied pocket are
/// rejected.  The counterclockwise boundary cycle starts at the
/// lexicographically smallest boundary vertex.
pub fn discretize(domain: &Domain, epsilon: f64) -> Result<LatticeDomain> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "lattice spacing must be positive and finite, got {epsilon}"
        )));
    }
    let exact = ExactDomain::new(domain)?;
    let eps = rat(epsilon)?;
    let (xmin, xmax, ymin, ymax) = exact.bounding_box(domain);
    let ix0 = (xmin / epsilon).floor() as i64 - 1;
    let ix1 = (xmax / epsilon).ceil() as i64 + 1;
    let iy0 = (ymin / epsilon).floor() as i64 - 1;
    let iy1 = (ymax / epsilon).ceil() as i64 + 1;
    let span = (ix1 - ix0 + 1).max(0) * (iy1 - iy0 + 1).max(0);
    if span > MAX_CANDIDATE_CELLS {
        return Err(Error::TooLarge(format!(
            "discretization would scan {span} candidate cells; refine the domain or coarsen epsilon"
        )));
    }

    let mut corner_in: BTreeMap<(i64, i64), bool> = BTreeMap::new();
    let mut corner = |cx: i64, cy: i64, exact: &ExactDomain, eps: &Rat| -> bool {
        *corner_in
            .entry((cx, cy))
            .or_insert_with(|| exact.contains(&(rint(cx) * eps, rint(cy) * eps)))
    };

    let two = rint(2);
    let mut cells = BTreeSet::new();
    for iy in iy0..=iy1 {
        for ix in ix0..=ix1 {
            let corners_in = corner(ix, iy, &exact, &eps)
                && corner(ix + 1, iy, &exact, &eps)
                && corner(ix + 1, iy + 1, &exact, &eps)
                && corner(ix, iy + 1, &exact, &eps);
            if !corners_in {
                continue;
            }
            let lo = (rint(ix) * &eps, rint(iy) * &eps);
            if exact.boundary_meets_open_cell(&lo, &eps) {
                continue;
            }
            // Corners may sit on the region's boundary while the open cell
            // lies outside it; the centre settles the question exactly.
            let center = (
                (rint(2 * ix + 1) * &eps) / &two,
                (rint(2 * iy + 1) * &eps) / &two,
            );
            if !exact.contains(&center) {
                continue;
            }
            cells.insert((ix, iy));
        }
    }
    if cells.is_empty() {
        return Err(Error::InvalidInput(format!(
            "empty discretization: no lattice cell of spacing {epsilon} fits inside the domain"
        )));
    }
    LatticeDomain::from_cells(epsilon, cells)
}

impl LatticeDomain {
    pub(crate) fn from_cells(epsilon: f64, cells: BTreeSet<(i64, i64)>) -> Result<LatticeDomain> {
        let mut vset: BTreeSet<(i64, i64)> = BTreeSet::new();
        for &(ix, iy) in &cells {
            vset.insert((ix, iy));
            vset.insert((ix + 1, iy));
            vset.insert((ix + 1, iy + 1));
            vset.insert((ix, iy + 1));
        }
        let mut ordered: Vec<(i64, i64)> = vset.iter().copied().collect();
        ordered.sort_by_key(|&(ix, iy)| (iy, ix));
        let ids: BTreeMap<(i64, i64), u32> = ordered
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, k as u32))
            .collect();
        let coords: BTreeMap<u32, (i64, i64)> =
            ids.iter().map(|(&v, &id)| (id, v)).collect();

        let vertices: Vec<(u32, f64, f64)> = ordered
            .iter()
            .enumerate()
            .map(|(k, &(ix, iy))| (k as u32, ix as f64 * epsilon, iy as f64 * epsilon))
            .collect();
        let mut edges = Vec::new();
        for &(ix, iy) in &ordered {
            let a = ids[&(ix, iy)];
            if let Some(&b) = ids.get(&(ix + 1, iy)) {
                edges.push((a, b));
            }
            if let Some(&b) = ids.get(&(ix, iy + 1)) {
                edges.push((a, b));
            }
        }
        let complex = PlanarComplex::build(&vertices, &edges)?;

        // The lattice-side notion of boundary (a corner touching fewer than
        // four cells) has to agree with the complex's outer walk; holes and
        // enclosed pockets are exactly the cases where the two disagree.
        let few: BTreeSet<u32> = ordered
            .iter()
            .filter(|&&(ix, iy)| {
                [(ix - 1, iy - 1), (ix, iy - 1), (ix - 1, iy), (ix, iy)]
                    .iter()
                    .filter(|c| cells.contains(c))
                    .count()
                    < 4
            })
            .map(|v| ids[v])
            .collect();
        if few != complex.boundary_vertices() {
            return Err(Error::NotAdmissible(
                "the cell union encloses an unoccupied pocket; its boundary is not a single outer cycle"
                    .into(),
            ));
        }
        if complex.face_count() != cells.len() {
            return Err(Error::NotAdmissible(format!(
                "the cell union bounds {} faces but contains {} cells",
                complex.face_count(),
                cells.len()
            )));
        }

        let mut face_of_cell = BTreeMap::new();
        let mut cell_of_face = vec![(0i64, 0i64); complex.face_count()];
        for &(ix, iy) in &cells {
            let a = ids[&(ix, iy)];
            let b = ids[&(ix + 1, iy)];
            let f = match complex.left_face(a, b) {
                Some(crate::complex::FaceRef::Bounded(f)) => f,
                _ => {
                    return Err(Error::Internal(format!(
                        "cell ({ix}, {iy}) has no bounded face on its south edge"
                    )))
                }
            };
            face_of_cell.insert((ix, iy), f);
            cell_of_face[f] = (ix, iy);
        }

        let cycle = complex.boundary_edges();
        let start = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, &(tail, _))| coords[&tail])
            .map(|(k, _)| k)
            .unwrap_or(0);
        let mut boundary_cycle = cycle;
        boundary_cycle.rotate_left(start);

        Ok(LatticeDomain {
            epsilon,
            cells,
            complex,
            ids,
            coords,
            face_of_cell,
            cell_of_face,
            boundary_cycle,
        })
    }

    /// Lattice spacing.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Lower-left corners of the cells, in lattice coordinates.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.cells.iter().copied()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn contains_cell(&self, cell: (i64, i64)) -> bool {
        self.cells.contains(&cell)
    }

    /// The planar complex formed by the cell corners and bonds.
    pub fn complex(&self) -> &PlanarComplex {
        &self.complex
    }

    /// Vertex id at the given lattice coordinates, if present.
    pub fn vertex_at(&self, lattice: (i64, i64)) -> Option<u32> {
        self.ids.get(&lattice).copied()
    }

    /// Lattice coordinates of a vertex id.
    pub fn lattice_coords(&self, id: u32) -> Option<(i64, i64)> {
        self.coords.get(&id).copied()
    }

    /// Geometric position of a vertex.
    pub fn position(&self, id: u32) -> Option<(f64, f64)> {
        self.coords
            .get(&id)
            .map(|&(ix, iy)| (ix as f64 * self.epsilon, iy as f64 * self.epsilon))
    }

    /// Bounded face of the complex carrying the given cell.
    pub fn face_of_cell(&self, cell: (i64, i64)) -> Option<usize> {
        self.face_of_cell.get(&cell).copied()
    }

    /// Cell carried by the given bounded face of the complex.
    pub fn cell_of_face(&self, face: usize) -> Option<(i64, i64)> {
        self.cell_of_face.get(face).copied()
    }

    /// Geometric centre of a cell.
    pub fn cell_center(&self, cell: (i64, i64)) -> (f64, f64) {
        (
            (cell.0 as f64 + 0.5) * self.epsilon,
            (cell.1 as f64 + 0.5) * self.epsilon,
        )
    }

    /// The counterclockwise boundary cycle, one dart per boundary bond,
    /// starting at the lexicographically smallest boundary vertex.
    pub fn boundary_cycle(&self) -> &[(u32, u32)] {
        &self.boundary_cycle
    }

    /// Vertices on the outer boundary.
    pub fn boundary_vertices(&self) -> BTreeSet<u32> {
        self.complex.boundary_vertices()
    }

    /// Vertices not on the outer boundary.
    pub fn interior_vertices(&self) -> BTreeSet<u32> {
        self.complex.interior_vertices()
    }

    /// Is the geometric point covered by some closed cell?  Floating-point
    /// comparison; intended for sampling-based checks, not for cell
    /// selection.
    fn covers_point(&self, x: f64, y: f64) -> bool {
        let qx = (x / self.epsilon).floor() as i64;
        let qy = (y / self.epsilon).floor() as i64;
        for ax in [qx - 1, qx] {
            for ay in [qy - 1, qy] {
                if self.cells.contains(&(ax, ay))
                    && x >= ax as f64 * self.epsilon
                    && x <= (ax + 1) as f64 * self.epsilon
                    && y >= ay as f64 * self.epsilon
                    && y <= (ay + 1) as f64 * self.epsilon
                {
                    return true;
                }
            }
        }
        false
    }

    fn max_radius(&self) -> f64 {
        self.coords
            .values()
            .map(|&(ix, iy)| {
                let (x, y) = (ix as f64 * self.epsilon, iy as f64 * self.epsilon);
                x.hypot(y)
            })
            .fold(0.0, f64::max)
    }

    /// Sampled check that every segment from the origin to a covered point
    /// stays inside the cell union: walks [`STAR_RAY_COUNT`] rays outward
    /// and reports a direction along which the union is re-entered after
    /// having been left.
    fn is_star_shaped_sampled(&self) -> bool {
        if !self.covers_point(0.0, 0.0) {
            return false;
        }
        let reach = self.max_radius() + self.epsilon;
        let step = self.epsilon / 8.0;
        let samples = (reach / step).ceil() as usize + 1;
        for k in 0..STAR_RAY_COUNT {
            let phi = TAU * (k as f64) / (STAR_RAY_COUNT as f64);
            let (dx, dy) = (phi.cos(), phi.sin());
            let mut left_once = false;
            for s in 1..=samples {
                let t = step * s as f64;
                if self.covers_point(t * dx, t * dy) {
                    if left_once {
                        return false;
                    }
                } else {
                    left_once = true;
                }
            }
        }
        true
    }
}

/// A nondecreasing bond-energy profile on `[0, 1/2]`.
///
/// The squared-distance profile charges `t²` per bond; the cosine profile
/// charges `1 − cos(2πt)`, matching the energy of unit phasors
/// `½|e^{2πiu(i)} − e^{2πiu(j)}|²`.  Custom profiles interpolate a sampled
/// table linearly; nonnegativity and monotonicity are sample-checked on a
/// grid of [`PROFILE_GRID`] points at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyProfile {
    name: String,
    kind: ProfileKind,
}

#[derive(Clone, Debug, PartialEq)]
enum ProfileKind {
    SquaredDistance,
    Cosine,
    Sampled(Vec<(f64, f64)>),
}

impl EnergyProfile {
    /// The squared-distance profile `f(t) = t²`.
    pub fn sd() -> EnergyProfile {
        EnergyProfile {
            name: "sd".into(),
            kind: ProfileKind::SquaredDistance,
        }
    }

    /// The cosine profile `f(t) = 1 − cos(2πt)`.
    pub fn xy() -> EnergyProfile {
        EnergyProfile {
            name: "xy".into(),
            kind: ProfileKind::Cosine,
        }
    }

    /// A custom profile interpolating `samples` (pairs `(t, f(t))` with `t`
    /// strictly increasing from 0 to 1/2) piecewise-linearly.
    pub fn custom(name: &str, samples: Vec<(f64, f64)>) -> Result<EnergyProfile> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(
                "a custom profile needs at least two samples".into(),
            ));
        }
        for &(t, v) in &samples {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::InvalidInput(
                    "profile samples must be finite".into(),
                ));
            }
            if v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "profile values must be nonnegative; f({t}) = {v}"
                )));
            }
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidInput(
                "profile sample abscissae must be strictly increasing".into(),
            ));
        }
        let t0 = samples[0].0;
        let t1 = samples[samples.len() - 1].0;
        if t0.abs() > 1e-12 || (t1 - 0.5).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "profile samples must cover [0, 1/2]; got [{t0}, {t1}]"
            )));
        }
        let p = EnergyProfile {
            name: name.into(),
            kind: ProfileKind::Sampled(samples),
        };
        let mut prev = p.eval(0.0);
        for k in 1..=PROFILE_GRID {
            let t = 0.5 * (k as f64) / (PROFILE_GRID as f64);
            let v = p.eval(t);
            if v < prev - 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "profile must be nondecreasing on [0, 1/2]; it drops near t = {t}"
                )));
            }
            prev = v;
        }
        Ok(p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Sampled table of a custom profile, if this is one.
    pub fn samples(&self) -> Option<&[(f64, f64)]> {
        match &self.kind {
            ProfileKind::Sampled(s) => Some(s),
            _ => None,
        }
    }

    /// Evaluate the profile at `t ∈ [0, 1/2]` (clamped).
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 0.5);
        match &self.kind {
            ProfileKind::SquaredDistance => t * t,
            ProfileKind::Cosine => 1.0 - (TAU * t).cos(),
            ProfileKind::Sampled(s) => {
                let k = match s.binary_search_by(|probe| probe.0.total_cmp(&t)) {
                    Ok(k) => return s[k].1,
                    Err(k) => k,
                };
                if k == 0 {
                    return s[0].1;
                }
                if k == s.len() {
                    return s[s.len() - 1].1;
                }
                let (ta, va) = s[k - 1];
                let (tb, vb) = s[k];
                va + (vb - va) * ((t - ta) / (tb - ta))
            }
        }
    }
}

/// Total bond energy of `u`: the profile applied to `|π(du)|`, summed over
/// each unordered bond once, in canonical bond order.
pub fn energy(u: &VertexFunction, dom: &LatticeDomain, profile: &EnergyProfile) -> Result<f64> {
    let mut total = 0.0;
    for (a, b) in dom.complex.edge_pairs() {
        let (ua, ub) = (require_value(u, a)?, require_value(u, b)?);
        total += profile.eval(project_pi(ub - ua).abs());
    }
    Ok(total)
}

/// Integer charges carried by the cells of a lattice domain: for each cell,
/// the circulation of `π(du)` counterclockwise around it.  Only nonzero
/// charges are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VorticityMeasure {
    charges: BTreeMap<(i64, i64), i64>,
    total: i64,
}

impl VorticityMeasure {
    /// Charge of a cell (0 when uncharged or absent).
    pub fn charge(&self, cell: (i64, i64)) -> i64 {
        self.charges.get(&cell).copied().unwrap_or(0)
    }

    /// Cells with nonzero charge, in lattice order.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), i64)> + '_ {
        self.charges.iter().map(|(&c, &q)| (c, q))
    }

    /// Number of charged cells.
    pub fn support_len(&self) -> usize {
        self.charges.len()
    }

    /// Sum of all charges.
    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.charges.is_empty()
    }
}

fn require_value(u: &VertexFunction, v: u32) -> Result<f64> {
    u.get(v)
        .ok_or_else(|| Error::InvalidInput(format!("no value at vertex {v}")))
}

/// Cell-by-cell charges of `u`: the counterclockwise circulation of
/// `π(du)` around each cell, an integer in `{−1, 0, +1}`.
pub fn vorticity(u: &VertexFunction, dom: &LatticeDomain) -> Result<VorticityMeasure> {
    let mut charges = BTreeMap::new();
    let mut total = 0i64;
    for &(ix, iy) in &dom.cells {
        let v00 = require_value(u, dom.ids[&(ix, iy)])?;
        let v10 = require_value(u, dom.ids[&(ix + 1, iy)])?;
        let v11 = require_value(u, dom.ids[&(ix + 1, iy + 1)])?;
        let v01 = require_value(u, dom.ids[&(ix, iy + 1)])?;
        let a = project_pi(v10 - v00)
            + project_pi(v11 - v10)
            + project_pi(v01 - v11)
            + project_pi(v00 - v01);
        let q = a.round();
        if (a - q).abs() > 1e-6 {
            return Err(Error::InvalidInput(format!(
                "cell ({ix}, {iy}) has a non-integer circulation {a}; \
                 the vertex values are too large for reliable rounding"
            )));
        }
        let q = q as i64;
        if !(-1..=1).contains(&q) {
            return Err(Error::Internal(format!(
                "cell ({ix}, {iy}) carries an impossible charge {q}"
            )));
        }
        if q != 0 {
            charges.insert((ix, iy), q);
            total += q;
        }
    }
    Ok(VorticityMeasure { charges, total })
}

/// Circulation of `π(du)` along a closed walk of darts.  Each dart must be
/// a bond of the lattice and consecutive darts must chain head-to-tail
/// (including the wrap from last to first).
pub fn circulation(u: &VertexFunction, dom: &LatticeDomain, walk: &[(u32, u32)]) -> Result<f64> {
    if walk.is_empty() {
        return Ok(0.0);
    }
    for (k, &(a, b)) in walk.iter().enumerate() {
        if !dom.complex.contains_edge(a, b) {
            return Err(Error::InvalidInput(format!(
                "({a}, {b}) is not a bond of the lattice"
            )));
        }
        let next = walk[(k + 1) % walk.len()];
        if b != next.0 {
            return Err(Error::InvalidInput(format!(
                "walk breaks at position {k}: dart ends at {b} but the next starts at {}",
                next.0
            )));
        }
    }
    let mut total = 0.0;
    for &(a, b) in walk {
        total += project_pi(require_value(u, b)? - require_value(u, a)?);
    }
    Ok(total)
}

pub use crate::pipeline::BoundaryReport;

/// Classify the boundary values of `u` (only boundary vertices are read).
pub fn boundary_report(
    u: &VertexFunction,
    dom: &LatticeDomain,
    tolerance: f64,
) -> Result<BoundaryReport> {
    crate::pipeline::classify_boundary(&dom.complex, u, tolerance)
}

fn check_profile_shape<F: Fn(f64) -> f64>(psi: &F) -> Result<()> {
    if psi(0.0).abs() > 1e-12 || (psi(1.0) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(
            "the angular profile must satisfy f(0) = 0 and f(1) = 1".into(),
        ));
    }
    let mut prev = psi(0.0);
    for k in 1..=PROFILE_GRID {
        let t = k as f64 / PROFILE_GRID as f64;
        let v = psi(t);
        if !v.is_finite() || v < prev - 1e-12 {
            return Err(Error::InvalidInput(format!(
                "the angular profile must be finite and nondecreasing; it drops near t = {t}"
            )));
        }
        prev = v;
    }
    Ok(())
}

/// Angle of `(x, y)` mapped to `[0, 2π)`, with the seam on the positive
/// x-axis.
fn angle_of(x: f64, y: f64) -> f64 {
    let th = y.atan2(x);
    if th < 0.0 {
        th + TAU
    } else {
        th
    }
}

/// The winding datum `u(i) = ψ(θ(i)/2π)` evaluated at every lattice vertex,
/// where `θ` is the angle of the vertex seen from the origin (seam on the
/// positive x-axis) and `u(0) := 0` at the origin itself.
///
/// Requires the cell union to contain the origin and to be star-shaped
/// around it (sampled along [`STAR_RAY_COUNT`] rays); `ψ` must be
/// nondecreasing with `ψ(0) = 0` and `ψ(1) = 1`.
pub fn star_field<F: Fn(f64) -> f64>(dom: &LatticeDomain, psi: F) -> Result<VertexFunction> {
    check_profile_shape(&psi)?;
    if !dom.covers_point(0.0, 0.0) {
        return Err(Error::PreconditionViolated(
            "the origin does not lie in the cell union; the winding datum needs it as its center"
                .into(),
        ));
    }
    if !dom.is_star_shaped_sampled() {
        return Err(Error::PreconditionViolated(
            "the cell union is not star-shaped around the origin".into(),
        ));
    }
    let mut u = VertexFunction::new();
    for (&id, &(ix, iy)) in &dom.coords {
        if (ix, iy) == (0, 0) {
            u.set(id, 0.0);
            continue;
        }
        let (x, y) = (ix as f64 * dom.epsilon, iy as f64 * dom.epsilon);
        u.set(id, psi(angle_of(x, y) / TAU));
    }
    Ok(u)
}

/// [`star_field`] restricted to the boundary vertices: the winding boundary
/// datum.
pub fn star_boundary<F: Fn(f64) -> f64>(dom: &LatticeDomain, psi: F) -> Result<VertexFunction> {
    let full = star_field(dom, psi)?;
    let mut u = VertexFunction::new();
    for v in dom.boundary_vertices() {
        u.set(v, full.value(v));
    }
    Ok(u)
}

/// Lift a unit-circle-valued boundary field to a phase on the boundary
/// vertices.
///
/// `v0` maps a geometric position to a (not necessarily normalized) nonzero
/// vector; the lift walks the boundary cycle accumulating principal-value
/// phase increments, so consecutive boundary values differ by less than
/// half a turn everywhere except possibly the closing bond.  When a modulus
/// of continuity `omega` is supplied, the spacing certificate
/// `ω(ε) ≤ 1/(2√2)` is required first; a spacing too coarse for the field
/// is refused.
pub fn lift_boundary<F, G>(
    dom: &LatticeDomain,
    v0: F,
    omega: Option<G>,
) -> Result<VertexFunction>
where
    F: Fn(f64, f64) -> (f64, f64),
    G: Fn(f64) -> f64,
{
    if let Some(w) = &omega {
        let bound = w(dom.epsilon);
        if !bound.is_finite() || bound < 0.0 {
            return Err(Error::InvalidInput(format!(
                "the modulus of continuity must be finite and nonnegative, got {bound}"
            )));
        }
        let cap = 0.5 / f64::sqrt(2.0);
        if bound > cap + 1e-12 {
            return Err(Error::HypothesisViolated(format!(
                "spacing {} is too coarse for the boundary field: \
                 its oscillation over one bond is {bound}, above the lifting bound {cap:.6}",
                dom.epsilon
            )));
        }
    }
    let dir = |id: u32| -> Result<(f64, f64)> {
        let (x, y) = dom.position(id).expect("boundary vertex has coordinates");
        let (vx, vy) = v0(x, y);
        let n = vx.hypot(vy);
        if !n.is_finite() || n < 1e-9 {
            return Err(Error::InvalidInput(format!(
                "the boundary field vanishes near ({x}, {y})"
            )));
        }
        Ok((vx / n, vy / n))
    };
    let cycle = &dom.boundary_cycle;
    let first = cycle[0].0;
    let mut u = VertexFunction::new();
    let (fx, fy) = dir(first)?;
    u.set(first, angle_of(fx, fy) / TAU);
    let mut prev = (fx, fy);
    let mut acc = u.value(first);
    for &(a, b) in cycle.iter() {
        debug_assert!(u.contains(a));
        let _ = a;
        if b == first {
            break;
        }
        let (cx, cy) = dir(b)?;
        let delta = (prev.0 * cy - prev.1 * cx).atan2(prev.0 * cx + prev.1 * cy) / TAU;
        acc += delta;
        if let Some(old) = u.get(b) {
            // A pinch vertex is visited twice; the two lifted values must
            // agree or the datum is genuinely ambiguous there.
            if (old - acc).abs() > 1e-9 {
                return Err(Error::HypothesisViolated(format!(
                    "the boundary lift is two-valued at pinch vertex {b}: {old} vs {acc}"
                )));
            }
        }
        u.set(b, acc);
        prev = (cx, cy);
    }
    Ok(u)
}

/// One deterministic coordinate-descent pass per sweep: interior vertices in
/// ascending id order, each moved to a locally optimal value, accepted only
/// when the incident bond energy strictly decreases.  Boundary values are
/// never touched.  The total energy is nonincreasing sweep over sweep.
pub fn relax(
    u: &VertexFunction,
    dom: &LatticeDomain,
    profile: &EnergyProfile,
    sweeps: usize,
) -> Result<VertexFunction> {
    for v in dom.complex.vertex_ids() {
        require_value(u, v)?;
    }
    let mut out = u.clone();
    let interior: Vec<u32> = dom.interior_vertices().into_iter().collect();
    for _ in 0..sweeps {
        for &v in &interior {
            let nvals: Vec<f64> = dom
                .complex
                .neighbors_ccw(v)
                .into_iter()
                .map(|w| out.value(w))
                .collect();
            let local = |x: f64| -> f64 {
                nvals
                    .iter()
                    .map(|&n| profile.eval(project_pi(x - n).abs()))
                    .sum()
            };
            let cur = out.value(v);
            let cur_e = local(cur);
            let cand = match &profile.kind {
                ProfileKind::SquaredDistance => sd_candidates(&nvals),
                ProfileKind::Cosine => cosine_candidate(&nvals).into_iter().collect(),
                ProfileKind::Sampled(_) => sampled_candidates(&local),
            };
            let mut best = (cur_e, cur);
            for x in cand {
                if !x.is_finite() {
                    continue;
                }
                let e = local(x);
                if e < best.0 {
                    best = (e, x);
                }
            }
            if best.0 < cur_e {
                out.set(v, best.1);
            }
        }
    }
    Ok(out)
}

fn frac(y: f64) -> f64 {
    y - y.floor()
}

/// Exact minimizers of `Σ dist²(x − n, ℤ)`: on each interval between
/// consecutive wrap points the sum is a parabola whose vertex is the mean of
/// the unwrapped neighbour values; the candidates are those vertices clamped
/// to their intervals.
fn sd_candidates(nvals: &[f64]) -> Vec<f64> {
    let mut brk: Vec<f64> = nvals.iter().map(|n| frac(n + 0.5)).collect();
    brk.sort_by(f64::total_cmp);
    brk.dedup();
    let m = brk.len();
    let mut cand = Vec::with_capacity(m);
    for k in 0..m {
        let lo = brk[k];
        let hi = if k + 1 < m { brk[k + 1] } else { brk[0] + 1.0 };
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mean = nvals.iter().map(|n| n + (mid - n).round()).sum::<f64>() / nvals.len() as f64;
        cand.push(mean.clamp(lo, hi));
    }
    cand
}

/// Closed-form minimizer of `Σ (1 − cos 2π(x − n))`: the phase of the sum of
/// the neighbour phasors.  Undefined when the phasors cancel.
fn cosine_candidate(nvals: &[f64]) -> Option<f64> {
    let sx: f64 = nvals.iter().map(|&n| (TAU * n).cos()).sum();
    let sy: f64 = nvals.iter().map(|&n| (TAU * n).sin()).sum();
    if sx.hypot(sy) < 1e-12 {
        return None;
    }
    Some(sy.atan2(sx) / TAU)
}

/// Grid scan over one period followed by a golden-section refinement around
/// the best grid point.
fn sampled_candidates(local: &dyn Fn(f64) -> f64) -> Vec<f64> {
    const GRID: usize = 64;
    let mut best = (f64::INFINITY, 0.0);
    for g in 0..GRID {
        let x = g as f64 / GRID as f64;
        let e = local(x);
        if e < best.0 {
            best = (e, x);
        }
    }
    let mut lo = best.1 - 1.0 / GRID as f64;
    let mut hi = best.1 + 1.0 / GRID as f64;
    let inv_phi = 0.5 * (f64::sqrt(5.0) - 1.0);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (local(c), local(d));
    for _ in 0..48 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = local(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = local(d);
        }
    }
    vec![best.1, 0.5 * (lo + hi)]
}
