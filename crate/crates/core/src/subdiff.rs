//! Slope cells: discrete subdifferentials and normal cells of lower hulls.
//!
//! The discrete subdifferential at an interior node `x` is
//! `{ p : u(y) >= u(x) + p·(y - x) for every node y }`, computed by clipping a
//! bounding square with one halfplane per node. The hull normal cell is the
//! convex hull of the slopes of the envelope pieces whose closed projection
//! contains `x`. At contact nodes the two agree.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::envelope::LowerHull;
use crate::error::{Error, Result};
use crate::geom;
use crate::meshfn::MeshFunction;
use crate::Point;

/// Merge and collinearity tolerance for cell vertices, relative to the slope
/// scale.
const PRUNE_TOL: f64 = 1e-10;
/// Halfplane slack relative to the slope bound.
const CLIP_TOL: f64 = 1e-12;
/// Hausdorff tolerance of the equivalence check, relative to the slope scale.
pub const EQUIV_TOL: f64 = 1e-8;

/// A bounded convex set of slopes.
///
/// Two-dimensional cells keep their vertices counterclockwise; one vertex is
/// a point cell and two vertices a segment.
#[derive(Debug, Clone, PartialEq)]
pub enum SlopeCell {
    Empty,
    Interval { lo: f64, hi: f64 },
    Polygon(Vec<Point>),
}

impl SlopeCell {
    pub fn is_empty(&self) -> bool {
        match self {
            SlopeCell::Empty => true,
            SlopeCell::Interval { lo, hi } => lo > hi,
            SlopeCell::Polygon(v) => v.is_empty(),
        }
    }

    /// Vertices as points (`[p, 0]` for intervals).
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            SlopeCell::Empty => Vec::new(),
            SlopeCell::Interval { lo, hi } if lo == hi => alloc::vec![[*lo, 0.0]],
            SlopeCell::Interval { lo, hi } => alloc::vec![[*lo, 0.0], [*hi, 0.0]],
            SlopeCell::Polygon(v) => v.clone(),
        }
    }

    /// Largest absolute slope coordinate, `0` for empty cells.
    pub fn slope_bound(&self) -> f64 {
        self.vertices()
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(0.0, f64::max)
    }

    /// The cell moved by `shift`.
    pub fn translated(&self, shift: Point) -> SlopeCell {
        match self {
            SlopeCell::Empty => SlopeCell::Empty,
            SlopeCell::Interval { lo, hi } => SlopeCell::Interval {
                lo: lo + shift[0],
                hi: hi + shift[0],
            },
            SlopeCell::Polygon(v) => SlopeCell::Polygon(v.iter().map(|&p| geom::add(p, shift)).collect()),
        }
    }
}

/// Length of an interval or area of a polygon; zero for degenerate cells.
pub fn cell_volume(c: &SlopeCell) -> f64 {
    match c {
        SlopeCell::Empty => 0.0,
        SlopeCell::Interval { lo, hi } => (hi - lo).max(0.0),
        SlopeCell::Polygon(v) => geom::signed_area(v).max(0.0),
    }
}

/// Hausdorff distance between two cells. Infinite when exactly one is empty.
pub fn hausdorff(a: &SlopeCell, b: &SlopeCell) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    if let (SlopeCell::Interval { lo: a0, hi: a1 }, SlopeCell::Interval { lo: b0, hi: b1 }) = (a, b) {
        return (a0 - b0).abs().max((a1 - b1).abs());
    }
    // distance to a convex set is convex, so the sup is attained at vertices
    let (va, vb) = (a.vertices(), b.vertices());
    let one_sided = |from: &[Point], to: &[Point]| {
        from.iter()
            .map(|&p| geom::dist_point_convex(p, to))
            .fold(0.0, f64::max)
    };
    one_sided(&va, &vb).max(one_sided(&vb, &va))
}

/// Length or area of the intersection of two cells.
pub fn intersection_volume(a: &SlopeCell, b: &SlopeCell) -> f64 {
    match (a, b) {
        (SlopeCell::Interval { lo: a0, hi: a1 }, SlopeCell::Interval { lo: b0, hi: b1 }) => {
            (a1.min(*b1) - a0.max(*b0)).max(0.0)
        }
        (SlopeCell::Polygon(p), SlopeCell::Polygon(q)) if p.len() >= 3 && q.len() >= 3 => {
            geom::signed_area(&geom::convex_intersection(p, q)).max(0.0)
        }
        _ => 0.0,
    }
}

/// Builds discrete subdifferentials of one mesh function.
///
/// The clipping square `‖p‖_∞ <= P` uses `P = max(2L + 1, c + 1)`, where `L`
/// is the largest difference quotient of `u` and `c` the largest axis chord
/// slope at the node. Both bound every slope of the cell.
#[derive(Debug, Clone)]
pub struct DirectCells<'u, 'a> {
    u: &'u MeshFunction<'a>,
    lipschitz: f64,
}

impl<'u, 'a> DirectCells<'u, 'a> {
    pub fn new(u: &'u MeshFunction<'a>) -> Self {
        Self {
            u,
            lipschitz: u.lipschitz_ratio_max(),
        }
    }

    fn chord_bound(&self, x: usize) -> f64 {
        let dom = self.u.domain();
        let dirs = dom.directions();
        let ux = self.u.value(x);
        let mut c: f64 = 0.0;
        for k in 0..dom.dim() {
            // canonical directions occupy the first pairs of the stencil
            let e = [(k == 0) as i64, (k == 1) as i64];
            let kk = dirs.position(e).expect("stencil contains the canonical basis");
            for j in [kk, dirs.opposite(kk)] {
                let l = dom.link(x, j);
                c = c.max(((self.u.value(l.node) - ux) / l.step).abs());
            }
        }
        c
    }

    /// `∂_h u(x)` at an interior node.
    pub fn cell(&self, x: usize) -> Result<SlopeCell> {
        let dom = self.u.domain();
        if !dom.is_interior(x) {
            return Err(Error::NotInterior(x));
        }
        let bound = (2.0 * self.lipschitz + 1.0).max(self.chord_bound(x) + 1.0);
        if dom.dim() == 1 {
            Ok(self.cell_1d(x, bound))
        } else {
            Ok(self.cell_2d(x, bound))
        }
    }

    fn cell_1d(&self, x: usize, bound: f64) -> SlopeCell {
        let dom = self.u.domain();
        let (px, ux) = (dom.node(x)[0], self.u.value(x));
        let mut lo = -bound;
        let mut hi = bound;
        for (y, p) in dom.nodes().iter().enumerate() {
            if y == x {
                continue;
            }
            let s = (self.u.value(y) - ux) / (p[0] - px);
            if p[0] > px {
                hi = hi.min(s);
            } else {
                lo = lo.max(s);
            }
        }
        let tol = CLIP_TOL * bound;
        if lo > hi + tol {
            SlopeCell::Empty
        } else if lo >= hi {
            let m = 0.5 * (lo + hi);
            SlopeCell::Interval { lo: m, hi: m }
        } else {
            SlopeCell::Interval { lo, hi }
        }
    }

    fn cell_2d(&self, x: usize, bound: f64) -> SlopeCell {
        let dom = self.u.domain();
        let (px, ux) = (dom.node(x), self.u.value(x));
        let mut order: Vec<(f64, usize)> = dom
            .nodes()
            .iter()
            .enumerate()
            .filter(|&(y, _)| y != x)
            .map(|(y, p)| (geom::dist(*p, px), y))
            .collect();
        // near nodes cut the most, so the working polygon stays small
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let b = bound;
        let mut poly: Vec<Point> = alloc::vec![[-b, -b], [b, -b], [b, b], [-b, b]];
        let mut next = Vec::with_capacity(16);
        let tol = CLIP_TOL * bound;
        for (len, y) in order {
            let a = geom::scale(geom::sub(dom.node(y), px), 1.0 / len);
            let c = (self.u.value(y) - ux) / len;
            geom::clip_halfplane(&poly, a, c, tol, &mut next);
            core::mem::swap(&mut poly, &mut next);
            if poly.is_empty() {
                return SlopeCell::Empty;
            }
        }
        finish_polygon(poly, bound)
    }
}

fn finish_polygon(mut poly: Vec<Point>, scale: f64) -> SlopeCell {
    let tol = PRUNE_TOL * scale.max(1.0);
    geom::prune_polygon(&mut poly, tol, PRUNE_TOL);
    let diam = poly
        .iter()
        .flat_map(|a| poly.iter().map(move |b| geom::dist(*a, *b)))
        .fold(0.0, f64::max);
    if poly.len() >= 3 && geom::signed_area(&poly) <= tol * diam {
        // a sliver around a segment or a point
        let idx = geom::convex_hull_indices(&poly, PRUNE_TOL);
        poly = idx.iter().map(|&i| poly[i]).collect();
        if poly.len() >= 3 {
            // keep the longest diagonal
            let mut best = (0.0, 0, 1);
            for i in 0..poly.len() {
                for j in i + 1..poly.len() {
                    let d = geom::dist(poly[i], poly[j]);
                    if d > best.0 {
                        best = (d, i, j);
                    }
                }
            }
            poly = alloc::vec![poly[best.1], poly[best.2]];
        }
        if poly.len() == 2 && geom::dist(poly[0], poly[1]) <= tol {
            poly = alloc::vec![geom::scale(geom::add(poly[0], poly[1]), 0.5)];
        }
    }
    SlopeCell::Polygon(poly)
}

/// `∂_h u(x)` at an interior node.
///
/// Computes the clipping bound from scratch; use [`DirectCells`] when many
/// nodes of the same function are needed.
pub fn discrete_subdifferential(u: &MeshFunction<'_>, x: usize) -> Result<SlopeCell> {
    DirectCells::new(u).cell(x)
}

/// Subdifferential of the envelope at an arbitrary point of its domain:
/// the convex hull of the slopes of all pieces whose closed projection
/// contains `p`. Empty outside the hull.
pub fn normal_cell_at(hull: &LowerHull, p: Point) -> SlopeCell {
    let faces = hull.faces_containing(p);
    if faces.is_empty() {
        return SlopeCell::Empty;
    }
    let slopes: Vec<Point> = faces.iter().map(|&f| hull.faces()[f].slope).collect();
    if hull.dim() == 1 {
        let lo = slopes.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min);
        let hi = slopes.iter().map(|s| s[0]).fold(f64::NEG_INFINITY, f64::max);
        return SlopeCell::Interval { lo, hi };
    }
    let scale = slopes
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    let hull_pts = geom::convex_hull(&slopes, PRUNE_TOL);
    finish_polygon(hull_pts, scale)
}

/// `∂Γ(u)(x)` at a node `x` of the mesh of `u`.
pub fn hull_normal_cell(hull: &LowerHull, u: &MeshFunction<'_>, x: usize) -> SlopeCell {
    normal_cell_at(hull, u.domain().node(x))
}

/// Both cells of a node and their comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPair {
    pub node: usize,
    pub direct_cell: SlopeCell,
    pub hull_cell: SlopeCell,
    /// Whether the node touches the envelope.
    pub contact: bool,
    pub equal: bool,
    /// Hausdorff distance between the cells at contact nodes, zero otherwise.
    pub hausdorff: f64,
}

/// Whether `x` is a contact node of `hull`.
pub fn is_contact(hull: &LowerHull, u: &MeshFunction<'_>, x: usize) -> bool {
    let tol = crate::envelope::CONTACT_TOL * u.value_scale();
    hull.is_vertex(x)
        || hull
            .gamma_eval(u.domain().node(x))
            .map(|g| (g - u.value(x)).abs() <= tol)
            .unwrap_or(false)
}

/// Compares the discrete subdifferential with the hull normal cell at `x`.
///
/// At contact nodes the cells must agree to Hausdorff distance
/// `1e-8·max(1, slope bound)`; elsewhere the discrete subdifferential must be
/// empty.
pub fn equivalence_check(u: &MeshFunction<'_>, hull: &LowerHull, x: usize) -> Result<CellPair> {
    equivalence_check_with(&DirectCells::new(u), hull, x)
}

/// [`equivalence_check`] with a shared cell builder.
pub fn equivalence_check_with(cells: &DirectCells<'_, '_>, hull: &LowerHull, x: usize) -> Result<CellPair> {
    let direct_cell = cells.cell(x)?;
    let hull_cell = hull_normal_cell(hull, cells.u, x);
    let contact = is_contact(hull, cells.u, x);
    let (equal, dist) = if contact {
        let scale = direct_cell.slope_bound().max(hull_cell.slope_bound()).max(1.0);
        let d = hausdorff(&direct_cell, &hull_cell);
        (d <= EQUIV_TOL * scale, d)
    } else {
        (direct_cell.is_empty(), 0.0)
    };
    let pair = CellPair {
        node: x,
        direct_cell,
        hull_cell,
        contact,
        equal,
        hausdorff: dist,
    };
    if pair.equal {
        Ok(pair)
    } else {
        Err(Error::EquivalenceViolation(Box::new(pair)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{lower_hull, lower_hull_of_points};
    use crate::lattice::{ConvexDomain, DirectionSet, LatticeDomain};

    fn interval(h: f64) -> LatticeDomain {
        LatticeDomain::build(
            ConvexDomain::interval(-1.0, 1.0).unwrap(),
            h,
            DirectionSet::new(1, 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_cells() {
        let dom = interval(1.0);
        let hat = MeshFunction::sample(&dom, |x| x[0].abs()).unwrap();
        assert_eq!(
            discrete_subdifferential(&hat, 0).unwrap(),
            SlopeCell::Interval { lo: -1.0, hi: 1.0 }
        );
        let bump = MeshFunction::sample(&dom, |x| if x[0] == 0.0 { 0.5 } else { 0.0 }).unwrap();
        assert_eq!(discrete_subdifferential(&bump, 0).unwrap(), SlopeCell::Empty);
        let hull = lower_hull(&bump).unwrap();
        let pair = equivalence_check(&bump, &hull, 0).unwrap();
        assert!(!pair.contact && pair.equal);
    }

    #[test]
    fn figure_one_vertex_cell() {
        let pts = [[-1.5, 0.0], [-1.0, 0.0], [1.0, 0.0], [1.5, 0.0]];
        let hull = lower_hull_of_points(1, &pts, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(normal_cell_at(&hull, [-1.0, 0.0]), SlopeCell::Interval { lo: -2.0, hi: 0.0 });
        assert_eq!(normal_cell_at(&hull, [0.0, 0.0]), SlopeCell::Interval { lo: 0.0, hi: 0.0 });
    }

    #[test]
    fn quadratic_chord_cell() {
        let dom = interval(0.5);
        let u = MeshFunction::sample(&dom, |x| 0.5 * x[0] * x[0]).unwrap();
        let hull = lower_hull(&u).unwrap();
        let origin = dom.locate([0.0, 0.0]).unwrap();
        match hull_normal_cell(&hull, &u, origin) {
            SlopeCell::Interval { lo, hi } => {
                assert!((lo + 0.25).abs() < 1e-15 && (hi - 0.25).abs() < 1e-15);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn abs_sum_cell_is_the_square() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            0.5,
            DirectionSet::new(2, 1).unwrap(),
        )
        .unwrap();
        let u = MeshFunction::sample(&dom, |x| x[0].abs() + x[1].abs()).unwrap();
        let origin = dom.locate([0.0, 0.0]).unwrap();
        let cell = discrete_subdifferential(&u, origin).unwrap();
        assert!((cell_volume(&cell) - 4.0).abs() < 1e-12);
        let hull = lower_hull(&u).unwrap();
        let pair = equivalence_check(&u, &hull, origin).unwrap();
        assert!(pair.contact && pair.hausdorff < 1e-10);
    }

    #[test]
    fn affine_cells_are_points() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            0.25,
            DirectionSet::new(2, 1).unwrap(),
        )
        .unwrap();
        let u = MeshFunction::sample(&dom, |x| 0.3 * x[0] - 1.2 * x[1] + 2.0).unwrap();
        let hull = lower_hull(&u).unwrap();
        for x in dom.interior_ids() {
            let pair = equivalence_check(&u, &hull, x).unwrap();
            assert_eq!(cell_volume(&pair.direct_cell), 0.0);
            let v = pair.hull_cell.vertices();
            assert!(v.iter().all(|p| geom::dist(*p, [0.3, -1.2]) < 1e-12));
        }
    }

    #[test]
    fn volumes() {
        assert_eq!(cell_volume(&SlopeCell::Interval { lo: -1.0, hi: 1.0 }), 2.0);
        let sq = SlopeCell::Polygon(alloc::vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]);
        assert_eq!(cell_volume(&sq), 4.0);
        assert_eq!(cell_volume(&SlopeCell::Empty), 0.0);
        assert_eq!(hausdorff(&sq, &sq.translated([0.5, 0.0])), 0.5);
    }
}
