//! Monge-Ampère measures of mesh functions.
//!
//! The weight of an interior node is `∫ R(p) dp` over its subdifferential,
//! which vanishes off the contact set. Region measures sum weights of the
//! nodes inside the region.

use alloc::vec::Vec;

use crate::envelope::LowerHull;
use crate::error::{Error, Result};
use crate::geom;
use crate::lattice::{ConvexDomain, LatticeDomain};
use crate::math;
use crate::meshfn::MeshFunction;
use crate::subdiff::{self, SlopeCell};
use crate::{Direction, Point};

/// Relative change between the last two quadrature levels above which the
/// integral is rejected.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Default number of uniform refinements of the quadrature.
pub const DEFAULT_LEVELS: u32 = 3;

/// Density `R` integrated over slope cells.
#[derive(Clone, Copy)]
pub enum Density<'a> {
    Unit,
    /// `R(p) = 1 / (1 + c‖p‖²)`.
    RationalQuadratic { c: f64 },
    Custom(&'a dyn Fn(Point) -> f64),
}

impl core::fmt::Debug for Density<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Density::Unit => f.write_str("Unit"),
            Density::RationalQuadratic { c } => f.debug_struct("RationalQuadratic").field("c", c).finish(),
            Density::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Density<'_> {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Density::Unit => 1.0,
            Density::RationalQuadratic { c } => 1.0 / (1.0 + c * geom::dot(p, p)),
            Density::Custom(f) => f(p),
        }
    }
}

/// A quadrature result with the estimated error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Seven-point rule exact for polynomials of degree 5 on triangles, as
/// barycentric points and weights.
fn triangle_rule() -> [([f64; 3], f64); 7] {
    let s = math::sqrt(15.0);
    let a1 = (6.0 - s) / 21.0;
    let b1 = (9.0 + 2.0 * s) / 21.0;
    let a2 = (6.0 + s) / 21.0;
    let b2 = (9.0 - 2.0 * s) / 21.0;
    let w1 = (155.0 - s) / 1200.0;
    let w2 = (155.0 + s) / 1200.0;
    let third = 1.0 / 3.0;
    [
        ([third, third, third], 9.0 / 40.0),
        ([a1, a1, b1], w1),
        ([a1, b1, a1], w1),
        ([b1, a1, a1], w1),
        ([a2, a2, b2], w2),
        ([a2, b2, a2], w2),
        ([b2, a2, a2], w2),
    ]
}

fn integrate_triangle(
    rule: &[([f64; 3], f64); 7],
    a: Point,
    b: Point,
    c: Point,
    level: u32,
    r: &Density<'_>,
) -> f64 {
    if level > 0 {
        let ab = geom::scale(geom::add(a, b), 0.5);
        let bc = geom::scale(geom::add(b, c), 0.5);
        let ca = geom::scale(geom::add(c, a), 0.5);
        return integrate_triangle(rule, a, ab, ca, level - 1, r)
            + integrate_triangle(rule, ab, b, bc, level - 1, r)
            + integrate_triangle(rule, ca, bc, c, level - 1, r)
            + integrate_triangle(rule, ab, bc, ca, level - 1, r);
    }
    let area = 0.5 * geom::cross(geom::sub(b, a), geom::sub(c, a)).abs();
    let mut acc = 0.0;
    for (l, w) in rule {
        let p = [
            l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
            l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
        ];
        acc += w * r.eval(p);
    }
    area * acc
}

fn integrate_interval(lo: f64, hi: f64, level: u32, r: &Density<'_>) -> f64 {
    let pieces = 1u32 << level;
    let h = (hi - lo) / pieces as f64;
    let mut acc = 0.0;
    for k in 0..pieces {
        let mid = lo + (k as f64 + 0.5) * h;
        for (t, w) in GL5 {
            acc += w * r.eval([mid + 0.5 * h * t, 0.0]);
        }
    }
    0.5 * h * acc
}

fn integrate_level(cell: &SlopeCell, level: u32, r: &Density<'_>) -> f64 {
    match cell {
        SlopeCell::Interval { lo, hi } if hi > lo => integrate_interval(*lo, *hi, level, r),
        SlopeCell::Polygon(v) if v.len() >= 3 => {
            let rule = triangle_rule();
            let c = geom::centroid(v);
            (0..v.len())
                .map(|i| integrate_triangle(&rule, c, v[i], v[(i + 1) % v.len()], level, r))
                .sum()
        }
        _ => 0.0,
    }
}

/// `∫_cell R(p) dp` by a composite rule with `levels` uniform refinements.
///
/// Polygons are fanned from their centroid and every triangle carries the
/// seven-point degree-5 rule; intervals use five-point Gauss-Legendre. The
/// error estimate extrapolates the last two levels.
pub fn integrate_density(cell: &SlopeCell, r: &Density<'_>, levels: u32) -> Result<Integral> {
    let levels = levels.max(1);
    let fine = integrate_level(cell, levels, r);
    let coarse = integrate_level(cell, levels - 1, r);
    let change = (fine - coarse).abs();
    let rel = if fine != 0.0 { change / fine.abs() } else { change };
    if !(rel <= QUADRATURE_TOL) {
        return Err(Error::QuadratureNotConverged {
            estimate: fine,
            change: rel,
        });
    }
    // both rules converge at order h^6 for smooth densities
    Ok(Integral {
        value: fine,
        error: change / 63.0,
    })
}

/// `ω(R, u, {x})` at an interior node, with the quadrature error estimate
/// (zero for the unit density).
pub fn ma_weight_with_error(
    u: &MeshFunction<'_>,
    hull: &LowerHull,
    x: usize,
    r: &Density<'_>,
) -> Result<Integral> {
    if !u.domain().is_interior(x) {
        return Err(Error::NotInterior(x));
    }
    if !subdiff::is_contact(hull, u, x) {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let cell = subdiff::hull_normal_cell(hull, u, x);
    match r {
        Density::Unit => Ok(Integral {
            value: subdiff::cell_volume(&cell),
            error: 0.0,
        }),
        _ => integrate_density(&cell, r, DEFAULT_LEVELS),
    }
}

/// `ω(R, u, {x})` at an interior node.
pub fn ma_weight(u: &MeshFunction<'_>, hull: &LowerHull, x: usize, r: &Density<'_>) -> Result<f64> {
    ma_weight_with_error(u, hull, x, r).map(|i| i.value)
}

/// Weights of all interior nodes of a mesh function.
#[derive(Debug, Clone)]
pub struct AtomicMeasure<'a> {
    dom: &'a LatticeDomain,
    weights: Vec<f64>,
}

impl<'a> AtomicMeasure<'a> {
    pub fn compute(u: &MeshFunction<'a>, hull: &LowerHull, r: &Density<'_>) -> Result<Self> {
        let dom = u.domain();
        let weights = dom
            .interior_ids()
            .map(|x| ma_weight(u, hull, x, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dom, weights })
    }

    pub fn from_weights(dom: &'a LatticeDomain, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != dom.num_interior() {
            return Err(Error::SizeMismatch {
                expected: dom.num_interior(),
                found: weights.len(),
            });
        }
        if let Some(node) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::NonFiniteValue { node });
        }
        Ok(Self { dom, weights })
    }

    pub fn domain(&self) -> &'a LatticeDomain {
        self.dom
    }

    /// Weight per interior node id.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// A region of space selecting nodes by closed containment.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRegion(pub ConvexDomain);

impl QueryRegion {
    pub fn contains(&self, x: Point) -> bool {
        self.0.contains_closure(x)
    }
}

impl From<ConvexDomain> for QueryRegion {
    fn from(d: ConvexDomain) -> Self {
        QueryRegion(d)
    }
}

/// Sum of the weights of interior nodes lying in `region`.
pub fn measure_of_region(m: &AtomicMeasure<'_>, region: &QueryRegion) -> f64 {
    m.dom
        .interior_ids()
        .filter(|&x| region.contains(m.dom.node(x)))
        .map(|x| m.weights[x])
        .sum()
}

/// Total Monge-Ampère mass `ω(1, u, Ω_h)`: volumes of the hull normal cells
/// summed over the contact set.
pub fn total_mass(u: &MeshFunction<'_>, hull: &LowerHull) -> f64 {
    u.domain()
        .interior_ids()
        .filter(|&x| subdiff::is_contact(hull, u, x))
        .map(|x| subdiff::cell_volume(&subdiff::hull_normal_cell(hull, u, x)))
        .sum()
}

/// Outcome of [`abp_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbpReport {
    /// Largest `(-u)^d / (diam^{d-1} · dist(x, ∂Ω) · mass)`; zero when `u >= 0`.
    pub max_ratio: f64,
    /// Node attaining the maximum.
    pub node: Option<usize>,
    pub mass: f64,
}

/// Aleksandrov-Bakelman-Pucci diagnostic for mesh functions nonnegative on
/// the boundary.
pub fn abp_check(u: &MeshFunction<'_>, hull: &LowerHull) -> Result<AbpReport> {
    let dom = u.domain();
    for b in dom.boundary_ids() {
        if u.value(b) < -1e-12 {
            return Err(Error::BoundaryNotNonnegative {
                node: b,
                value: u.value(b),
            });
        }
    }
    let d = dom.dim() as u32;
    let diam = dom.domain().diameter();
    let mut report = AbpReport {
        max_ratio: 0.0,
        node: None,
        mass: 0.0,
    };
    if dom.interior_ids().all(|x| u.value(x) >= 0.0) {
        return Ok(report);
    }
    let mass = total_mass(u, hull);
    report.mass = mass;
    for x in dom.interior_ids() {
        let v = u.value(x);
        if v >= 0.0 {
            continue;
        }
        let dist = dom.domain().distance_to_boundary(dom.node(x));
        let ratio = math::powi(-v, d) / (math::powi(diam, d - 1) * dist * mass);
        if !ratio.is_finite() {
            return Err(Error::DomainError("negative interior values with zero Monge-Ampère mass"));
        }
        if ratio > report.max_ratio {
            report.max_ratio = ratio;
            report.node = Some(x);
        }
    }
    Ok(report)
}

/// Orthogonal bases `(e, e⊥)` of primitive integer vectors with
/// `‖e‖_∞ <= r`, one per unordered pair up to signs.
pub fn orthogonal_bases(dim: usize, r: u32) -> Vec<[Direction; 2]> {
    if dim == 1 {
        return alloc::vec![[[1, 0], [0, 0]]];
    }
    let r = r as i64;
    let mut out = Vec::new();
    for a in 1..=r {
        for b in 0..=r {
            if gcd(a, b) == 1 {
                out.push([[a, b], [-b, a]]);
            }
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Wide-stencil Monge-Ampère operator
/// `inf over orthogonal bases of Π max(Δ_e u(x), 0) / ‖e‖²`.
pub fn oberman_operator(u: &MeshFunction<'_>, x: usize, r_w: u32) -> Result<f64> {
    if r_w == 0 {
        return Err(Error::DomainError("stencil radius must be at least 1"));
    }
    let dim = u.domain().dim();
    let mut best = f64::INFINITY;
    for basis in orthogonal_bases(dim, r_w) {
        let mut prod = 1.0;
        for e in &basis[..dim] {
            let n2 = (e[0] * e[0] + e[1] * e[1]) as f64;
            prod *= u.delta_e(x, *e)?.max(0.0) / n2;
        }
        best = best.min(prod);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::lower_hull;
    use crate::lattice::DirectionSet;

    fn interval(h: f64) -> LatticeDomain {
        LatticeDomain::build(
            ConvexDomain::interval(-1.0, 1.0).unwrap(),
            h,
            DirectionSet::new(1, 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn hat_weights() {
        let dom = interval(1.0);
        let hat = MeshFunction::sample(&dom, |x| x[0].abs()).unwrap();
        let hull = lower_hull(&hat).unwrap();
        assert_eq!(ma_weight(&hat, &hull, 0, &Density::Unit).unwrap(), 2.0);
        let sq = |p: Point| p[0] * p[0];
        let w = ma_weight(&hat, &hull, 0, &Density::Custom(&sq)).unwrap();
        assert!((w - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(total_mass(&hat, &hull), 2.0);
    }

    #[test]
    fn quadratic_region_measure() {
        let dom = interval(0.5);
        let u = MeshFunction::sample(&dom, |x| 0.5 * x[0] * x[0]).unwrap();
        let hull = lower_hull(&u).unwrap();
        let m = AtomicMeasure::compute(&u, &hull, &Density::Unit).unwrap();
        let e = QueryRegion(ConvexDomain::interval(-0.6, 0.6).unwrap());
        assert!((measure_of_region(&m, &e) - 1.5).abs() < 1e-15);
        assert!((total_mass(&u, &hull) - 1.5).abs() < 1e-15);
        let none = QueryRegion(ConvexDomain::interval(0.1, 0.2).unwrap());
        assert_eq!(measure_of_region(&m, &none), 0.0);
    }

    #[test]
    fn abp_on_the_shifted_hat() {
        let dom = interval(1.0);
        let u = MeshFunction::sample(&dom, |x| x[0].abs() - 1.0).unwrap();
        let hull = lower_hull(&u).unwrap();
        let rep = abp_check(&u, &hull).unwrap();
        assert_eq!(rep.max_ratio, 0.5);
        let pos = MeshFunction::sample(&dom, |x| x[0].abs()).unwrap();
        assert_eq!(abp_check(&pos, &lower_hull(&pos).unwrap()).unwrap().max_ratio, 0.0);
        let neg = MeshFunction::sample(&dom, |_| -1.0).unwrap();
        assert!(matches!(
            abp_check(&neg, &lower_hull(&neg).unwrap()),
            Err(Error::BoundaryNotNonnegative { .. })
        ));
    }

    #[test]
    fn oberman_examples() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            0.25,
            DirectionSet::new(2, 2).unwrap(),
        )
        .unwrap();
        let origin = dom.locate([0.0, 0.0]).unwrap();
        let q = MeshFunction::sample(&dom, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        for r in 1..=2 {
            assert!((oberman_operator(&q, origin, r).unwrap() - 1.0).abs() < 1e-12);
        }
        let aniso = MeshFunction::sample(&dom, |x| 0.5 * (2.0 * x[0] * x[0] + x[1] * x[1])).unwrap();
        assert!((oberman_operator(&aniso, origin, 1).unwrap() - 2.0).abs() < 1e-12);
        let aff = MeshFunction::sample(&dom, |x| x[0] - x[1]).unwrap();
        assert!(oberman_operator(&aff, origin, 2).unwrap().abs() < 1e-12);
        assert_eq!(orthogonal_bases(2, 1), alloc::vec![[[1, 0], [0, 1]], [[1, 1], [-1, 1]]]);
    }

    #[test]
    fn quadrature_matches_exact_areas() {
        let cell = SlopeCell::Polygon(alloc::vec![[0.0, 0.0], [2.0, 0.0], [2.5, 1.0], [0.5, 1.5]]);
        let exact = subdiff::cell_volume(&cell);
        let q = integrate_density(&cell, &Density::Custom(&|_| 1.0), 3).unwrap();
        assert!((q.value - exact).abs() < 1e-10 * exact);
        // degree-5 polynomial integrated exactly on the unit square
        let sq = SlopeCell::Polygon(alloc::vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let f = |p: Point| math::powi(p[0], 3) * p[1] * p[1];
        let q = integrate_density(&sq, &Density::Custom(&f), 1).unwrap();
        assert!((q.value - 1.0 / 12.0).abs() < 1e-14);
    }
}
