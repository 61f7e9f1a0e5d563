//! Lattice discretizations of convex domains.
//!
//! Interior nodes are the points of `h·Z^d` strictly inside the domain. Every
//! interior node `y` shoots a ray along each stencil direction `e`; the ray is
//! cut at `h^e_y = sup { r h : r ∈ [0, 1], y + r h e ∈ closure }`, and the cut
//! point is a boundary node whenever it leaves the open domain.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom;
use crate::math;
use crate::{Direction, Point};

/// Geometry of a bounded convex set.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Axis-aligned box `lo < x < hi` (an interval in one dimension).
    Box { lo: Point, hi: Point },
    /// Open ball (an interval in one dimension).
    Ball { center: Point, radius: f64 },
    /// Strictly convex polygon with counterclockwise vertices (two dimensions only).
    Polygon { vertices: Vec<Point> },
}

/// A nonempty bounded open convex set in dimension one or two.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    dim: usize,
    shape: Shape,
    /// Outward unit normals and offsets of polygon edges: `n·x <= c` inside.
    facets: Vec<(Point, f64)>,
}

impl ConvexDomain {
    /// The open interval `(a, b)`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidDomain("interval needs finite a < b"));
        }
        Ok(Self {
            dim: 1,
            shape: Shape::Box {
                lo: [a, 0.0],
                hi: [b, 0.0],
            },
            facets: Vec::new(),
        })
    }

    /// The open rectangle `lo < x < hi`.
    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        if !(lo.iter().chain(hi.iter()).all(|v| v.is_finite()) && lo[0] < hi[0] && lo[1] < hi[1]) {
            return Err(Error::InvalidDomain("box needs finite lo < hi componentwise"));
        }
        Ok(Self {
            dim: 2,
            shape: Shape::Box { lo, hi },
            facets: Vec::new(),
        })
    }

    /// Open ball of the given dimension. In one dimension only `center[0]` is used.
    pub fn ball(dim: usize, center: Point, radius: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidDomain("dimension must be 1 or 2"));
        }
        if !(radius.is_finite() && radius > 0.0 && center.iter().all(|v| v.is_finite())) {
            return Err(Error::InvalidDomain("ball needs a finite center and radius > 0"));
        }
        let center = if dim == 1 { [center[0], 0.0] } else { center };
        Ok(Self {
            dim,
            shape: Shape::Ball { center, radius },
            facets: Vec::new(),
        })
    }

    /// Strictly convex polygon with counterclockwise vertices.
    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices"));
        }
        if !vertices.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::InvalidDomain("polygon vertices must be finite"));
        }
        let mut facets = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if geom::orient(a, b, c) <= 0.0 {
                return Err(Error::InvalidDomain(
                    "polygon vertices must be strictly convex and counterclockwise",
                ));
            }
            let e = geom::sub(b, a);
            let len = geom::norm(e);
            let normal = [e[1] / len, -e[0] / len];
            facets.push((normal, geom::dot(normal, a)));
        }
        // a strictly convex turn at every vertex can still wind twice
        let area = geom::signed_area(&vertices);
        let mut angle_sum = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let u = geom::sub(b, a);
            let v = geom::sub(c, b);
            angle_sum += libm::atan2(geom::cross(u, v), geom::dot(u, v));
        }
        if area <= 0.0 || (angle_sum - 2.0 * core::f64::consts::PI).abs() > 1e-6 {
            return Err(Error::InvalidDomain("polygon is not simple"));
        }
        Ok(Self {
            dim: 2,
            shape: Shape::Polygon { vertices },
            facets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Membership in the open domain.
    pub fn contains(&self, x: Point) -> bool {
        match &self.shape {
            Shape::Box { lo, hi } => (0..self.dim).all(|k| lo[k] < x[k] && x[k] < hi[k]),
            Shape::Ball { center, radius } => self.dist2(x, *center) < radius * radius,
            Shape::Polygon { .. } => self.facets.iter().all(|(n, c)| geom::dot(*n, x) < *c),
        }
    }

    /// Membership in the closure.
    pub fn contains_closure(&self, x: Point) -> bool {
        match &self.shape {
            Shape::Box { lo, hi } => (0..self.dim).all(|k| lo[k] <= x[k] && x[k] <= hi[k]),
            Shape::Ball { center, radius } => self.dist2(x, *center) <= radius * radius,
            Shape::Polygon { .. } => self.facets.iter().all(|(n, c)| geom::dot(*n, x) <= *c),
        }
    }

    fn dist2(&self, x: Point, y: Point) -> f64 {
        let d0 = x[0] - y[0];
        let d1 = if self.dim == 2 { x[1] - y[1] } else { 0.0 };
        d0 * d0 + d1 * d1
    }

    /// Signed distance to the boundary, negative inside.
    ///
    /// Exact for points in the closure; outside a box or polygon it is the
    /// largest facet violation, which vanishes exactly on the boundary.
    pub fn signed_distance(&self, x: Point) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => (0..self.dim)
                .map(|k| (lo[k] - x[k]).max(x[k] - hi[k]))
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Ball { center, radius } => math::sqrt(self.dist2(x, *center)) - radius,
            Shape::Polygon { .. } => self
                .facets
                .iter()
                .map(|(n, c)| geom::dot(*n, x) - c)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, x: Point) -> f64 {
        (-self.signed_distance(x)).max(0.0)
    }

    /// Largest `t >= 0` with `x + t·dir` in the closure, for `x` in the closure.
    pub fn ray_exit(&self, x: Point, dir: Point) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let mut t = f64::INFINITY;
                for k in 0..self.dim {
                    if dir[k] > 0.0 {
                        t = t.min((hi[k] - x[k]) / dir[k]);
                    } else if dir[k] < 0.0 {
                        t = t.min((lo[k] - x[k]) / dir[k]);
                    }
                }
                t.max(0.0)
            }
            Shape::Ball { center, radius } => {
                let dir = if self.dim == 1 { [dir[0], 0.0] } else { dir };
                let rel = if self.dim == 1 {
                    [x[0] - center[0], 0.0]
                } else {
                    geom::sub(x, *center)
                };
                let a = geom::dot(dir, dir);
                let b = geom::dot(dir, rel);
                let c = geom::dot(rel, rel) - radius * radius;
                let disc = (b * b - a * c).max(0.0);
                let s = math::sqrt(disc);
                let t = if b > 0.0 { -c / (b + s) } else { (s - b) / a };
                t.max(0.0)
            }
            Shape::Polygon { .. } => {
                let mut t = f64::INFINITY;
                for (n, c) in &self.facets {
                    let nd = geom::dot(*n, dir);
                    if nd > 0.0 {
                        t = t.min((c - geom::dot(*n, x)) / nd);
                    }
                }
                t.max(0.0)
            }
        }
    }

    /// Axis-aligned bounding box of the closure.
    pub fn bounding_box(&self) -> (Point, Point) {
        match &self.shape {
            Shape::Box { lo, hi } => (*lo, *hi),
            Shape::Ball { center, radius } => {
                let r1 = if self.dim == 2 { *radius } else { 0.0 };
                (
                    [center[0] - radius, center[1] - r1],
                    [center[0] + radius, center[1] + r1],
                )
            }
            Shape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => geom::dist(*lo, *hi),
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        d = d.max(geom::dist(*a, *b));
                    }
                }
                d
            }
        }
    }

    /// Corners of a box or polygon, empty for balls.
    pub fn corners(&self) -> Vec<Point> {
        match &self.shape {
            Shape::Box { lo, hi } if self.dim == 1 => alloc::vec![*lo, *hi],
            Shape::Box { lo, hi } => alloc::vec![*lo, [hi[0], lo[1]], *hi, [lo[0], hi[1]]],
            Shape::Ball { .. } => Vec::new(),
            Shape::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Moves a computed ray hit exactly onto a box face it touches.
    fn snap(&self, mut p: Point, x: Point, dir: Point, t: f64) -> Point {
        if let Shape::Box { lo, hi } = &self.shape {
            for k in 0..self.dim {
                if dir[k] > 0.0 && (hi[k] - x[k]) / dir[k] == t {
                    p[k] = hi[k];
                } else if dir[k] < 0.0 && (lo[k] - x[k]) / dir[k] == t {
                    p[k] = lo[k];
                }
            }
        }
        p
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A symmetric set of primitive lattice directions.
///
/// Directions are stored in `±` pairs: index `2k` holds the representative
/// (first nonzero component positive) and `2k + 1` its opposite. The canonical
/// basis comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionSet {
    dim: usize,
    radius: u32,
    dirs: Vec<Direction>,
}

impl DirectionSet {
    /// All primitive integer vectors with `‖e‖_∞ <= radius`.
    pub fn new(dim: usize, radius: u32) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidDirections("stencil radius must be positive"));
        }
        match dim {
            1 => Ok(Self {
                dim,
                radius,
                dirs: alloc::vec![[1, 0], [-1, 0]],
            }),
            2 => {
                let r = radius as i64;
                let mut reps: Vec<Direction> = Vec::new();
                for a in 0..=r {
                    for b in -r..=r {
                        if (a == 0 && b <= 0) || gcd(a, b) != 1 {
                            continue;
                        }
                        reps.push([a, b]);
                    }
                }
                // canonical basis first, then by norm and angle
                reps.sort_by_key(|e| {
                    let canonical = *e == [1, 0] || *e == [0, 1];
                    (!canonical, e[0] * e[0] + e[1] * e[1], *e)
                });
                let first = reps.iter().position(|e| *e == [1, 0]).unwrap();
                reps.swap(0, first);
                let mut dirs = Vec::with_capacity(2 * reps.len());
                for e in reps {
                    dirs.push(e);
                    dirs.push([-e[0], -e[1]]);
                }
                Ok(Self { dim, radius, dirs })
            }
            _ => Err(Error::InvalidDirections("dimension must be 1 or 2")),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn get(&self, k: usize) -> Direction {
        self.dirs[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = Direction> + '_ {
        self.dirs.iter().copied()
    }

    /// Index of the opposite direction.
    pub fn opposite(&self, k: usize) -> usize {
        k ^ 1
    }

    /// Indices of one direction per `±` pair.
    pub fn representatives(&self) -> impl Iterator<Item = usize> {
        (0..self.dirs.len()).step_by(2)
    }

    pub fn position(&self, e: Direction) -> Option<usize> {
        self.dirs.iter().position(|d| *d == e)
    }
}

/// Neighbor of an interior node along one stencil direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub node: usize,
    /// Boundary-fitted step `h^e_x`, in `(0, h]`.
    pub step: f64,
}

/// Interior and boundary nodes of a convex domain at mesh length `h`.
///
/// Node ids: interior nodes come first in lattice order (first coordinate
/// outer), boundary nodes follow in discovery order.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    domain: ConvexDomain,
    h: f64,
    dirs: DirectionSet,
    nodes: Vec<Point>,
    n_interior: usize,
    lattice: Vec<[i64; 2]>,
    origin: [i64; 2],
    extent: [usize; 2],
    grid: Vec<u32>,
    links: Vec<Link>,
}

const NO_NODE: u32 = u32::MAX;

/// Step length `h^e_x` of the ray from `x` along `e` and the point where it
/// stops.
pub fn boundary_step(domain: &ConvexDomain, h: f64, x: Point, e: Direction) -> (f64, Point) {
    let dir = [e[0] as f64, e[1] as f64];
    let full = geom::add(x, geom::scale(dir, h));
    let t = domain.ray_exit(x, dir);
    if t >= h || domain.contains_closure(full) {
        (h, full)
    } else {
        let hit = geom::add(x, geom::scale(dir, t));
        (t, domain.snap(hit, x, dir, t))
    }
}

impl LatticeDomain {
    pub fn build(domain: ConvexDomain, h: f64, dirs: DirectionSet) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) || h > domain.diameter() {
            return Err(Error::InvalidMeshLength(h));
        }
        if dirs.dim() != domain.dim() {
            return Err(Error::InvalidDirections("direction set dimension differs from the domain"));
        }
        let dim = domain.dim();
        let (lo, hi) = domain.bounding_box();
        let mut origin = [0i64; 2];
        let mut extent = [1usize; 2];
        for k in 0..dim {
            let a = math::ceil(lo[k] / h) as i64;
            let b = math::floor(hi[k] / h) as i64;
            origin[k] = a;
            extent[k] = if b >= a { (b - a + 1) as usize } else { 0 };
        }
        let total = extent[0] * extent[1];
        if total > (1 << 28) {
            return Err(Error::InvalidMeshLength(h));
        }
        let mut grid = alloc::vec![NO_NODE; total];
        let mut nodes = Vec::new();
        let mut lattice = Vec::new();
        for i in 0..extent[0] {
            for j in 0..extent[1] {
                let idx = [origin[0] + i as i64, if dim == 2 { origin[1] + j as i64 } else { 0 }];
                let x = [idx[0] as f64 * h, idx[1] as f64 * h];
                if domain.contains(x) {
                    grid[i * extent[1] + j] = nodes.len() as u32;
                    nodes.push(x);
                    lattice.push(idx);
                }
            }
        }
        let n_interior = nodes.len();
        if n_interior == 0 {
            return Err(Error::EmptyInterior { h });
        }
        let mut dom = Self {
            domain,
            h,
            dirs,
            nodes,
            n_interior,
            lattice,
            origin,
            extent,
            grid,
            links: Vec::new(),
        };
        dom.link_boundary();
        Ok(dom)
    }

    fn link_boundary(&mut self) {
        let h = self.h;
        let quantum = 1e-10 * h;
        let key = |p: Point| -> (i64, i64) {
            (math::round(p[0] / quantum) as i64, math::round(p[1] / quantum) as i64)
        };
        let mut seen: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let ndirs = self.dirs.len();
        let mut links = Vec::with_capacity(self.n_interior * ndirs);
        for y in 0..self.n_interior {
            let idx = self.lattice[y];
            for k in 0..ndirs {
                let e = self.dirs.get(k);
                let target = [idx[0] + e[0], idx[1] + e[1]];
                if let Some(n) = self.find_interior(target) {
                    links.push(Link { node: n, step: h });
                    continue;
                }
                let (step, mut hit) = boundary_step(&self.domain, h, self.nodes[y], e);
                if step == h {
                    // a lattice point on the boundary: use exact lattice coordinates
                    hit = [target[0] as f64 * h, target[1] as f64 * h];
                }
                let (kx, ky) = key(hit);
                let mut found = None;
                'search: for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(&n) = seen.get(&(kx + dx, ky + dy)) {
                            if geom::dist(self.nodes[n], hit) <= quantum {
                                found = Some(n);
                                break 'search;
                            }
                        }
                    }
                }
                let node = match found {
                    Some(n) => n,
                    None => {
                        let n = self.nodes.len();
                        self.nodes.push(hit);
                        seen.insert((kx, ky), n);
                        n
                    }
                };
                links.push(Link { node, step });
            }
        }
        self.links = links;
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.dirs
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_interior(&self) -> usize {
        self.n_interior
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> Point {
        self.nodes[id]
    }

    pub fn interior_ids(&self) -> core::ops::Range<usize> {
        0..self.n_interior
    }

    pub fn boundary_ids(&self) -> core::ops::Range<usize> {
        self.n_interior..self.nodes.len()
    }

    pub fn interior_nodes(&self) -> &[Point] {
        &self.nodes[..self.n_interior]
    }

    pub fn boundary_nodes(&self) -> &[Point] {
        &self.nodes[self.n_interior..]
    }

    pub fn is_interior(&self, id: usize) -> bool {
        id < self.n_interior
    }

    /// Integer lattice coordinates of an interior node.
    pub fn lattice_index(&self, id: usize) -> [i64; 2] {
        self.lattice[id]
    }

    /// Interior node at the given integer lattice coordinates.
    pub fn find_interior(&self, idx: [i64; 2]) -> Option<usize> {
        let i = idx[0] - self.origin[0];
        let j = if self.dim() == 2 { idx[1] - self.origin[1] } else { idx[1] };
        if i < 0 || j < 0 || i as usize >= self.extent[0] || j as usize >= self.extent[1] {
            return None;
        }
        match self.grid[i as usize * self.extent[1] + j as usize] {
            NO_NODE => None,
            n => Some(n as usize),
        }
    }

    /// Neighbor of interior node `x` along the `k`-th stencil direction.
    pub fn link(&self, x: usize, k: usize) -> Link {
        self.links[x * self.dirs.len() + k]
    }

    /// Boundary-fitted step `h^e_x` for a stencil direction.
    pub fn step(&self, x: usize, e: Direction) -> Option<f64> {
        if !self.is_interior(x) {
            return None;
        }
        self.dirs.position(e).map(|k| self.link(x, k).step)
    }

    /// Node at the given coordinates (within `1e-9·h`), if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let idx = [
            math::round(p[0] / self.h) as i64,
            if self.dim() == 2 { math::round(p[1] / self.h) as i64 } else { 0 },
        ];
        let tol = 1e-9 * self.h;
        if let Some(n) = self.find_interior(idx) {
            if geom::dist(self.nodes[n], p) <= tol {
                return Some(n);
            }
        }
        self.boundary_ids().find(|&b| geom::dist(self.nodes[b], p) <= tol)
    }
}
