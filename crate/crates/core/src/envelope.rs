//! Convex envelopes of mesh functions.
//!
//! The envelope `Γ(u)` is the largest convex function lying below `u` at every
//! node. Its graph is the lower part of the convex hull of the lifted nodes
//! `(x, u(x))`; each lower face is an affine piece and the projections of the
//! faces triangulate `conv(N_h)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom;
use crate::hull3::{self, P3};
use crate::lp::{self, LpOutcome};
use crate::math;
use crate::meshfn::MeshFunction;
use crate::Point;

/// Coplanarity threshold on the normalized orientation of adjacent faces.
const COPLANAR_TOL: f64 = 1e-12;
/// Lower faces with unit normal `z > -STEEP_TOL` stand almost vertically over
/// nearly collinear boundary nodes; they are never merged, since the planar
/// hull of their projections misrepresents the region they cover.
const STEEP_TOL: f64 = 1e-6;
/// Relative area or value mismatch above which a coplanar group is not
/// re-fanned.
const MERGE_TOL: f64 = 1e-9;
/// Distance slack, relative to the hull extent, when locating points.
const LOCATE_TOL: f64 = 1e-12;
/// Relative tolerance of the contact set.
pub const CONTACT_TOL: f64 = 1e-9;

/// An affine piece `x ↦ slope·x + offset` of the envelope over a simplex.
///
/// In one dimension only the first two vertices are used.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub slope: Point,
    pub offset: f64,
    pub vertices: [usize; 3],
    pub corners: [Point; 3],
    /// Envelope values at the corners.
    pub values: [f64; 3],
}

impl Face {
    #[inline]
    pub fn eval(&self, x: Point) -> f64 {
        geom::dot(self.slope, x) + self.offset
    }

    /// Value at `x` interpolated from the corner values. Unlike
    /// [`eval`](Self::eval) this stays accurate on thin faces, whose slopes
    /// and offsets can be huge and cancel.
    pub fn interpolate(&self, dim: usize, x: Point) -> f64 {
        // clamped so that points just outside a sliver get a value between
        // its corners rather than a wild extrapolation
        let mut l = self.barycentric(dim, x).map(|v| if v.is_finite() { v.max(0.0) } else { 0.0 });
        let total: f64 = l[..dim + 1].iter().sum();
        if total <= 0.0 {
            let k = (0..=dim)
                .min_by(|&i, &j| geom::dist(x, self.corners[i]).total_cmp(&geom::dist(x, self.corners[j])))
                .unwrap_or(0);
            return self.values[k];
        }
        l.iter_mut().for_each(|v| *v /= total);
        l[0] * self.values[0] + l[1] * self.values[1] + l[2] * self.values[2]
    }

    fn barycentric(&self, dim: usize, x: Point) -> [f64; 3] {
        if dim == 1 {
            let (a, b) = (self.corners[0][0], self.corners[1][0]);
            let t = (x[0] - a) / (b - a);
            [1.0 - t, t, 0.0]
        } else {
            let [a, b, c] = self.corners;
            geom::barycentric(x, a, b, c)
        }
    }

    /// Exact closed containment, plus points within `tol·extent` of the
    /// triangle to cover rounding in the hull of nearly collinear nodes.
    fn contains(&self, dim: usize, x: Point, tol: f64, extent: f64) -> bool {
        if dim == 1 {
            let (a, b) = (self.corners[0][0], self.corners[1][0]);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let slack = tol * (hi - lo);
            x[0] >= lo - slack && x[0] <= hi + slack
        } else {
            let [a, b, c] = self.corners;
            let o = geom::orient(a, b, c).signum();
            let inside = o != 0.0
                && [(a, b), (b, c), (c, a)]
                    .iter()
                    .all(|&(p, q)| geom::orient(p, q, x) * o >= 0.0);
            inside || geom::dist_point_convex(x, &self.corners) <= tol * extent
        }
    }

    fn measure(&self, dim: usize) -> f64 {
        if dim == 1 {
            (self.corners[1][0] - self.corners[0][0]).abs()
        } else {
            let [a, b, c] = self.corners;
            0.5 * geom::cross(geom::sub(b, a), geom::sub(c, a)).abs()
        }
    }

    fn from_simplex(dim: usize, ids: &[usize], pts: &[Point], vals: &[f64]) -> Self {
        let mut vertices = [usize::MAX; 3];
        let mut corners = [[0.0; 2]; 3];
        for (k, &i) in ids.iter().enumerate() {
            vertices[k] = i;
            corners[k] = pts[k];
        }
        let slope = if dim == 1 {
            [(vals[1] - vals[0]) / (pts[1][0] - pts[0][0]), 0.0]
        } else {
            let e1 = geom::sub(pts[1], pts[0]);
            let e2 = geom::sub(pts[2], pts[0]);
            let d1 = vals[1] - vals[0];
            let d2 = vals[2] - vals[0];
            let det = geom::cross(e1, e2);
            [(d1 * e2[1] - d2 * e1[1]) / det, (e1[0] * d2 - e2[0] * d1) / det]
        };
        let offset = vals[0] - geom::dot(slope, pts[0]);
        Face {
            slope,
            offset,
            vertices,
            corners,
            values: [vals[0], vals[1], if dim == 1 { 0.0 } else { vals[2] }],
        }
    }
}

/// A node that is a vertex of the lower hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HullVertex {
    pub node: usize,
    pub point: Point,
    pub value: f64,
}

/// Uniform bucket grid over face bounding boxes.
#[derive(Debug, Clone)]
struct FaceGrid {
    /// Largest side of the bounding box of all faces.
    extent: f64,
    lo: Point,
    cell: Point,
    n: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

impl FaceGrid {
    fn new(faces: &[Face], dim: usize) -> Self {
        let nv = dim + 1;
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for f in faces {
            for c in &f.corners[..nv] {
                for k in 0..2 {
                    lo[k] = lo[k].min(c[k]);
                    hi[k] = hi[k].max(c[k]);
                }
            }
        }
        let side = math::ceil(math::sqrt(faces.len() as f64)).max(1.0) as usize;
        let n = if dim == 1 { [faces.len().max(1), 1] } else { [side, side] };
        let cell = [
            ((hi[0] - lo[0]) / n[0] as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / n[1] as f64).max(f64::MIN_POSITIVE),
        ];
        let mut grid = Self {
            extent: (hi[0] - lo[0]).max(hi[1] - lo[1]),
            lo,
            cell,
            n,
            buckets: alloc::vec![Vec::new(); n[0] * n[1]],
        };
        for (id, f) in faces.iter().enumerate() {
            let mut flo = [f64::INFINITY; 2];
            let mut fhi = [f64::NEG_INFINITY; 2];
            for c in &f.corners[..nv] {
                for k in 0..2 {
                    flo[k] = flo[k].min(c[k]);
                    fhi[k] = fhi[k].max(c[k]);
                }
            }
            let (i0, j0) = grid.cell_of(flo);
            let (i1, j1) = grid.cell_of(fhi);
            for i in i0.saturating_sub(1)..=(i1 + 1).min(n[0] - 1) {
                for j in j0.saturating_sub(1)..=(j1 + 1).min(n[1] - 1) {
                    grid.buckets[i * n[1] + j].push(id as u32);
                }
            }
        }
        grid
    }

    fn cell_of(&self, x: Point) -> (usize, usize) {
        let idx = |k: usize| -> usize {
            let t = math::floor((x[k] - self.lo[k]) / self.cell[k]);
            if t.is_nan() || t < 0.0 {
                0
            } else {
                (t as usize).min(self.n[k] - 1)
            }
        };
        (idx(0), idx(1))
    }

    fn candidates(&self, x: Point) -> &[u32] {
        let (i, j) = self.cell_of(x);
        &self.buckets[i * self.n[1] + j]
    }
}

/// Lower convex hull of a lifted node set: the piecewise affine convex
/// envelope `Γ(u)` over `conv(N_h)`.
#[derive(Debug, Clone)]
pub struct LowerHull {
    dim: usize,
    faces: Vec<Face>,
    vertices: Vec<HullVertex>,
    incident: Vec<Vec<usize>>,
    grid: FaceGrid,
    value_scale: f64,
}

/// Interior nodes where the envelope touches the mesh function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactSet {
    pub nodes: Vec<usize>,
}

impl ContactSet {
    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Lower hull faces of the points `(pts[i], vals[i])`, indexed by position.
fn lower_faces(dim: usize, pts: &[Point], vals: &[f64]) -> Result<Vec<Face>> {
    if dim == 1 {
        lower_faces_1d(pts, vals)
    } else {
        lower_faces_2d(pts, vals)
    }
}

fn lower_faces_1d(pts: &[Point], vals: &[f64]) -> Result<Vec<Face>> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i][0].total_cmp(&pts[j][0]));
    order.dedup_by(|a, b| pts[*a][0] == pts[*b][0]);
    if order.len() < 2 {
        return Err(Error::DegenerateInput);
    }
    let lift = |i: usize| -> Point { [pts[i][0], vals[i]] };
    let mut chain: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        while chain.len() >= 2 {
            let a = lift(chain[chain.len() - 2]);
            let b = lift(chain[chain.len() - 1]);
            let c = lift(i);
            // keep b only if it is strictly below the chord a–c
            if geom::normalized_orient(a, b, c) > COPLANAR_TOL && geom::orient(a, b, c) > 0.0 {
                break;
            }
            chain.pop();
        }
        chain.push(i);
    }
    Ok(chain
        .windows(2)
        .map(|w| {
            Face::from_simplex(
                1,
                &[w[0], w[1]],
                &[pts[w[0]], pts[w[1]]],
                &[vals[w[0]], vals[w[1]]],
            )
        })
        .collect())
}

fn lower_faces_2d(pts: &[Point], vals: &[f64]) -> Result<Vec<Face>> {
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegenerateInput);
    }
    let (zmin, zmax) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let c = geom::centroid(pts);
    let mut lifted: Vec<P3> = (0..n).map(|i| [pts[i][0], pts[i][1], vals[i]]).collect();
    // a point above everything over the interior caps the hull, so coplanar
    // data still spans a solid
    lifted.push([c[0], c[1], zmax + (zmax - zmin) + 1.0]);
    let top = n;
    let tris = hull3::convex_hull_3d(&lifted).ok_or(Error::DegenerateInput)?;

    let normal = |t: &[usize; 3]| -> [f64; 3] {
        let (a, b, c) = (lifted[t[0]], lifted[t[1]], lifted[t[2]]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let len3 = |v: [f64; 3]| math::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    let lower: Vec<[usize; 3]> = tris
        .into_iter()
        .filter(|t| !t.contains(&top))
        // the vertical normal component is the projected orientation; taking
        // it exactly keeps the upper side of near-vertical walls out
        .filter(|t| geom::orient(pts[t[0]], pts[t[1]], pts[t[2]]) < 0.0)
        .collect();
    if lower.is_empty() {
        return Err(Error::DegenerateInput);
    }

    // merge edge-adjacent coplanar triangles
    let mut edge_owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (id, t) in lower.iter().enumerate() {
        for i in 0..3 {
            edge_owner.insert((t[i], t[(i + 1) % 3]), id);
        }
    }
    let steep: Vec<bool> = lower
        .iter()
        .map(|t| {
            let nrm = normal(t);
            nrm[2] / len3(nrm) > -STEEP_TOL
        })
        .collect();
    let mut uf = UnionFind((0..lower.len()).collect());
    for (id, t) in lower.iter().enumerate() {
        if steep[id] {
            continue;
        }
        let nrm = normal(t);
        let nlen = len3(nrm);
        let a = lifted[t[0]];
        for i in 0..3 {
            let Some(&other) = edge_owner.get(&(t[(i + 1) % 3], t[i])) else {
                continue;
            };
            if other <= id || steep[other] {
                continue;
            }
            let d = *lower[other]
                .iter()
                .find(|v| !t.contains(v))
                .expect("adjacent triangles share exactly one edge");
            let dp = lifted[d];
            let rel = [dp[0] - a[0], dp[1] - a[1], dp[2] - a[2]];
            let sine = (nrm[0] * rel[0] + nrm[1] * rel[1] + nrm[2] * rel[2]) / (nlen * len3(rel));
            if sine.abs() <= COPLANAR_TOL {
                uf.union(id, other);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for id in 0..lower.len() {
        groups.entry(uf.find(id)).or_default().push(id);
    }

    let simplex = |t: [usize; 3]| {
        Face::from_simplex(
            2,
            &t,
            &[pts[t[0]], pts[t[1]], pts[t[2]]],
            &[vals[t[0]], vals[t[1]], vals[t[2]]],
        )
    };
    let area = |t: &[usize; 3]| {
        0.5 * geom::cross(geom::sub(pts[t[1]], pts[t[0]]), geom::sub(pts[t[2]], pts[t[0]])).abs()
    };
    let value_scale = zmin.abs().max(zmax.abs()).max(1.0);
    let mut faces = Vec::with_capacity(lower.len());
    for (_, members) in groups {
        if members.len() == 1 {
            faces.push(simplex(lower[members[0]]));
            continue;
        }
        let mut ids: Vec<usize> = members.iter().flat_map(|&m| lower[m]).collect();
        ids.sort_unstable();
        ids.dedup();
        let proj: Vec<Point> = ids.iter().map(|&i| pts[i]).collect();
        let poly = geom::convex_hull_indices(&proj, COPLANAR_TOL);
        // fan from the lexicographically smallest vertex (the hull starts there)
        let fan: Vec<[usize; 3]> = if poly.len() < 3 {
            Vec::new()
        } else {
            poly[1..]
                .windows(2)
                .map(|w| [ids[poly[0]], ids[w[0]], ids[w[1]]])
                .collect()
        };
        // The fan is only safe when the merged triangles tile a convex
        // polygon and it has no slivers; otherwise keep them as they are.
        let tiled: f64 = members.iter().map(|&m| area(&lower[m])).sum();
        let fanned: f64 = fan.iter().map(area).sum();
        let flat = fan.iter().all(|t| {
            let nrm = normal(t);
            nrm[2].abs() / len3(nrm) >= STEEP_TOL
        });
        // transitive merging can drift across a shallow ridge, so every
        // vertex must sit on the plane of the largest member
        let widest = members
            .iter()
            .copied()
            .max_by(|&i, &j| area(&lower[i]).total_cmp(&area(&lower[j])))
            .expect("groups are non-empty");
        let plane = simplex(lower[widest]);
        let on_plane = ids
            .iter()
            .all(|&i| (plane.eval(pts[i]) - vals[i]).abs() <= MERGE_TOL * value_scale);
        if flat && on_plane && (tiled - fanned).abs() <= MERGE_TOL * tiled {
            faces.extend(fan.into_iter().map(simplex));
        } else {
            faces.extend(members.iter().map(|&m| simplex(lower[m])));
        }
    }
    Ok(faces)
}

impl LowerHull {
    /// Assembles a hull from its affine pieces, e.g. when read back from a dump.
    pub fn from_faces(dim: usize, faces: Vec<Face>) -> Result<Self> {
        if (dim != 1 && dim != 2) || faces.is_empty() {
            return Err(Error::DegenerateInput);
        }
        let nv = dim + 1;
        let mut by_node: BTreeMap<usize, (HullVertex, Vec<usize>)> = BTreeMap::new();
        let mut value_scale: f64 = 1.0;
        for (id, f) in faces.iter().enumerate() {
            for k in 0..nv {
                let value = f.values[k];
                value_scale = value_scale.max(value.abs());
                by_node
                    .entry(f.vertices[k])
                    .or_insert_with(|| {
                        (
                            HullVertex {
                                node: f.vertices[k],
                                point: f.corners[k],
                                value,
                            },
                            Vec::new(),
                        )
                    })
                    .1
                    .push(id);
            }
        }
        let (vertices, incident) = by_node.into_values().unzip();
        let grid = FaceGrid::new(&faces, dim);
        Ok(Self {
            dim,
            faces,
            vertices,
            incident,
            grid,
            value_scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Hull vertices sorted by node id.
    pub fn vertices(&self) -> &[HullVertex] {
        &self.vertices
    }

    pub fn vertex_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(|v| v.node)
    }

    fn vertex_slot(&self, node: usize) -> Option<usize> {
        self.vertices.binary_search_by_key(&node, |v| v.node).ok()
    }

    pub fn is_vertex(&self, node: usize) -> bool {
        self.vertex_slot(node).is_some()
    }

    /// Faces having `node` as a vertex.
    pub fn incident_faces(&self, node: usize) -> &[usize] {
        match self.vertex_slot(node) {
            Some(s) => &self.incident[s],
            None => &[],
        }
    }

    /// Total length (d = 1) or area (d = 2) of the face projections.
    pub fn covered_measure(&self) -> f64 {
        self.faces.iter().map(|f| f.measure(self.dim)).sum()
    }

    /// Magnitude used for value tolerances: `max(1, max |Γ|)` at vertices.
    pub fn value_scale(&self) -> f64 {
        self.value_scale
    }

    /// Faces whose closed projection contains `x`.
    pub fn faces_containing(&self, x: Point) -> Vec<usize> {
        self.grid
            .candidates(x)
            .iter()
            .map(|&f| f as usize)
            .filter(|&f| self.faces[f].contains(self.dim, x, LOCATE_TOL, self.grid.extent))
            .collect()
    }

    /// A face whose closed projection contains `x`; the one containing it
    /// most deeply when several do.
    pub fn locate(&self, x: Point) -> Option<usize> {
        let depth = |f: usize| {
            let l = self.faces[f].barycentric(self.dim, x);
            l[..self.dim + 1].iter().copied().fold(f64::INFINITY, f64::min)
        };
        self.grid
            .candidates(x)
            .iter()
            .map(|&f| f as usize)
            .filter(|&f| self.faces[f].contains(self.dim, x, LOCATE_TOL, self.grid.extent))
            .map(|f| (f, depth(f)))
            .fold(None, |best: Option<(usize, f64)>, (f, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((f, d)),
            })
            .map(|(f, _)| f)
    }

    /// `Γ(u)(x)` for `x` in `conv(N_h)`.
    pub fn gamma_eval(&self, x: Point) -> Result<f64> {
        self.locate(x)
            .map(|f| self.faces[f].interpolate(self.dim, x))
            .ok_or(Error::OutsideHull(x))
    }

    /// The canonical convex extension to the whole space: the maximum of all
    /// affine pieces. Agrees with [`gamma_eval`](Self::gamma_eval) on the hull.
    pub fn gamma_extension_eval(&self, x: Point) -> f64 {
        self.faces
            .iter()
            .map(|f| f.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Envelope value at a node: the stored value for vertices, face
    /// evaluation otherwise.
    pub fn value_at_node(&self, node: usize, x: Point) -> Result<f64> {
        match self.vertex_slot(node) {
            Some(s) => Ok(self.vertices[s].value),
            None => self.gamma_eval(x),
        }
    }

    /// Interior nodes where `|Γ(u)(x) - u(x)| <= 1e-9·scale`.
    pub fn contact_set(&self, u: &MeshFunction<'_>) -> ContactSet {
        let dom = u.domain();
        let tol = CONTACT_TOL * u.value_scale();
        let nodes = dom
            .interior_ids()
            .filter(|&x| {
                self.is_vertex(x)
                    || self
                        .gamma_eval(dom.node(x))
                        .map(|g| (g - u.value(x)).abs() <= tol)
                        .unwrap_or(false)
            })
            .collect();
        ContactSet { nodes }
    }
}

/// Convex envelope `Γ(u)` of a mesh function.
pub fn lower_hull(u: &MeshFunction<'_>) -> Result<LowerHull> {
    let dom = u.domain();
    let faces = lower_faces(dom.dim(), dom.nodes(), u.values())?;
    LowerHull::from_faces(dom.dim(), faces)
}

/// Convex envelope of a finite set of lifted points; vertex ids refer to the
/// positions in `pts`.
pub fn lower_hull_of_points(dim: usize, pts: &[Point], vals: &[f64]) -> Result<LowerHull> {
    if pts.len() != vals.len() {
        return Err(Error::SizeMismatch {
            expected: pts.len(),
            found: vals.len(),
        });
    }
    let faces = lower_faces(dim, pts, vals)?;
    LowerHull::from_faces(dim, faces)
}

/// Convex envelope of boundary data at `x`:
/// `max { L(x) : L affine, L(s) <= g(s) for every sample s }`.
///
/// Solved through the dual program `min Σ λ_i g(s_i)` over convex weights
/// with `Σ λ_i s_i = x`.
pub fn boundary_envelope_eval(
    dim: usize,
    g: impl Fn(Point) -> f64,
    samples: &[Point],
    x: Point,
) -> Result<f64> {
    if samples.len() < dim + 1 {
        return Err(Error::DegenerateInput);
    }
    let affinely_independent = if dim == 1 {
        samples.iter().any(|s| s[0] != samples[0][0])
    } else {
        geom::convex_hull_indices(samples, 0.0).len() >= 3
    };
    if !affinely_independent {
        return Err(Error::DegenerateInput);
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    rows.push(alloc::vec![1.0; samples.len()]);
    for k in 0..dim {
        rows.push(samples.iter().map(|s| s[k]).collect());
    }
    let mut rhs = alloc::vec![1.0];
    rhs.extend_from_slice(&x[..dim]);
    let costs: Vec<f64> = samples.iter().map(|&s| g(s)).collect();
    match lp::minimize(&rows, &rhs, &costs) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Infeasible => Err(Error::UnboundedEnvelope(x)),
        // bounded costs over a bounded feasible set
        LpOutcome::Unbounded => Err(Error::DegenerateInput),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ConvexDomain, DirectionSet, LatticeDomain};

    fn figure_one() -> (Vec<Point>, Vec<f64>) {
        (
            alloc::vec![[-1.5, 0.0], [-1.0, 0.0], [1.0, 0.0], [1.5, 0.0]],
            alloc::vec![1.0, 0.0, 0.0, 1.0],
        )
    }

    #[test]
    fn figure_one_envelope() {
        let (p, v) = figure_one();
        let hull = lower_hull_of_points(1, &p, &v).unwrap();
        let slopes: Vec<f64> = hull.faces().iter().map(|f| f.slope[0]).collect();
        assert_eq!(slopes, alloc::vec![-2.0, 0.0, 2.0]);
        assert_eq!(hull.gamma_eval([0.0, 0.0]).unwrap(), 0.0);
        assert!((hull.gamma_eval([-1.25, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(hull.gamma_extension_eval([2.0, 0.0]), 2.0);
        assert_eq!(hull.gamma_extension_eval([-2.0, 0.0]), 2.0);
        assert!(matches!(hull.gamma_eval([2.0, 0.0]), Err(Error::OutsideHull(_))));
    }

    #[test]
    fn affine_data_gives_one_plane() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            0.25,
            DirectionSet::new(2, 1).unwrap(),
        )
        .unwrap();
        let u = MeshFunction::sample(&dom, |x| 2.0 * x[0] - x[1] + 0.5).unwrap();
        let hull = lower_hull(&u).unwrap();
        for f in hull.faces() {
            assert!((f.slope[0] - 2.0).abs() < 1e-12 && (f.slope[1] + 1.0).abs() < 1e-12);
            assert!((f.offset - 0.5).abs() < 1e-12);
        }
        // only the square corners are vertices
        assert_eq!(hull.vertices().len(), 4);
        assert!((hull.covered_measure() - 4.0).abs() < 1e-12);
        assert_eq!(hull.contact_set(&u).len(), dom.num_interior());
    }

    #[test]
    fn quadratic_on_coarse_box() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            1.0,
            DirectionSet::new(2, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(dom.num_nodes(), 9);
        let u = MeshFunction::sample(&dom, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let hull = lower_hull(&u).unwrap();
        assert_eq!(hull.vertices().len(), 9);
        for (i, x) in dom.nodes().iter().enumerate() {
            assert!((hull.gamma_eval(*x).unwrap() - u.value(i)).abs() < 1e-12);
        }
        assert!((hull.gamma_eval([0.5, 0.5]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn contact_sets_in_one_dimension() {
        let dom = LatticeDomain::build(
            ConvexDomain::interval(-1.0, 1.0).unwrap(),
            1.0,
            DirectionSet::new(1, 1).unwrap(),
        )
        .unwrap();
        let bump = MeshFunction::sample(&dom, |x| if x[0] == 0.0 { 0.5 } else { 0.0 }).unwrap();
        assert!(lower_hull(&bump).unwrap().contact_set(&bump).is_empty());
        let hat = MeshFunction::sample(&dom, |x| x[0].abs()).unwrap();
        assert_eq!(lower_hull(&hat).unwrap().contact_set(&hat).nodes, alloc::vec![0]);
    }

    #[test]
    fn boundary_envelope_of_quadratic_data() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            0.25,
            DirectionSet::new(2, 1).unwrap(),
        )
        .unwrap();
        let mut samples = dom.boundary_nodes().to_vec();
        samples.extend(dom.domain().corners());
        let g = |x: Point| x[0] * x[0] + x[1] * x[1];
        let v = boundary_envelope_eval(2, g, &samples, [0.0, 0.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // agrees with the lower hull of the lifted samples
        let vals: Vec<f64> = samples.iter().map(|&s| g(s)).collect();
        let hull = lower_hull_of_points(2, &samples, &vals).unwrap();
        for x in [[0.3, -0.2], [0.9, 0.95], [-0.6, 0.1]] {
            let lp = boundary_envelope_eval(2, g, &samples, x).unwrap();
            assert!((lp - hull.gamma_eval(x).unwrap()).abs() < 1e-10);
        }
        assert!(matches!(
            boundary_envelope_eval(2, g, &samples, [1.5, 0.0]),
            Err(Error::UnboundedEnvelope(_))
        ));
        let aff = |x: Point| 0.5 * x[0] - 2.0 * x[1] + 1.0;
        let v = boundary_envelope_eval(2, aff, &samples, [0.2, 0.4]).unwrap();
        assert!((v - aff([0.2, 0.4])).abs() < 1e-12);
    }
}
