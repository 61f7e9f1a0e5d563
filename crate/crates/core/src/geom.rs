//! Planar geometry helpers shared by the envelope and subdifferential code.

use alloc::vec::Vec;

use crate::math;
use crate::Point;

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// z-component of the cross product.
#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    math::hypot(a[0], a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Exact orientation sign of `(a, b, c)`: positive when counterclockwise.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
    )
}

/// Orientation of `(a, b, c)` divided by `|b - a| |c - a|`: the sine of the
/// angle at `a`, zero for coincident points.
pub fn normalized_orient(a: Point, b: Point, c: Point) -> f64 {
    let u = sub(b, a);
    let v = sub(c, a);
    let den = norm(u) * norm(v);
    if den == 0.0 {
        0.0
    } else {
        cross(u, v) / den
    }
}

fn lex_cmp(a: &Point, b: &Point) -> core::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Indices of the strictly convex hull of `points` in counterclockwise order,
/// starting from the lexicographically smallest point. Points whose
/// normalized orientation is within `tol` of zero are treated as collinear and
/// dropped.
///
/// Returns one index for a single (or all coincident) point and two for a
/// collinear set.
pub fn convex_hull_indices(points: &[Point], tol: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| lex_cmp(&points[i], &points[j]));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() <= 2 {
        return idx;
    }
    let keep = |chain: &Vec<usize>, c: usize| -> bool {
        let n = chain.len();
        let (a, b) = (points[chain[n - 2]], points[chain[n - 1]]);
        let c = points[c];
        // a turn is kept only when it is strictly left beyond the tolerance
        normalized_orient(a, b, c) > tol && orient(a, b, c) > 0.0
    };
    let mut lower: Vec<usize> = Vec::with_capacity(idx.len());
    for &i in &idx {
        while lower.len() >= 2 && !keep(&lower, i) {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::with_capacity(idx.len());
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && !keep(&upper, i) {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && points[lower[0]] == points[lower[1]] {
        lower.pop();
    }
    lower
}

/// Strictly convex hull of `points`, counterclockwise.
pub fn convex_hull(points: &[Point], tol: f64) -> Vec<Point> {
    convex_hull_indices(points, tol)
        .into_iter()
        .map(|i| points[i])
        .collect()
}

/// Signed shoelace area (positive for counterclockwise polygons).
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let o = poly[0];
    let mut acc = 0.0;
    for i in 1..n - 1 {
        acc += cross(sub(poly[i], o), sub(poly[i + 1], o));
    }
    0.5 * acc
}

pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len() as f64;
    let s = poly.iter().fold([0.0, 0.0], |acc, p| add(acc, *p));
    scale(s, 1.0 / n)
}

/// Clips a convex polygon with the halfplane `{ p : a·p <= c }`.
///
/// Vertices with `a·p - c <= tol` are kept, so a polygon squeezed onto a line
/// or a point by opposite constraints degenerates into a sliver instead of
/// vanishing.
pub fn clip_halfplane(poly: &[Point], a: Point, c: f64, tol: f64, out: &mut Vec<Point>) {
    out.clear();
    let n = poly.len();
    if n == 0 {
        return;
    }
    if n == 1 {
        if dot(a, poly[0]) - c <= tol {
            out.push(poly[0]);
        }
        return;
    }
    let val = |p: Point| dot(a, p) - c;
    let mut prev = poly[n - 1];
    let mut prev_val = val(prev);
    for &cur in poly {
        let cur_val = val(cur);
        let prev_in = prev_val <= tol;
        let cur_in = cur_val <= tol;
        if prev_in != cur_in {
            // crossing of the line a·p = c
            let t = prev_val / (prev_val - cur_val);
            let t = t.clamp(0.0, 1.0);
            out.push(add(prev, scale(sub(cur, prev), t)));
        }
        if cur_in {
            out.push(cur);
        }
        prev = cur;
        prev_val = cur_val;
    }
}

/// Removes repeated vertices (within `merge_tol`) and vertices whose
/// normalized turn is below `collinear_tol`.
pub fn prune_polygon(poly: &mut Vec<Point>, merge_tol: f64, collinear_tol: f64) {
    let mut changed = true;
    while changed && poly.len() > 1 {
        changed = false;
        let n = poly.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if dist(poly[i], poly[j]) <= merge_tol {
                poly.remove(j);
                changed = true;
                break;
            }
        }
        if changed || poly.len() < 3 {
            continue;
        }
        let n = poly.len();
        for i in 0..n {
            let a = poly[(i + n - 1) % n];
            let b = poly[i];
            let c = poly[(i + 1) % n];
            if normalized_orient(a, b, c).abs() <= collinear_tol {
                poly.remove(i);
                changed = true;
                break;
            }
        }
    }
    if poly.len() == 2 && dist(poly[0], poly[1]) <= merge_tol {
        poly.pop();
    }
}

pub fn dist_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}

/// Euclidean distance from `p` to a convex polygon given counterclockwise
/// (a point or a segment when it has one or two vertices). Zero inside.
pub fn dist_point_convex(p: Point, poly: &[Point]) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => dist(p, poly[0]),
        2 => dist_point_segment(p, poly[0], poly[1]),
        n => {
            let mut inside = true;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                if cross(sub(b, a), sub(p, a)) < 0.0 {
                    inside = false;
                }
                best = best.min(dist_point_segment(p, a, b));
            }
            if inside {
                0.0
            } else {
                best
            }
        }
    }
}

/// Intersection of two convex counterclockwise polygons.
pub fn convex_intersection(a: &[Point], b: &[Point]) -> Vec<Point> {
    let mut cur: Vec<Point> = a.to_vec();
    let mut next = Vec::with_capacity(a.len() + b.len());
    let n = b.len();
    for i in 0..n {
        let p = b[i];
        let q = b[(i + 1) % n];
        let e = sub(q, p);
        // inside is the left side of p->q: cross(e, x - p) >= 0  <=>  n·x <= n·p
        let normal = [e[1], -e[0]];
        clip_halfplane(&cur, normal, dot(normal, p), 0.0, &mut next);
        core::mem::swap(&mut cur, &mut next);
        if cur.is_empty() {
            break;
        }
    }
    cur
}

/// Orientation determinant in double-double arithmetic: accurate to working
/// precision relative to itself, even for nearly collinear points where the
/// plain formula loses every digit.
pub fn orient_dd(a: Point, b: Point, c: Point) -> f64 {
    let two_diff = |x: f64, y: f64| {
        let s = x - y;
        let bb = s - x;
        (s, (x - (s - bb)) - (y + bb))
    };
    // (h1 + l1)(h2 + l2) as an unevaluated sum, dropping l1·l2
    let prod = |(h1, l1): (f64, f64), (h2, l2): (f64, f64)| {
        let p = h1 * h2;
        let e = math::fma(h1, h2, -p);
        (p, e + h1 * l2 + l1 * h2)
    };
    let (p1, e1) = prod(two_diff(b[0], a[0]), two_diff(c[1], a[1]));
    let (p2, e2) = prod(two_diff(b[1], a[1]), two_diff(c[0], a[0]));
    let (s, t) = two_diff(p1, p2);
    s + (t + (e1 - e2))
}

/// Barycentric coordinates of `p` in the triangle `(a, b, c)`.
pub fn barycentric(p: Point, a: Point, b: Point, c: Point) -> [f64; 3] {
    // Each coordinate from its own sub-triangle so that corners come out
    // exact even on slivers.
    let l = [orient_dd(b, c, p), orient_dd(c, a, p), orient_dd(a, b, p)];
    let det = l[0] + l[1] + l[2];
    [l[0] / det, l[1] / det, l[2] / det]
}
