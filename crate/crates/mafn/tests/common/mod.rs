//! Independent oracles for the acceptance suite.

#![allow(dead_code)]

use mafn_core::Point;

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// The `i`-th point of the base (2, 3) Halton sequence in the unit square.
pub fn halton(i: u64) -> Point {
    [radical_inverse(i + 1, 2), radical_inverse(i + 1, 3)]
}

fn inside_convex(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    let (mut pos, mut neg) = (false, false);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        pos |= c > 0.0;
        neg |= c < 0.0;
        if pos && neg {
            return false;
        }
    }
    true
}

/// Quasi-Monte-Carlo area of a union of convex polygons from `samples`
/// Halton points in their common bounding box.
pub fn mc_union_area(polys: &[Vec<Point>], samples: u64) -> f64 {
    let polys: Vec<&Vec<Point>> = polys.iter().filter(|p| p.len() >= 3).collect();
    if polys.is_empty() {
        return 0.0;
    }
    let bbox = |p: &[Point]| {
        p.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, q| {
            [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[0]), b[3].max(q[1])]
        })
    };
    let boxes: Vec<[f64; 4]> = polys.iter().map(|p| bbox(p)).collect();
    let all = boxes.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, q| {
        [b[0].min(q[0]), b[1].min(q[1]), b[2].max(q[2]), b[3].max(q[3])]
    });
    let (w, h) = (all[2] - all[0], all[3] - all[1]);
    const G: usize = 64;
    let cell_of = |x: f64, lo: f64, len: f64| (((x - lo) / len * G as f64) as usize).min(G - 1);
    let mut grid = vec![Vec::new(); G * G];
    for (k, b) in boxes.iter().enumerate() {
        for i in cell_of(b[0], all[0], w)..=cell_of(b[2], all[0], w) {
            for j in cell_of(b[1], all[1], h)..=cell_of(b[3], all[1], h) {
                grid[i * G + j].push(k);
            }
        }
    }
    let hits = (0..samples)
        .filter(|&s| {
            let u = halton(s);
            let p = [all[0] + u[0] * w, all[1] + u[1] * h];
            grid[cell_of(p[0], all[0], w) * G + cell_of(p[1], all[1], h)]
                .iter()
                .any(|&k| inside_convex(p, polys[k]))
        })
        .count();
    hits as f64 / samples as f64 * w * h
}

/// Exact length of a union of closed intervals.
pub fn interval_union_length(mut iv: Vec<(f64, f64)>) -> f64 {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in iv {
        cur = match cur {
            Some((a, b)) if lo <= b => Some((a, b.max(hi))),
            Some((a, b)) => {
                total += b - a;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((a, b)) = cur {
        total += b - a;
    }
    total
}

/// Spread of chord slopes of a convex 1-D profile: the last chord slope minus
/// the first, with nodes sorted by position.
pub fn chord_slope_spread(mut pts: Vec<(f64, f64)>) -> f64 {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let slope = |i: usize| (pts[i + 1].1 - pts[i].1) / (pts[i + 1].0 - pts[i].0);
    slope(pts.len() - 2) - slope(0)
}
