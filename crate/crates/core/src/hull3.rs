//! Incremental convex hull in three dimensions with exact orientation tests.
//!
//! Facets keep the points that see them strictly ("outside sets"); the
//! furthest outside point of a facet is inserted next. A point that sees no
//! facet strictly lies in the closed hull and is discarded, so coplanar
//! configurations never produce degenerate triangles.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub(crate) type P3 = [f64; 3];

#[inline]
fn c3(p: P3) -> robust::Coord3D<f64> {
    robust::Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Positive when `d` lies on the outer side of the counterclockwise facet
/// `(a, b, c)`.
#[inline]
pub(crate) fn height(a: P3, b: P3, c: P3, d: P3) -> f64 {
    -robust::orient3d(c3(a), c3(b), c3(c), c3(d))
}

#[derive(Debug, Clone)]
struct Facet {
    v: [usize; 3],
    /// `nbr[i]` lies across the edge `v[i] -> v[(i + 1) % 3]`.
    nbr: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
}

/// Triangles of the convex hull of `pts`, counterclockwise seen from
/// outside. Returns `None` when all points are coplanar.
pub(crate) fn convex_hull_3d(pts: &[P3]) -> Option<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    let seed = initial_simplex(pts)?;
    let mut facets: Vec<Facet> = Vec::new();
    let [a, b, c, d] = seed;
    let mut tri = [[a, b, c], [a, d, b], [b, d, c], [c, d, a]];
    for t in tri.iter_mut() {
        let opp = seed.iter().copied().find(|v| !t.contains(v)).unwrap();
        if height(pts[t[0]], pts[t[1]], pts[t[2]], pts[opp]) > 0.0 {
            t.swap(1, 2);
        }
    }
    for t in tri {
        facets.push(Facet {
            v: t,
            nbr: [usize::MAX; 3],
            outside: Vec::new(),
            alive: true,
        });
    }
    link_all(&mut facets);

    for p in 0..n {
        if seed.contains(&p) {
            continue;
        }
        for f in facets.iter_mut() {
            let v = f.v;
            if height(pts[v[0]], pts[v[1]], pts[v[2]], pts[p]) > 0.0 {
                f.outside.push(p);
                break;
            }
        }
    }

    let mut stack: Vec<usize> = (0..facets.len()).collect();
    let mut visible: Vec<usize> = Vec::new();
    let mut mark: Vec<u32> = alloc::vec![0; facets.len()];
    let mut epoch = 0u32;
    while let Some(f0) = stack.pop() {
        if !facets[f0].alive || facets[f0].outside.is_empty() {
            continue;
        }
        // furthest outside point of the facet
        let fv = facets[f0].v;
        let apex = *facets[f0]
            .outside
            .iter()
            .max_by(|&&p, &&q| {
                height(pts[fv[0]], pts[fv[1]], pts[fv[2]], pts[p])
                    .total_cmp(&height(pts[fv[0]], pts[fv[1]], pts[fv[2]], pts[q]))
            })
            .unwrap();
        let ap = pts[apex];

        epoch += 1;
        visible.clear();
        visible.push(f0);
        mark[f0] = epoch;
        let mut head = 0;
        while head < visible.len() {
            let f = visible[head];
            head += 1;
            for &g in &facets[f].nbr {
                if mark[g] == epoch {
                    continue;
                }
                let gv = facets[g].v;
                if height(pts[gv[0]], pts[gv[1]], pts[gv[2]], ap) > 0.0 {
                    mark[g] = epoch;
                    visible.push(g);
                }
            }
        }

        // horizon edges (a -> b) of visible facets with their outer neighbor
        let mut horizon: Vec<(usize, usize, usize)> = Vec::new();
        for &f in &visible {
            for i in 0..3 {
                let g = facets[f].nbr[i];
                if mark[g] != epoch {
                    horizon.push((facets[f].v[i], facets[f].v[(i + 1) % 3], g));
                }
            }
        }

        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            facets[f].alive = false;
            orphans.append(&mut facets[f].outside);
        }

        let first_new = facets.len();
        let mut by_start: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b, g) in &horizon {
            let id = facets.len();
            facets.push(Facet {
                v: [a, b, apex],
                nbr: [g, usize::MAX, usize::MAX],
                outside: Vec::new(),
                alive: true,
            });
            mark.push(0);
            let gf = &mut facets[g];
            for i in 0..3 {
                if gf.v[i] == b && gf.v[(i + 1) % 3] == a {
                    gf.nbr[i] = id;
                }
            }
            by_start.insert(a, id);
        }
        for id in first_new..facets.len() {
            // edge b -> apex is shared with the new facet starting at b,
            // edge apex -> a with the new facet ending at a
            let next = by_start[&facets[id].v[1]];
            facets[id].nbr[1] = next;
            facets[next].nbr[2] = id;
        }

        for p in orphans {
            if p == apex {
                continue;
            }
            for id in first_new..facets.len() {
                let v = facets[id].v;
                if height(pts[v[0]], pts[v[1]], pts[v[2]], pts[p]) > 0.0 {
                    facets[id].outside.push(p);
                    break;
                }
            }
        }
        for id in first_new..facets.len() {
            if !facets[id].outside.is_empty() {
                stack.push(id);
            }
        }
    }

    Some(facets.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn link_all(facets: &mut [Facet]) {
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (id, f) in facets.iter().enumerate() {
        for i in 0..3 {
            edges.insert((f.v[i], f.v[(i + 1) % 3]), id);
        }
    }
    for f in facets.iter_mut() {
        for i in 0..3 {
            f.nbr[i] = edges[&(f.v[(i + 1) % 3], f.v[i])];
        }
    }
}

fn initial_simplex(pts: &[P3]) -> Option<[usize; 4]> {
    let n = pts.len();
    let a = 0;
    let d2 = |p: P3, q: P3| (0..3).map(|k| (p[k] - q[k]) * (p[k] - q[k])).sum::<f64>();
    let b = (0..n).max_by(|&i, &j| d2(pts[a], pts[i]).total_cmp(&d2(pts[a], pts[j])))?;
    if d2(pts[a], pts[b]) == 0.0 {
        return None;
    }
    let area = |i: usize| {
        let u = [pts[b][0] - pts[a][0], pts[b][1] - pts[a][1], pts[b][2] - pts[a][2]];
        let v = [pts[i][0] - pts[a][0], pts[i][1] - pts[a][1], pts[i][2] - pts[a][2]];
        let c = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        c[0] * c[0] + c[1] * c[1] + c[2] * c[2]
    };
    let c = (0..n).max_by(|&i, &j| area(i).total_cmp(&area(j)))?;
    if area(c) == 0.0 {
        return None;
    }
    let d = (0..n).max_by(|&i, &j| {
        height(pts[a], pts[b], pts[c], pts[i])
            .abs()
            .total_cmp(&height(pts[a], pts[b], pts[c], pts[j]).abs())
    })?;
    if height(pts[a], pts[b], pts[c], pts[d]) == 0.0 {
        return None;
    }
    Some([a, b, c, d])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_convention() {
        // counterclockwise seen from +z: outward normal is +z
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0];
        let c = [0.0, 1.0, 0.0];
        assert!(height(a, b, c, [0.2, 0.2, 1.0]) > 0.0);
        assert!(height(a, b, c, [0.2, 0.2, -1.0]) < 0.0);
    }

    #[test]
    fn cube_with_interior_and_face_points() {
        let mut pts = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    pts.push([i as f64, j as f64, k as f64]);
                }
            }
        }
        let tris = convex_hull_3d(&pts).unwrap();
        // 6 square faces, 2 triangles each; only the 8 corners are vertices
        assert_eq!(tris.len(), 12);
        let mut used: Vec<usize> = tris.iter().flatten().copied().collect();
        used.sort();
        used.dedup();
        assert_eq!(used.len(), 8);
        // Euler check and outward orientation
        let centre = [1.0, 1.0, 1.0];
        for t in &tris {
            assert!(height(pts[t[0]], pts[t[1]], pts[t[2]], centre) < 0.0);
        }
    }

    #[test]
    fn coplanar_points_have_no_hull() {
        let pts = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]];
        assert!(convex_hull_3d(&pts).is_none());
    }
}
