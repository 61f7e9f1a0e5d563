//! Mesh functions and their directional second differences.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geom;
use crate::lattice::LatticeDomain;
use crate::{Direction, Point};

/// Real values on the node set of a lattice domain, indexed by node id.
#[derive(Debug, Clone)]
pub struct MeshFunction<'a> {
    dom: &'a LatticeDomain,
    values: Vec<f64>,
}

/// A strict violation `Δ_e u(x) < -tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub node: usize,
    pub dir: Direction,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub is_discrete_convex: bool,
    pub violations: Vec<Violation>,
    pub min_delta: f64,
    pub tolerance: f64,
}

impl<'a> MeshFunction<'a> {
    pub fn from_values(dom: &'a LatticeDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != dom.num_nodes() {
            return Err(Error::SizeMismatch {
                expected: dom.num_nodes(),
                found: values.len(),
            });
        }
        if let Some(node) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { node });
        }
        Ok(Self { dom, values })
    }

    /// Samples `f` at every node.
    pub fn sample(dom: &'a LatticeDomain, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = dom.nodes().iter().map(|&x| f(x)).collect();
        Self::from_values(dom, values)
    }

    /// Samples `interior` on interior nodes and `boundary` on boundary nodes.
    pub fn sample_split(
        dom: &'a LatticeDomain,
        interior: impl Fn(Point) -> f64,
        boundary: impl Fn(Point) -> f64,
    ) -> Result<Self> {
        let values = (0..dom.num_nodes())
            .map(|i| {
                let x = dom.node(i);
                if dom.is_interior(i) {
                    interior(x)
                } else {
                    boundary(x)
                }
            })
            .collect();
        Self::from_values(dom, values)
    }

    pub fn domain(&self) -> &'a LatticeDomain {
        self.dom
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, id: usize) -> f64 {
        self.values[id]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `max |u|`, at least 1; the reference magnitude for value tolerances.
    pub fn value_scale(&self) -> f64 {
        self.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    /// Nodewise `alpha·u + beta·v`.
    pub fn combine(&self, alpha: f64, other: &MeshFunction<'_>, beta: f64) -> Result<MeshFunction<'a>> {
        if other.values.len() != self.values.len() {
            return Err(Error::SizeMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        MeshFunction::from_values(self.dom, values)
    }

    /// Applies `f(x, u(x))` nodewise.
    pub fn map(&self, f: impl Fn(Point, f64) -> f64) -> Result<MeshFunction<'a>> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.dom.node(i), v))
            .collect();
        MeshFunction::from_values(self.dom, values)
    }

    fn check_interior(&self, x: usize) -> Result<()> {
        if self.dom.is_interior(x) {
            Ok(())
        } else {
            Err(Error::NotInterior(x))
        }
    }

    /// Second difference along the `k`-th stencil direction.
    pub(crate) fn delta_dir(&self, x: usize, k: usize) -> f64 {
        let fwd = self.dom.link(x, k);
        let bwd = self.dom.link(x, self.dom.directions().opposite(k));
        let ux = self.values[x];
        2.0 / (fwd.step + bwd.step)
            * ((self.values[fwd.node] - ux) / fwd.step + (self.values[bwd.node] - ux) / bwd.step)
    }

    /// `Δ_e u(x)` with the boundary-fitted steps `h^{±e}_x`.
    ///
    /// Directions outside the stencil are accepted only when both lattice
    /// neighbors `x ± h e` are interior nodes.
    pub fn delta_e(&self, x: usize, e: Direction) -> Result<f64> {
        self.check_interior(x)?;
        if let Some(k) = self.dom.directions().position(e) {
            return Ok(self.delta_dir(x, k));
        }
        let idx = self.dom.lattice_index(x);
        let fwd = self.dom.find_interior([idx[0] + e[0], idx[1] + e[1]]);
        let bwd = self.dom.find_interior([idx[0] - e[0], idx[1] - e[1]]);
        match (fwd, bwd) {
            (Some(f), Some(b)) => {
                let h = self.dom.h();
                Ok((self.values[f] - 2.0 * self.values[x] + self.values[b]) / (h * h))
            }
            _ => Err(Error::MissingNode { node: x, dir: e }),
        }
    }

    /// Checks `Δ_e u(x) >= -tol` at every interior node and every direction
    /// pair, with `tol = 1e-12·(max|u| + 1)`.
    pub fn convexity_report(&self) -> ConvexityReport {
        let tol = 1e-12 * (self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())) + 1.0);
        let dirs = self.dom.directions();
        let mut violations = Vec::new();
        let mut min_delta = f64::INFINITY;
        for x in self.dom.interior_ids() {
            for k in dirs.representatives() {
                let d = self.delta_dir(x, k);
                min_delta = min_delta.min(d);
                if d < -tol {
                    violations.push(Violation {
                        node: x,
                        dir: dirs.get(k),
                        delta: d,
                    });
                }
            }
        }
        ConvexityReport {
            is_discrete_convex: violations.is_empty(),
            violations,
            min_delta,
            tolerance: tol,
        }
    }

    pub fn is_discrete_convex(&self) -> bool {
        self.convexity_report().is_discrete_convex
    }

    /// Nodes on the lattice line through `x0` with direction `e`, ordered
    /// along `e`, including the two boundary nodes that end it.
    pub fn line_nodes(&self, x0: usize, e: Direction) -> Result<Vec<usize>> {
        self.check_interior(x0)?;
        let dirs = self.dom.directions();
        let k = dirs.position(e).ok_or(Error::MissingNode { node: x0, dir: e })?;
        let walk = |k: usize| {
            let mut out = Vec::new();
            let mut cur = x0;
            loop {
                let l = self.dom.link(cur, k);
                out.push(l.node);
                if !self.dom.is_interior(l.node) {
                    break;
                }
                cur = l.node;
            }
            out
        };
        let mut back = walk(dirs.opposite(k));
        back.reverse();
        back.push(x0);
        back.extend(walk(k));
        Ok(back)
    }

    /// Whether the piecewise linear interpolant of `u` along the lattice line
    /// through `x0` in direction `e` is convex: consecutive chord slopes are
    /// nondecreasing up to `1e-12·scale`.
    pub fn line_interpolant_is_convex(&self, x0: usize, e: Direction) -> Result<bool> {
        let line = self.line_nodes(x0, e)?;
        if line.len() < 3 {
            return Err(Error::DegenerateLine { node: x0 });
        }
        let dir = [e[0] as f64, e[1] as f64];
        let origin = self.dom.node(x0);
        let param = |n: usize| geom::dot(geom::sub(self.dom.node(n), origin), dir);
        let slopes: Vec<f64> = line
            .windows(2)
            .map(|w| (self.values[w[1]] - self.values[w[0]]) / (param(w[1]) - param(w[0])))
            .collect();
        let scale = slopes.iter().fold(1.0_f64, |m, s| m.max(s.abs()));
        let tol = 1e-12 * scale;
        Ok(slopes.windows(2).all(|s| s[1] >= s[0] - tol))
    }

    /// Largest difference quotient `|u(x) - u(y)| / ‖x - y‖` over node pairs.
    ///
    /// Above `10^6` pairs the inner loop is strided so that at most about
    /// `10^6` pairs are visited; the subsample is deterministic.
    pub fn lipschitz_ratio_max(&self) -> f64 {
        let nodes = self.dom.nodes();
        let n = nodes.len();
        let pairs = n * (n - 1) / 2;
        let stride = pairs.div_ceil(1_000_000).max(1);
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut j = i + 1 + (i % stride);
            while j < n {
                let d = geom::dist(nodes[i], nodes[j]);
                if d > 0.0 {
                    best = best.max((self.values[i] - self.values[j]).abs() / d);
                }
                j += stride;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ConvexDomain, DirectionSet};

    fn grid_1d(a: f64, b: f64, h: f64) -> LatticeDomain {
        LatticeDomain::build(
            ConvexDomain::interval(a, b).unwrap(),
            h,
            DirectionSet::new(1, 1).unwrap(),
        )
        .unwrap()
    }

    fn values_by_coord(dom: &LatticeDomain, f: impl Fn(f64) -> f64) -> Vec<f64> {
        dom.nodes().iter().map(|p| f(p[0])).collect()
    }

    #[test]
    fn quadratic_second_differences() {
        let dom = LatticeDomain::build(
            ConvexDomain::rectangle([-1.0, -1.0], [1.0, 1.0]).unwrap(),
            0.25,
            DirectionSet::new(2, 1).unwrap(),
        )
        .unwrap();
        let u = MeshFunction::sample(&dom, |x| 0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let x = dom.locate([0.0, 0.0]).unwrap();
        assert!((u.delta_e(x, [1, 0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((u.delta_e(x, [1, 1]).unwrap() - 2.0).abs() < 1e-12);
        let affine = MeshFunction::sample(&dom, |x| 3.0 * x[0] - x[1] + 2.0).unwrap();
        for k in 0..dom.directions().len() {
            let e = dom.directions().get(k);
            assert!(affine.delta_e(x, e).unwrap().abs() < 1e-12);
        }
        let report = u.convexity_report();
        assert!(report.is_discrete_convex);
        assert!((report.min_delta - 1.0).abs() < 1e-12);
        let concave = MeshFunction::sample(&dom, |x| -0.5 * (x[0] * x[0] + x[1] * x[1])).unwrap();
        let report = concave.convexity_report();
        assert!(!report.is_discrete_convex);
        assert_eq!(report.violations.len(), dom.num_interior() * 4);
    }

    #[test]
    fn bump_is_not_convex() {
        let dom = grid_1d(0.0, 1.0, 0.25);
        let vals = values_by_coord(&dom, |x| if x == 0.5 { 0.1 } else { 0.0 });
        let u = MeshFunction::from_values(&dom, vals).unwrap();
        let report = u.convexity_report();
        assert!(!report.is_discrete_convex);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(dom.node(report.violations[0].node), [0.5, 0.0]);
        // 2/(2h) · (-0.1/h - 0.1/h) = -0.2 / h^2
        assert!((report.violations[0].delta + 0.2 / 0.0625).abs() < 1e-12);
    }

    #[test]
    fn line_interpolants() {
        let dom = grid_1d(-1.0, 1.0, 1.0);
        let hat = MeshFunction::from_values(&dom, values_by_coord(&dom, |x| x.abs())).unwrap();
        assert!(hat.line_interpolant_is_convex(0, [1, 0]).unwrap());
        let bump = MeshFunction::from_values(&dom, values_by_coord(&dom, |x| 1.0 - x.abs())).unwrap();
        assert!(!bump.line_interpolant_is_convex(0, [1, 0]).unwrap());
    }

    #[test]
    fn lipschitz_examples() {
        let dom = grid_1d(-1.0, 1.0, 0.25);
        let c = MeshFunction::sample(&dom, |_| 4.0).unwrap();
        assert_eq!(c.lipschitz_ratio_max(), 0.0);
        let lin = MeshFunction::sample(&dom, |x| x[0]).unwrap();
        assert!((lin.lipschitz_ratio_max() - 1.0).abs() < 1e-15);
        let q = MeshFunction::sample(&dom, |x| 0.5 * x[0] * x[0]).unwrap();
        assert!((q.lipschitz_ratio_max() - 0.875).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        let dom = grid_1d(0.0, 1.0, 0.25);
        assert_eq!(
            MeshFunction::from_values(&dom, alloc::vec![0.0; 3]).unwrap_err(),
            Error::SizeMismatch { expected: 5, found: 3 }
        );
        let err = MeshFunction::sample(&dom, |x| if x[0] == 0.5 { f64::NAN } else { 0.0 }).unwrap_err();
        assert!(matches!(err, Error::NonFiniteValue { .. }));
        let u = MeshFunction::sample(&dom, |_| 0.0).unwrap();
        assert_eq!(u.delta_e(4, [1, 0]), Err(Error::NotInterior(4)));
    }
}
