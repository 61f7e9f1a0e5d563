//! Dirichlet problem for the boundary-fitted discrete Laplacian
//! `Δ_h = Σ_i Δ_{r_i}`, its maximum and comparison principles, and the
//! ring-barrier constants used for boundary estimates on Lipschitz domains.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::LatticeDomain;
use crate::math;
use crate::meshfn::MeshFunction;
use crate::Point;

/// `Δ_h w(x)` at an interior node.
pub fn discrete_laplacian(w: &MeshFunction<'_>, x: usize) -> Result<f64> {
    let dim = w.domain().dim();
    let mut acc = 0.0;
    for k in 0..dim {
        acc += w.delta_e(x, [(k == 0) as i64, (k == 1) as i64])?;
    }
    Ok(acc)
}

/// One row of `-Δ_h`: positive diagonal, nonpositive couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub diag: f64,
    /// Couplings to interior nodes.
    pub interior: Vec<(usize, f64)>,
    /// Couplings to boundary nodes, moved to the right-hand side.
    pub boundary: Vec<(usize, f64)>,
}

/// The matrix `-Δ_h` restricted to interior nodes.
#[derive(Debug, Clone)]
pub struct LaplaceSystem {
    rows: Vec<Row>,
    bandwidth: usize,
}

impl LaplaceSystem {
    pub fn assemble(dom: &LatticeDomain) -> Result<Self> {
        let dirs = dom.directions();
        let mut rows = Vec::with_capacity(dom.num_interior());
        let mut bandwidth = 0;
        for x in dom.interior_ids() {
            let mut row = Row {
                diag: 0.0,
                interior: Vec::new(),
                boundary: Vec::new(),
            };
            for k in 0..dom.dim() {
                let e = [(k == 0) as i64, (k == 1) as i64];
                let kf = dirs
                    .position(e)
                    .ok_or(Error::InvalidDirections("stencil lacks the canonical basis"))?;
                let f = dom.link(x, kf);
                let b = dom.link(x, dirs.opposite(kf));
                let s = f.step + b.step;
                row.diag += 2.0 / (f.step * b.step);
                for (l, c) in [(f, 2.0 / (s * f.step)), (b, 2.0 / (s * b.step))] {
                    if dom.is_interior(l.node) {
                        bandwidth = bandwidth.max(l.node.abs_diff(x));
                        row.interior.push((l.node, -c));
                    } else {
                        row.boundary.push((l.node, -c));
                    }
                }
            }
            rows.push(row);
        }
        Ok(Self { rows, bandwidth })
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest `|i - j|` over interior couplings.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn rhs(&self, boundary_values: &[f64], n_interior: usize) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| -r.boundary.iter().map(|&(b, c)| c * boundary_values[b - n_interior]).sum::<f64>())
            .collect()
    }

    fn solve_banded(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.rows.len();
        let bw = self.bandwidth;
        let w = 2 * bw + 1;
        let mut a = alloc::vec![0.0; n * w];
        let at = |i: usize, j: usize| i * w + j + bw - i;
        for (i, r) in self.rows.iter().enumerate() {
            a[at(i, i)] += r.diag;
            for &(j, c) in &r.interior {
                a[at(i, j)] += c;
            }
        }
        // no pivoting: the matrix is a diagonally dominant M-matrix
        for k in 0..n {
            let p = a[at(k, k)];
            if !(p.abs() > 0.0) || !p.is_finite() {
                return Err(Error::SingularSystem { row: k });
            }
            let end = n.min(k + bw + 1);
            for i in k + 1..end {
                let l = a[at(i, k)] / p;
                if l == 0.0 {
                    continue;
                }
                a[at(i, k)] = l;
                for j in k + 1..end {
                    a[at(i, j)] -= l * a[at(k, j)];
                }
            }
        }
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in i.saturating_sub(bw)..i {
                s -= a[at(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n.min(i + bw + 1) {
                s -= a[at(i, j)] * y[j];
            }
            y[i] = s / a[at(i, i)];
        }
        Ok(y)
    }

    /// Largest diagonally scaled residual `|(A w - f)_i| / a_ii`.
    fn scaled_residual(&self, x: &[f64], rhs: &[f64]) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let ax = r.diag * x[i] + r.interior.iter().map(|&(j, c)| c * x[j]).sum::<f64>();
                ((ax - rhs[i]) / r.diag).abs()
            })
            .fold(0.0, f64::max)
    }

    fn solve_gauss_seidel(&self, rhs: &[f64], target: f64) -> Result<Vec<f64>> {
        const MAX_SWEEPS: usize = 200_000;
        let mut x = alloc::vec![0.0; self.rows.len()];
        for _ in 0..MAX_SWEEPS {
            for (i, r) in self.rows.iter().enumerate() {
                let s: f64 = r.interior.iter().map(|&(j, c)| c * x[j]).sum();
                x[i] = (rhs[i] - s) / r.diag;
            }
            if self.scaled_residual(&x, rhs) <= target {
                return Ok(x);
            }
        }
        Err(Error::SolverNotConverged {
            residual: self.scaled_residual(&x, rhs),
        })
    }
}

/// Linear solver for [`solve_dirichlet_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    /// Banded LU factorization.
    #[default]
    Direct,
    /// Gauss-Seidel sweeps in node order down to a diagonally scaled residual
    /// of `1e-12·max|g|`.
    GaussSeidel,
}

/// The mesh function with `Δ_h w = 0` on interior nodes and `w = g` on
/// boundary nodes.
pub fn solve_dirichlet<'a>(dom: &'a LatticeDomain, g: impl Fn(Point) -> f64) -> Result<MeshFunction<'a>> {
    solve_dirichlet_with(dom, g, Solver::Direct)
}

pub fn solve_dirichlet_with<'a>(
    dom: &'a LatticeDomain,
    g: impl Fn(Point) -> f64,
    solver: Solver,
) -> Result<MeshFunction<'a>> {
    let n = dom.num_interior();
    let bvals: Vec<f64> = dom.boundary_nodes().iter().map(|&p| g(p)).collect();
    if let Some(k) = bvals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { node: n + k });
    }
    let sys = LaplaceSystem::assemble(dom)?;
    let rhs = sys.rhs(&bvals, n);
    let interior = match solver {
        Solver::Direct => sys.solve_banded(&rhs)?,
        Solver::GaussSeidel => {
            let gmax = bvals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            sys.solve_gauss_seidel(&rhs, 1e-12 * gmax)?
        }
    };
    let mut values = interior;
    values.extend_from_slice(&bvals);
    MeshFunction::from_values(dom, values)
}

/// `min g - 1e-10 <= w <= max g + 1e-10` at every interior node, with `g`
/// the boundary values of `w`.
pub fn check_max_principle(w: &MeshFunction<'_>) -> bool {
    let dom = w.domain();
    let (lo, hi) = dom
        .boundary_ids()
        .map(|b| w.value(b))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    dom.interior_ids()
        .all(|x| w.value(x) >= lo - 1e-10 && w.value(x) <= hi + 1e-10)
}

/// Checks `w1 <= w2 + 1e-9` on all nodes for a subsolution `w1` and a
/// supersolution `w2` with ordered boundary values.
///
/// The hypotheses `Δ_h w1 >= -tol`, `Δ_h w2 <= tol` and `w1 <= w2 + 1e-12`
/// on the boundary are verified first. The tolerance at a node is
/// `1e-10·max(1, |w1|, |w2|)` times the diagonal of `-Δ_h` there, the size of
/// rounding in the differences on short boundary steps.
pub fn check_comparison(w1: &MeshFunction<'_>, w2: &MeshFunction<'_>) -> Result<bool> {
    let dom = w1.domain();
    if w2.values().len() != w1.values().len() {
        return Err(Error::SizeMismatch {
            expected: w1.values().len(),
            found: w2.values().len(),
        });
    }
    let scale = 1e-10 * w1.value_scale().max(w2.value_scale());
    let system = LaplaceSystem::assemble(dom)?;
    for (x, row) in dom.interior_ids().zip(system.rows()) {
        let tol = scale * row.diag;
        if discrete_laplacian(w1, x)? < -tol {
            return Err(Error::HypothesisViolated {
                node: x,
                what: "the first function is not discretely subharmonic",
            });
        }
        if discrete_laplacian(w2, x)? > tol {
            return Err(Error::HypothesisViolated {
                node: x,
                what: "the second function is not discretely superharmonic",
            });
        }
    }
    for b in dom.boundary_ids() {
        if w1.value(b) > w2.value(b) + 1e-12 {
            return Err(Error::HypothesisViolated {
                node: b,
                what: "boundary values are not ordered",
            });
        }
    }
    Ok(w1.values().iter().zip(w2.values()).all(|(a, b)| *a <= b + 1e-9))
}

/// Ring-barrier constants for `μ ∈ (0, 1)`, `d >= 3` and `η > 0`, with
/// `ξ = d - 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConstants {
    pub mu: f64,
    pub d: u32,
    pub eta: f64,
    pub xi: u32,
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub a_prime: f64,
    pub b_prime: f64,
    pub gamma: f64,
}

pub fn barrier_constants(mu: f64, d: u32, eta: f64) -> Result<BarrierConstants> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::DomainError("mu must lie in (0, 1)"));
    }
    if d < 3 {
        return Err(Error::DomainError("the barrier needs dimension d >= 3"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::DomainError("eta must be positive"));
    }
    let xi = d - 2;
    let r = math::powi(mu / (2.0 - mu), xi);
    let half = math::powi(mu / 2.0, xi);
    let quarter = math::powi(mu / 4.0, xi);
    let theta = (1.0 - 0.5 * r - 0.5 * half) / (1.0 - half);
    let a = (1.0 - half) / (1.0 - quarter);
    let b = 1.0 - a;
    let a_prime = (1.0 - r) / (1.0 - quarter);
    let b_prime = (r - quarter) / (1.0 - quarter);
    let gamma = 0.25 * (r - half) / (1.0 - quarter) * eta / 4.0;
    let c = BarrierConstants {
        mu,
        d,
        eta,
        xi,
        theta,
        a,
        b,
        a_prime,
        b_prime,
        gamma,
    };
    // θ and a round to 1 once (μ/2)^ξ drops below the unit roundoff
    if ![theta, a, b, a_prime, b_prime, gamma].iter().all(|v| v.is_finite()) {
        return Err(Error::DomainError("barrier constants are not finite"));
    }
    Ok(c)
}
