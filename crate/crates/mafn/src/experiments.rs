//! Refinement sweeps and reference measures.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Result};
use mafn_core::envelope::{boundary_envelope_eval, lower_hull};
use mafn_core::laplace::{check_comparison, check_max_principle, solve_dirichlet};
use mafn_core::measure::{abp_check, measure_of_region, total_mass};
use mafn_core::{AtomicMeasure, ConvexDomain, Density, DirectionSet, Error, LatticeDomain, Point, QueryRegion, Shape};

use crate::builtins::{Builtin, GL5};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::io::num;
use crate::svg;

/// Relative change between successive levels at which the reference
/// integral is accepted.
pub const REFERENCE_TOL: f64 = 1e-8;
const MAX_PANELS: usize = 1 << 10;

/// One line of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub quantity: String,
    pub discrete: f64,
    pub reference: f64,
    pub error: f64,
    pub runtime_ms: f64,
}

impl ConvergenceRow {
    fn new(h: f64, quantity: impl Into<String>, discrete: f64, reference: f64, runtime_ms: f64) -> Self {
        Self {
            h,
            quantity: quantity.into(),
            discrete,
            reference,
            error: (discrete - reference).abs(),
            runtime_ms,
        }
    }
}

/// An asserted property of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub rows: Vec<ConvergenceRow>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Rows of one quantity in sweep order.
    pub fn series(&self, quantity: &str) -> Vec<&ConvergenceRow> {
        self.rows.iter().filter(|r| r.quantity == quantity).collect()
    }

    fn table(&self, with_runtime: bool) -> String {
        let mut s = String::from("h,quantity,discrete,reference,error");
        s.push_str(if with_runtime { ",runtime_ms\n" } else { "\n" });
        for r in &self.rows {
            write!(
                s,
                "{},{},{},{},{}",
                num(r.h),
                r.quantity,
                num(r.discrete),
                num(r.reference),
                num(r.error)
            )
            .unwrap();
            if with_runtime {
                write!(s, ",{:.3}", r.runtime_ms).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn csv(&self) -> String {
        self.table(true)
    }

    /// The CSV without the wall-clock column; identical across runs.
    pub fn deterministic_csv(&self) -> String {
        self.table(false)
    }

    pub fn svg(&self) -> String {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.quantity.as_str()) {
                names.push(&r.quantity);
            }
        }
        let series: Vec<svg::Series> = names
            .iter()
            .map(|q| svg::Series {
                label: q.to_string(),
                points: self.series(q).iter().map(|r| (r.h, r.error)).collect(),
            })
            .collect();
        svg::loglog(&self.name, "h", "error", &series)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
        }
        s
    }
}

fn lattice(cfg: &ExperimentConfig, h: f64) -> Result<LatticeDomain> {
    let dim = cfg.domain.dim();
    Ok(LatticeDomain::build(cfg.domain.clone(), h, DirectionSet::new(dim, cfg.stencil)?)?)
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// `∫_E R(Du) det D²u dx` plus the point masses of `u` inside the closed
/// region `E`, for a built-in test function.
pub fn reference_measure(f: &Builtin, region: &ConvexDomain, r: &Density<'_>) -> Result<f64> {
    let dim = region.dim();
    let integrand = |x: Point| {
        let det = f.hessian_det(x, dim);
        if det == 0.0 {
            0.0
        } else {
            r.eval(f.gradient(x, dim)) * det
        }
    };
    let mut total = integrate_region(region, &integrand)?;
    for (p, atom) in f.atoms(dim) {
        if region.contains_closure(p) {
            total += atom.mass(dim, r)?;
        }
    }
    Ok(total)
}

/// Composite Gauss-Legendre over a box, ball or polygon, doubling the panel
/// count until successive values agree to [`REFERENCE_TOL`].
pub fn integrate_region(region: &ConvexDomain, g: &dyn Fn(Point) -> f64) -> Result<f64> {
    let mut prev = integrate_panels(region, g, 2);
    let mut n = 4;
    loop {
        let cur = integrate_panels(region, g, n);
        let change = (cur - prev).abs();
        if change <= REFERENCE_TOL * cur.abs() || change == 0.0 {
            return Ok(cur);
        }
        if n >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged {
                estimate: cur,
                change: change / cur.abs(),
            }
            .into());
        }
        prev = cur;
        n *= 2;
    }
}

fn gauss_1d(a: f64, b: f64, n: usize, mut f: impl FnMut(f64, f64)) {
    let w = (b - a) / n as f64;
    for i in 0..n {
        let mid = a + (i as f64 + 0.5) * w;
        for (t, wt) in GL5 {
            f(mid + 0.5 * w * t, 0.5 * w * wt);
        }
    }
}

fn integrate_panels(region: &ConvexDomain, g: &dyn Fn(Point) -> f64, n: usize) -> f64 {
    let mut acc = 0.0;
    match region.shape() {
        _ if region.dim() == 1 => {
            let (lo, hi) = region.bounding_box();
            gauss_1d(lo[0], hi[0], n, |x, w| acc += w * g([x, 0.0]));
        }
        Shape::Box { lo, hi } => {
            gauss_1d(lo[0], hi[0], n, |x, wx| {
                gauss_1d(lo[1], hi[1], n, |y, wy| acc += wx * wy * g([x, y]));
            });
        }
        Shape::Ball { center, radius } => {
            gauss_1d(0.0, *radius, n, |rad, wr| {
                gauss_1d(0.0, 2.0 * PI, 4 * n, |t, wt| {
                    acc += wr * wt * rad * g([center[0] + rad * t.cos(), center[1] + rad * t.sin()]);
                });
            });
        }
        Shape::Polygon { vertices } => {
            let c = mafn_core::geom::centroid(vertices);
            for i in 0..vertices.len() {
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                // collapsed square (s, t) -> c + s(a - c) + s t (b - a)
                let jac = mafn_core::geom::cross(mafn_core::geom::sub(a, c), mafn_core::geom::sub(b, a)).abs();
                gauss_1d(0.0, 1.0, n, |s, ws| {
                    gauss_1d(0.0, 1.0, n, |t, wt| {
                        let p = [
                            c[0] + s * (a[0] - c[0]) + s * t * (b[0] - a[0]),
                            c[1] + s * (a[1] - c[1]) + s * t * (b[1] - a[1]),
                        ];
                        acc += ws * wt * s * jac * g(p);
                    });
                });
            }
        }
    }
    acc
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    match cfg.kind {
        ExperimentKind::WeakConvergence => run_weak_convergence(cfg),
        ExperimentKind::BoundaryLimit => run_boundary_limit(cfg),
        ExperimentKind::LaplaceConvergence => run_laplace_convergence(cfg),
        ExperimentKind::MassSweep => run_mass_sweep(cfg),
    }
}

fn decreasing(errors: &[f64], strict: bool) -> bool {
    errors.windows(2).all(|w| if strict { w[1] < w[0] } else { w[1] <= w[0] })
}

fn list(v: &[f64]) -> String {
    v.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Measures of the query regions against the reference measure of the test
/// function, for every `h`.
pub fn run_weak_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let density = cfg.density.density();
    let refs = cfg
        .regions
        .iter()
        .map(|(_, r)| reference_measure(&cfg.function, r, &density))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &h in &cfg.hs {
        let t = Instant::now();
        let dom = lattice(cfg, h)?;
        let u = cfg.function.sample(&dom)?;
        let hull = lower_hull(&u)?;
        let m = AtomicMeasure::compute(&u, &hull, &density)?;
        let ms = elapsed_ms(t);
        for ((label, region), reference) in cfg.regions.iter().zip(&refs) {
            let d = measure_of_region(&m, &QueryRegion(region.clone()));
            rows.push(ConvergenceRow::new(h, label.clone(), d, *reference, ms));
        }
    }
    let mut checks = Vec::new();
    for ((label, _), reference) in cfg.regions.iter().zip(&refs) {
        let errs: Vec<f64> = rows.iter().filter(|r| &r.quantity == label).map(|r| r.error).collect();
        let last = *errs.last().unwrap();
        let bound = if *reference != 0.0 { cfg.threshold * reference.abs() } else { 1e-12 };
        checks.push(Check {
            name: format!("{label} finest error"),
            passed: last <= bound,
            detail: format!("error {last:.4e} against bound {bound:.4e} (reference {reference:.6})"),
        });
        if cfg.monotone {
            checks.push(Check {
                name: format!("{label} monotone"),
                passed: decreasing(&errs, true),
                detail: format!("errors {}", list(&errs)),
            });
        }
    }
    Ok(Report {
        name: cfg.name.clone(),
        rows,
        checks,
    })
}

/// Gap between the envelope of `u_h` and the convex envelope of its boundary
/// values at nodes within `probe_band·h` of the boundary, with the total mass
/// per `h`.
pub fn run_boundary_limit(cfg: &ExperimentConfig) -> Result<Report> {
    let full = reference_measure(&cfg.function, &cfg.domain, &Density::Unit)?;
    let mut rows = Vec::new();
    let mut osc = 0.0;
    for &h in &cfg.hs {
        let t = Instant::now();
        let dom = lattice(cfg, h)?;
        let u = cfg.function.sample(&dom)?;
        let report = u.convexity_report();
        if !report.is_discrete_convex {
            bail!(
                "sampled function is not discrete convex at h = {h}: {} violations, worst {:.3e}",
                report.violations.len(),
                report.min_delta
            );
        }
        let hull = lower_hull(&u)?;
        let dim = dom.dim();
        let samples = dom.boundary_nodes().to_vec();
        let bvals: Vec<f64> = dom.boundary_ids().map(|b| u.value(b)).collect();
        let (lo, hi) = bvals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        osc = hi - lo;
        let g = |p: Point| {
            let id = dom.locate(p).expect("boundary samples are nodes");
            u.value(id)
        };
        let mut gap: f64 = 0.0;
        for z in dom.interior_ids() {
            let p = dom.node(z);
            if dom.domain().distance_to_boundary(p) > cfg.probe_band * h {
                continue;
            }
            let env = boundary_envelope_eval(dim, g, &samples, p)?;
            gap = gap.max((hull.gamma_eval(p)? - env).abs());
        }
        let mass = total_mass(&u, &hull);
        let ms = elapsed_ms(t);
        rows.push(ConvergenceRow::new(h, "gap", gap, 0.0, ms));
        rows.push(ConvergenceRow::new(h, "total_mass", mass, full, ms));
    }
    let gaps: Vec<f64> = rows.iter().filter(|r| r.quantity == "gap").map(|r| r.discrete).collect();
    let last = *gaps.last().unwrap();
    let bound = if osc > 0.0 { cfg.threshold * osc } else { 1e-12 };
    let checks = vec![
        Check {
            name: "gap monotone".into(),
            passed: decreasing(&gaps, false),
            detail: format!("gaps {}", list(&gaps)),
        },
        Check {
            name: "final gap".into(),
            passed: last <= bound,
            detail: format!("gap {last:.4e} against {bound:.4e} (oscillation {osc:.4})"),
        },
    ];
    Ok(Report {
        name: cfg.name.clone(),
        rows,
        checks,
    })
}

/// Error of the discrete Dirichlet solution against the harmonic boundary
/// data on the compact set, for every `h`.
pub fn run_laplace_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let g = cfg.harmonic;
    let mut rows = Vec::new();
    let mut principles = true;
    for &h in &cfg.hs {
        let t = Instant::now();
        let dom = lattice(cfg, h)?;
        let w = solve_dirichlet(&dom, |p| g.eval(p))?;
        let err = dom
            .interior_ids()
            .filter(|&x| cfg.compact.as_ref().map_or(true, |k| k.contains_closure(dom.node(x))))
            .map(|x| (w.value(x) - g.eval(dom.node(x))).abs())
            .fold(0.0, f64::max);
        let below = solve_dirichlet(&dom, |p| g.eval(p) - 1.0)?;
        principles &= check_max_principle(&w) && check_comparison(&below, &w)?;
        rows.push(ConvergenceRow::new(h, "max_error", err, 0.0, elapsed_ms(t)));
    }
    let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let mut checks = vec![Check {
        name: "maximum and comparison principles".into(),
        passed: principles,
        detail: "every solve".into(),
    }];
    checks.push(match cfg.max_error {
        Some(m) => Check {
            name: "error bound".into(),
            passed: errs.iter().all(|e| *e <= m),
            detail: format!("errors {} against {m:.1e}", list(&errs)),
        },
        None => Check {
            name: "strictly decreasing error".into(),
            passed: decreasing(&errs, true),
            detail: format!("errors {}", list(&errs)),
        },
    });
    Ok(Report {
        name: cfg.name.clone(),
        rows,
        checks,
    })
}

/// Total mass and the ABP ratio of `u - min_{∂Ω_h} u` for every `h`.
pub fn run_mass_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let full = reference_measure(&cfg.function, &cfg.domain, &Density::Unit)?;
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &h in &cfg.hs {
        let t = Instant::now();
        let dom = lattice(cfg, h)?;
        let u = cfg.function.sample(&dom)?;
        let hull = lower_hull(&u)?;
        let mass = total_mass(&u, &hull);
        let floor = dom.boundary_ids().map(|b| u.value(b)).fold(f64::INFINITY, f64::min);
        let v = u.map(|_, val| val - floor)?;
        let abp = abp_check(&v, &lower_hull(&v)?)?;
        let ms = elapsed_ms(t);
        rows.push(ConvergenceRow::new(h, "total_mass", mass, full, ms));
        ratios.push((h, abp.max_ratio, ms));
    }
    let first = ratios[0].1;
    for &(h, r, ms) in &ratios {
        rows.push(ConvergenceRow::new(h, "abp_ratio", r, first, ms));
    }
    let max = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let checks = vec![Check {
        name: "ABP ratio bounded".into(),
        passed: max.is_finite() && max <= cfg.growth * first,
        detail: format!(
            "ratios {} (max {max:.4} against {:.4})",
            list(&ratios.iter().map(|r| r.1).collect::<Vec<_>>()),
            cfg.growth * first
        ),
    }];
    Ok(Report {
        name: cfg.name.clone(),
        rows,
        checks,
    })
}

/// Runs the experiment and writes `<name>.csv` (and `<name>.svg`) into the
/// configured directory.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<Report> {
    let report = run(cfg)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join(format!("{}.csv", cfg.name)), report.csv())?;
    if cfg.svg {
        std::fs::write(cfg.out_dir.join(format!("{}.svg", cfg.name)), report.svg())?;
    }
    Ok(report)
}
