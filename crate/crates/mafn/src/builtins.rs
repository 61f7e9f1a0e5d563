//! Built-in test functions with their derivatives, and harmonic boundary data.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use mafn_core::measure::{integrate_density, DEFAULT_LEVELS};
use mafn_core::{Density, LatticeDomain, MeshFunction, Point, SlopeCell};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of a random smooth convex function
/// `½ xᵀAx + b·x + c₀ + γ‖x - c‖⁴`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomConvex {
    pub seed: u64,
    a: [[f64; 2]; 2],
    b: Point,
    c0: f64,
    gamma: f64,
    center: Point,
}

impl RandomConvex {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l1: f64 = rng.gen_range(0.5..2.0);
        let l2: f64 = rng.gen_range(0.5..2.0);
        let t: f64 = rng.gen_range(0.0..PI);
        let (s, c) = t.sin_cos();
        let a = [
            [c * c * l1 + s * s * l2, c * s * (l1 - l2)],
            [c * s * (l1 - l2), s * s * l1 + c * c * l2],
        ];
        let b = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let c0 = rng.gen_range(-0.5..0.5);
        let gamma = rng.gen_range(0.0..0.5);
        let center = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
        Self {
            seed,
            a,
            b,
            c0,
            gamma,
            center,
        }
    }
}

/// Convex test functions of the refinement experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// `½‖x‖²`.
    Quadratic,
    /// `½(2x₁² + x₂²)`, or `x²` in one dimension.
    AnisotropicQuadratic,
    /// `Σ|x_i|`.
    Abs1Norm,
    /// `‖x‖`.
    Cone,
    /// `1 + 2x₁ - x₂`.
    Affine,
    RandomConvex(RandomConvex),
}

impl Builtin {
    /// Names: `quadratic`, `anisotropic-quadratic`, `abs1norm`, `cone`,
    /// `affine`, `random-convex(<seed>)`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "quadratic" => Builtin::Quadratic,
            "anisotropic-quadratic" => Builtin::AnisotropicQuadratic,
            "abs1norm" => Builtin::Abs1Norm,
            "cone" => Builtin::Cone,
            "affine" => Builtin::Affine,
            _ => {
                let Some(seed) = s.strip_prefix("random-convex(").and_then(|r| r.strip_suffix(')')) else {
                    bail!("unknown test function {s:?}");
                };
                let seed = parse_seed(seed)?;
                Builtin::RandomConvex(RandomConvex::new(seed))
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            Builtin::Quadratic => "quadratic".into(),
            Builtin::AnisotropicQuadratic => "anisotropic-quadratic".into(),
            Builtin::Abs1Norm => "abs1norm".into(),
            Builtin::Cone => "cone".into(),
            Builtin::Affine => "affine".into(),
            Builtin::RandomConvex(r) => format!("random-convex({})", r.seed),
        }
    }

    pub fn value(&self, x: Point, dim: usize) -> f64 {
        let x = restrict(x, dim);
        match self {
            Builtin::Quadratic => 0.5 * (x[0] * x[0] + x[1] * x[1]),
            Builtin::AnisotropicQuadratic => x[0] * x[0] + 0.5 * x[1] * x[1],
            Builtin::Abs1Norm => x[0].abs() + x[1].abs(),
            Builtin::Cone => x[0].hypot(x[1]),
            Builtin::Affine => 1.0 + 2.0 * x[0] - x[1],
            Builtin::RandomConvex(r) => {
                let ax = mat_vec(&r.a, x, dim);
                let y = restrict([x[0] - r.center[0], x[1] - r.center[1]], dim);
                let n2 = y[0] * y[0] + y[1] * y[1];
                0.5 * (x[0] * ax[0] + x[1] * ax[1])
                    + r.b[0] * x[0]
                    + r.b[1] * x[1]
                    + r.c0
                    + r.gamma * n2 * n2
            }
        }
    }

    /// Gradient where the function is differentiable.
    pub fn gradient(&self, x: Point, dim: usize) -> Point {
        let x = restrict(x, dim);
        let g = match self {
            Builtin::Quadratic => x,
            Builtin::AnisotropicQuadratic => [2.0 * x[0], x[1]],
            Builtin::Abs1Norm => [sign(x[0]), sign(x[1])],
            Builtin::Cone => {
                let n = x[0].hypot(x[1]);
                if n == 0.0 {
                    [0.0, 0.0]
                } else {
                    [x[0] / n, x[1] / n]
                }
            }
            Builtin::Affine => [2.0, -1.0],
            Builtin::RandomConvex(r) => {
                let ax = mat_vec(&r.a, x, dim);
                let y = restrict([x[0] - r.center[0], x[1] - r.center[1]], dim);
                let k = 4.0 * r.gamma * (y[0] * y[0] + y[1] * y[1]);
                [ax[0] + r.b[0] + k * y[0], ax[1] + r.b[1] + k * y[1]]
            }
        };
        restrict(g, dim)
    }

    /// `det D²u(x)`, the density of the absolutely continuous part of the
    /// Monge-Ampère measure.
    pub fn hessian_det(&self, x: Point, dim: usize) -> f64 {
        let x = restrict(x, dim);
        match self {
            Builtin::Quadratic => 1.0,
            Builtin::AnisotropicQuadratic => 2.0,
            Builtin::Abs1Norm | Builtin::Cone | Builtin::Affine => 0.0,
            Builtin::RandomConvex(r) => {
                let y = restrict([x[0] - r.center[0], x[1] - r.center[1]], dim);
                let n2 = y[0] * y[0] + y[1] * y[1];
                if dim == 1 {
                    r.a[0][0] + 12.0 * r.gamma * y[0] * y[0]
                } else {
                    let g = 4.0 * r.gamma;
                    let h00 = r.a[0][0] + g * (n2 + 2.0 * y[0] * y[0]);
                    let h11 = r.a[1][1] + g * (n2 + 2.0 * y[1] * y[1]);
                    let h01 = r.a[0][1] + g * 2.0 * y[0] * y[1];
                    h00 * h11 - h01 * h01
                }
            }
        }
    }

    /// Point masses of the Monge-Ampère measure: the location and the slope
    /// set `∂u(x)` carried there.
    pub fn atoms(&self, dim: usize) -> Vec<(Point, Atom)> {
        match self {
            Builtin::Cone if dim == 2 => vec![([0.0, 0.0], Atom::UnitDisk)],
            Builtin::Cone | Builtin::Abs1Norm => vec![([0.0, 0.0], Atom::Cube)],
            _ => Vec::new(),
        }
    }

    /// Samples of the function on all nodes. Random convex functions also
    /// receive upward perturbations in `[0.01, 0.1]` at a random fifth of
    /// the interior nodes.
    pub fn sample<'a>(&self, dom: &'a LatticeDomain) -> Result<MeshFunction<'a>> {
        let dim = dom.dim();
        let mut values: Vec<f64> = dom.nodes().iter().map(|&p| self.value(p, dim)).collect();
        if let Builtin::RandomConvex(r) = self {
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed ^ 0x9e37_79b9_7f4a_7c15);
            let n = dom.num_interior();
            for i in index::sample(&mut rng, n, n / 5).into_vec() {
                values[i] += rng.gen_range(0.01..=0.1);
            }
        }
        Ok(MeshFunction::from_values(dom, values)?)
    }
}

/// The slope set of a point mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    /// The closed unit ball of the plane.
    UnitDisk,
    /// `[-1, 1]^d`.
    Cube,
}

impl Atom {
    /// `∫ R(p) dp` over the slope set.
    pub fn mass(self, dim: usize, r: &Density<'_>) -> Result<f64> {
        match (self, r) {
            (Atom::UnitDisk, Density::Unit) => Ok(PI),
            (Atom::UnitDisk, _) => {
                // polar Gauss-Legendre in the radius; the density is radial
                // for the built-in densities but not in general
                let mut acc = 0.0;
                let (nr, nt) = (64, 256);
                for i in 0..nr {
                    for (t, w) in GL5 {
                        let rad = (i as f64 + 0.5 + 0.5 * t) / nr as f64;
                        let wr = 0.5 * w / nr as f64;
                        for j in 0..nt {
                            let th = 2.0 * PI * (j as f64 + 0.5) / nt as f64;
                            acc += wr * rad * r.eval([rad * th.cos(), rad * th.sin()]) * 2.0 * PI / nt as f64;
                        }
                    }
                }
                Ok(acc)
            }
            (Atom::Cube, _) => {
                let cell = if dim == 1 {
                    SlopeCell::Interval { lo: -1.0, hi: 1.0 }
                } else {
                    SlopeCell::Polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
                };
                Ok(integrate_density(&cell, r, DEFAULT_LEVELS)?.value)
            }
        }
    }
}

pub(crate) const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn parse_seed(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).with_context(|| format!("bad seed {s:?}"))
    } else {
        s.parse().with_context(|| format!("bad seed {s:?}"))
    }
}

fn restrict(x: Point, dim: usize) -> Point {
    if dim == 1 {
        [x[0], 0.0]
    } else {
        x
    }
}

fn mat_vec(a: &[[f64; 2]; 2], x: Point, dim: usize) -> Point {
    if dim == 1 {
        [a[0][0] * x[0], 0.0]
    } else {
        [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Harmonic boundary data for the Laplace experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Harmonic {
    Constant,
    /// `1 + 2x₁ - x₂`.
    Affine,
    /// `x₁x₂`.
    Product,
    /// `x₁² - x₂²`.
    Saddle,
    /// `e^{x₁} cos x₂`.
    ExpCos,
}

impl Harmonic {
    /// Names: `constant`, `affine`, `x1x2`, `x1^2-x2^2`, `exp-cos`.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "constant" => Harmonic::Constant,
            "affine" => Harmonic::Affine,
            "x1x2" => Harmonic::Product,
            "x1^2-x2^2" => Harmonic::Saddle,
            "exp-cos" => Harmonic::ExpCos,
            other => bail!("unknown harmonic function {other:?}"),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Harmonic::Constant => "constant",
            Harmonic::Affine => "affine",
            Harmonic::Product => "x1x2",
            Harmonic::Saddle => "x1^2-x2^2",
            Harmonic::ExpCos => "exp-cos",
        }
    }

    pub fn eval(self, x: Point) -> f64 {
        match self {
            Harmonic::Constant => 1.0,
            Harmonic::Affine => 1.0 + 2.0 * x[0] - x[1],
            Harmonic::Product => x[0] * x[1],
            Harmonic::Saddle => x[0] * x[0] - x[1] * x[1],
            Harmonic::ExpCos => x[0].exp() * x[1].cos(),
        }
    }
}
