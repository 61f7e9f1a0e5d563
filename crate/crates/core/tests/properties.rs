//! Seeded property suites over random lattices and mesh functions.

use mafn_core::envelope::lower_hull;
use mafn_core::laplace::{barrier_constants, check_comparison, check_max_principle, solve_dirichlet};
use mafn_core::measure::{measure_of_region, total_mass};
use mafn_core::subdiff::{cell_volume, equivalence_check_with, hausdorff, DirectCells};
use mafn_core::{
    AtomicMeasure, ConvexDomain, Density, DirectionSet, LatticeDomain, MeshFunction, Point, QueryRegion,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> Config {
    Config {
        cases: 100,
        rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(0x5EED),
        failure_persistence: None,
        ..Config::default()
    }
}

#[derive(Debug, Clone)]
struct Instance {
    domain: ConvexDomain,
    h: f64,
    stencil: u32,
}

impl Instance {
    fn lattice(&self) -> LatticeDomain {
        let dim = self.domain.dim();
        LatticeDomain::build(self.domain.clone(), self.h, DirectionSet::new(dim, self.stencil).unwrap()).unwrap()
    }
}

fn domain_2d() -> impl Strategy<Value = ConvexDomain> {
    prop_oneof![
        (0.6..1.2f64, 0.6..1.2f64, -0.2..0.2f64)
            .prop_map(|(a, b, s)| ConvexDomain::rectangle([-a + s, -b], [a + s, b]).unwrap()),
        (0.7..1.2f64, -0.2..0.2f64).prop_map(|(r, c)| ConvexDomain::ball(2, [c, -c], r).unwrap()),
        (0.8..1.3f64, 0.0..1.0f64).prop_map(|(r, t)| {
            let v = (0..5)
                .map(|k| {
                    let a = t + std::f64::consts::TAU * k as f64 / 5.0;
                    [r * a.cos(), 0.8 * r * a.sin()]
                })
                .collect();
            ConvexDomain::polygon(v).unwrap()
        }),
    ]
}

fn instance_2d() -> impl Strategy<Value = Instance> {
    (domain_2d(), 0.16..0.3f64, 1u32..=2).prop_map(|(domain, h, stencil)| Instance { domain, h, stencil })
}

fn instance_1d() -> impl Strategy<Value = Instance> {
    (-1.0..-0.3f64, 0.3..1.0f64, 0.05..0.2f64).prop_map(|(a, b, h)| Instance {
        domain: ConvexDomain::interval(a, b).unwrap(),
        h,
        stencil: 1,
    })
}

fn instance() -> impl Strategy<Value = Instance> {
    prop_oneof![3 => instance_2d(), 1 => instance_1d()]
}

/// A convex function: a positive semidefinite quadratic plus a maximum of
/// affine pieces, which puts kinks inside the domain.
#[derive(Debug, Clone)]
struct ConvexFn {
    a: [[f64; 2]; 2],
    pieces: Vec<(Point, f64)>,
}

impl ConvexFn {
    fn eval(&self, x: Point) -> f64 {
        let q = 0.5 * (self.a[0][0] * x[0] * x[0] + 2.0 * self.a[0][1] * x[0] * x[1] + self.a[1][1] * x[1] * x[1]);
        let m = self
            .pieces
            .iter()
            .map(|(s, c)| s[0] * x[0] + s[1] * x[1] + c)
            .fold(f64::NEG_INFINITY, f64::max);
        q + m
    }
}

fn convex_fn() -> impl Strategy<Value = ConvexFn> {
    let piece = ([-2.0..2.0f64, -2.0..2.0f64], -0.5..0.5f64);
    (0.0..2.0f64, 0.0..2.0f64, 0.0..std::f64::consts::PI, prop::collection::vec(piece, 1..4)).prop_map(
        |(l1, l2, t, pieces)| {
            let (s, c) = t.sin_cos();
            ConvexFn {
                a: [
                    [c * c * l1 + s * s * l2, c * s * (l1 - l2)],
                    [c * s * (l1 - l2), s * s * l1 + c * c * l2],
                ],
                pieces: pieces.into_iter().map(|(s, c)| (s, c)).collect(),
            }
        },
    )
}

fn affine() -> impl Strategy<Value = (Point, f64)> {
    ([-3.0..3.0f64, -3.0..3.0f64], -2.0..2.0f64)
}

fn dim_point(p: Point, dim: usize) -> Point {
    if dim == 1 {
        [p[0], 0.0]
    } else {
        p
    }
}

fn add_affine<'a>(u: &MeshFunction<'a>, s: Point, c: f64) -> MeshFunction<'a> {
    let dim = u.domain().dim();
    let s = dim_point(s, dim);
    u.map(|x, v| v + s[0] * x[0] + s[1] * x[1] + c).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn second_differences_ignore_affine_terms(inst in instance(), f in convex_fn(), (s, c) in affine()) {
        let dom = inst.lattice();
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        let v = add_affine(&u, s, c);
        let dirs = dom.directions();
        for x in dom.interior_ids() {
            for k in dirs.representatives() {
                let e = dirs.get(k);
                let (du, dv) = (u.delta_e(x, e).unwrap(), v.delta_e(x, e).unwrap());
                // differences of values of size ~|s| over steps as short as 1e-9·h
                let scale = (u.value_scale() + v.value_scale()) / (inst.h * inst.h);
                prop_assert!((du - dv).abs() <= 1e-9 * scale, "node {x} dir {e:?}: {du} vs {dv}");
            }
        }
    }

    #[test]
    fn cells_translate_and_weights_stay_under_affine_terms(inst in instance(), f in convex_fn(), (s, c) in affine()) {
        let dom = inst.lattice();
        let dim = dom.dim();
        let s = dim_point(s, dim);
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        let v = add_affine(&u, s, c);
        let (cu, cv) = (DirectCells::new(&u), DirectCells::new(&v));
        let (hu, hv) = (lower_hull(&u).unwrap(), lower_hull(&v).unwrap());
        let mu = AtomicMeasure::compute(&u, &hu, &Density::Unit).unwrap();
        let mv = AtomicMeasure::compute(&v, &hv, &Density::Unit).unwrap();
        for x in dom.interior_ids() {
            let a = cu.cell(x).unwrap().translated(s);
            let b = cv.cell(x).unwrap();
            let bound = a.slope_bound().max(b.slope_bound()).max(1.0);
            prop_assert!(hausdorff(&a, &b) <= 1e-8 * bound, "node {x}: {a:?} vs {b:?}");
            prop_assert!(close(mu.weight(x), mv.weight(x), 1e-7), "node {x}: {} vs {}", mu.weight(x), mv.weight(x));
        }
    }

    #[test]
    fn measure_scales_with_the_dimension_power(inst in instance(), f in convex_fn(), alpha in 0.2..5.0f64) {
        let dom = inst.lattice();
        let d = dom.dim() as i32;
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        let v = u.map(|_, val| alpha * val).unwrap();
        let mu = AtomicMeasure::compute(&u, &lower_hull(&u).unwrap(), &Density::Unit).unwrap();
        let mv = AtomicMeasure::compute(&v, &lower_hull(&v).unwrap(), &Density::Unit).unwrap();
        let k = alpha.powi(d);
        for x in dom.interior_ids() {
            prop_assert!(close(k * mu.weight(x), mv.weight(x), 1e-7), "node {x}: {} vs {}", k * mu.weight(x), mv.weight(x));
        }
        prop_assert!(close(k * mu.total(), mv.total(), 1e-7));
    }

    #[test]
    fn convex_samples_have_convex_line_interpolants(inst in instance(), f in convex_fn()) {
        let dom = inst.lattice();
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        prop_assert!(u.is_discrete_convex());
        let dirs = dom.directions();
        for x in dom.interior_ids() {
            for k in dirs.representatives() {
                prop_assert!(u.line_interpolant_is_convex(x, dirs.get(k)).unwrap());
            }
        }
    }

    #[test]
    fn envelope_lies_below_arbitrary_data(inst in instance(), seed in any::<u64>()) {
        let dom = inst.lattice();
        let values = noise(seed, dom.num_nodes());
        let u = MeshFunction::from_values(&dom, values).unwrap();
        let hull = lower_hull(&u).unwrap();
        let tol = 1e-9 * u.value_scale();
        for (x, &p) in dom.nodes().iter().enumerate() {
            let g = hull.gamma_eval(p).unwrap();
            prop_assert!(g <= u.value(x) + tol, "node {x}: {g} > {}", u.value(x));
        }
    }

    #[test]
    fn envelope_of_envelope_is_itself(inst in instance(), seed in any::<u64>()) {
        let dom = inst.lattice();
        let u = MeshFunction::from_values(&dom, noise(seed, dom.num_nodes())).unwrap();
        let hull = lower_hull(&u).unwrap();
        let g = u.map(|p, _| hull.gamma_eval(p).unwrap()).unwrap();
        let again = lower_hull(&g).unwrap();
        let tol = 1e-9 * u.value_scale();
        for &p in dom.nodes() {
            prop_assert!((again.gamma_eval(p).unwrap() - hull.gamma_eval(p).unwrap()).abs() <= tol);
        }
        // Γ(u) is discrete convex wherever the lattice sees it
        prop_assert!(g.convexity_report().min_delta >= -1e-7 * g.value_scale() / (inst.h * inst.h));
    }

    #[test]
    fn perturbed_convex_data_passes_the_equivalence_check(inst in instance(), f in convex_fn(), seed in any::<u64>()) {
        let dom = inst.lattice();
        let bumps = noise(seed, dom.num_nodes());
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        let values: Vec<f64> = u
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| if dom.is_interior(i) && bumps[i] > 0.6 { v + 0.1 * bumps[i] } else { v })
            .collect();
        let u = MeshFunction::from_values(&dom, values).unwrap();
        let hull = lower_hull(&u).unwrap();
        let cells = DirectCells::new(&u);
        for x in dom.interior_ids() {
            let pair = equivalence_check_with(&cells, &hull, x);
            prop_assert!(pair.is_ok(), "node {x}: {pair:?}");
        }
    }

    #[test]
    fn region_measures_add_up(inst in instance_2d(), f in convex_fn(), cut in -0.4..0.4f64) {
        let dom = inst.lattice();
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        let hull = lower_hull(&u).unwrap();
        let m = AtomicMeasure::compute(&u, &hull, &Density::Unit).unwrap();
        let (lo, hi) = inst.domain.bounding_box();
        let whole = QueryRegion(ConvexDomain::rectangle([lo[0] - 1.0, lo[1] - 1.0], [hi[0] + 1.0, hi[1] + 1.0]).unwrap());
        let left = QueryRegion(ConvexDomain::rectangle([lo[0] - 1.0, lo[1] - 1.0], [cut, hi[1] + 1.0]).unwrap());
        let right = QueryRegion(ConvexDomain::rectangle([cut, lo[1] - 1.0], [hi[0] + 1.0, hi[1] + 1.0]).unwrap());
        let total = measure_of_region(&m, &whole);
        prop_assert!(close(total, m.total(), 1e-12));
        prop_assert!(close(total, total_mass(&u, &hull), 1e-9), "{total} vs {}", total_mass(&u, &hull));
        // the two closed halves overlap on the cut line only
        let line: f64 = dom
            .interior_ids()
            .filter(|&x| dom.node(x)[0] == cut)
            .map(|x| m.weight(x))
            .sum();
        let (l, r) = (measure_of_region(&m, &left), measure_of_region(&m, &right));
        prop_assert!(close(l + r - line, total, 1e-12));
        prop_assert!(l <= total + 1e-12 && r <= total + 1e-12);
    }

    #[test]
    fn weights_are_volumes_of_cells(inst in instance(), f in convex_fn()) {
        let dom = inst.lattice();
        let u = MeshFunction::sample(&dom, |x| f.eval(x)).unwrap();
        let hull = lower_hull(&u).unwrap();
        let m = AtomicMeasure::compute(&u, &hull, &Density::Unit).unwrap();
        let cells = DirectCells::new(&u);
        for x in dom.interior_ids() {
            let vol = cell_volume(&cells.cell(x).unwrap());
            prop_assert!(m.weight(x) >= 0.0);
            prop_assert!(close(m.weight(x), vol, 1e-8), "node {x}: {} vs {vol}", m.weight(x));
        }
    }

    #[test]
    fn harmonic_solutions_obey_both_principles(inst in instance(), seed in any::<u64>()) {
        let dom = inst.lattice();
        let b = noise(seed, dom.num_nodes());
        let drop = noise(!seed, dom.num_nodes());
        let g = |p: Point| b[dom.locate(p).unwrap()];
        let w = solve_dirichlet(&dom, g).unwrap();
        prop_assert!(check_max_principle(&w));
        let lower = solve_dirichlet(&dom, |p| g(p) - drop[dom.locate(p).unwrap()]).unwrap();
        prop_assert!(check_comparison(&lower, &w).unwrap());
    }

    #[test]
    fn barrier_identity_holds(mu in 0.01..0.99f64, d in 3u32..12, eta in 0.1..10.0f64) {
        let k = barrier_constants(mu, d, eta).unwrap();
        prop_assert!((k.b_prime - k.b + k.a_prime - k.a).abs() <= 1e-12);
        prop_assert!((k.a + k.b - 1.0).abs() <= 1e-12);
        prop_assert!(k.theta > 0.5 && k.theta <= 1.0);
        prop_assert!(k.a > 0.0 && k.a <= 1.0 && k.b >= 0.0 && k.gamma >= 0.0);
    }
}

/// Uniform values in `[0, 1)`.
fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen()).collect()
}
