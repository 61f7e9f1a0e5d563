//! The envelope must be defined at every node, including boundary nodes on
//! slanted polygon edges where the hull has sliver faces.

use mafn_core::envelope::lower_hull;
use mafn_core::{ConvexDomain, DirectionSet, LatticeDomain, MeshFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn envelope_is_defined_at_every_node_of_slanted_polygons() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for it in 0..1500 {
        let t: f64 = rng.gen();
        let v = (0..6)
            .map(|k| {
                let a = t + std::f64::consts::TAU * k as f64 / 6.0;
                [a.cos(), 0.7 * a.sin()]
            })
            .collect();
        let domain = ConvexDomain::polygon(v).unwrap();
        let h = rng.gen_range(0.15..0.3);
        let dom = LatticeDomain::build(domain, h, DirectionSet::new(2, rng.gen_range(1..=2)).unwrap()).unwrap();
        let (a, b, c): (f64, f64, f64) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
        let noise = if it % 2 == 0 { 0.0 } else { 0.3 };
        let values = dom
            .nodes()
            .iter()
            .map(|p| a * p[0] * p[0] + b * p[1] * p[1] + c * p[0] * p[1] + p[0] - p[1] + noise * rng.gen_range(-1.0..1.0))
            .collect();
        let u = MeshFunction::from_values(&dom, values).unwrap();
        let hull = lower_hull(&u).unwrap();
        for (i, &p) in dom.nodes().iter().enumerate() {
            let g = hull.gamma_eval(p);
            assert!(g.is_ok(), "node {i} at {p:?} with h = {h}, t = {t}");
            let g = g.unwrap();
            assert!(g <= u.value(i) + 1e-9 * u.value_scale(), "node {i} at {p:?}: {g} above {}", u.value(i));
        }
    }
}
