mod common;

use common::*;

#[test]
fn union_of_overlapping_squares() {
    let sq = |x: f64, y: f64| vec![[x, y], [x + 1.0, y], [x + 1.0, y + 1.0], [x, y + 1.0]];
    let a = mc_union_area(&[sq(0.0, 0.0), sq(0.5, 0.0)], 200_000);
    assert!((a - 1.5).abs() < 1e-3);
}

#[test]
fn union_of_a_regular_polygon_fan() {
    let n = 40;
    let ring: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let fan: Vec<Vec<[f64; 2]>> = (0..n).map(|k| vec![[0.0, 0.0], ring[k], ring[(k + 1) % n]]).collect();
    let exact = 0.5 * n as f64 * (std::f64::consts::TAU / n as f64).sin();
    assert!((mc_union_area(&fan, 1_000_000) - exact).abs() < 1e-3 * exact);
}

#[test]
fn interval_and_chord_oracles() {
    assert_eq!(interval_union_length(vec![(0.0, 1.0), (0.5, 2.0), (3.0, 4.0)]), 3.0);
    assert_eq!(interval_union_length(vec![(2.0, 2.0)]), 0.0);
    assert_eq!(chord_slope_spread(vec![(1.0, 0.5), (-1.0, 0.5), (0.0, 0.0)]), 1.0);
}
