use hdisk::frames::{DEFAULT_C, LATTICE_RADIUS};
use hdisk::geometry::dist;
use hdisk::lattice::*;
use std::f64::consts::TAU;

fn ball_area(r: f64) -> f64 {
    TAU * (r.cosh() - 1.0)
}

#[test]
fn sweep_lattices_are_certified() {
    for w in [2.0, 4.0, 8.0] {
        let r = nyquist_radius(w, DEFAULT_C);
        let l = build_lattice(LATTICE_RADIUS, r, 0).unwrap();
        let c = &l.certificate;
        assert!(c.min_pairwise.unwrap() >= r / 2.0 - 1e-12, "{c:?}");
        assert!(c.covering_radius <= r / 2.0, "{c:?}");
        // brute-force separation
        let mut min = f64::INFINITY;
        for i in 0..l.len() {
            for j in 0..i {
                min = min.min(dist(&l.points[i], &l.points[j]));
            }
        }
        assert!(min >= r / 2.0 - 1e-12);
        assert!((min - c.min_pairwise.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn packing_bound_and_multiplicity() {
    for r in [0.5, 0.3, 0.2] {
        let l = build_lattice(3.0, r, 1).unwrap();
        assert!(l.len() as f64 * ball_area(r / 4.0) <= ball_area(3.0 + r / 4.0));
        assert!(l.certificate.multiplicity <= 25, "r {r}: {}", l.certificate.multiplicity);
    }
}

#[test]
fn construction_is_deterministic() {
    let a = build_lattice(3.0, 0.4, 17).unwrap();
    let b = build_lattice(3.0, 0.4, 17).unwrap();
    assert_eq!(a.points, b.points);
    assert_eq!(a.certificate, b.certificate);
}

#[test]
fn point_count_is_monotone_in_r() {
    let mut last = 0;
    for r in [2.0, 1.5, 1.0, 0.8, 0.6, 0.5, 0.4] {
        let n = build_lattice(3.0, r, 0).unwrap().len();
        assert!(n >= last, "r {r}: {n} < {last}");
        last = n;
    }
}
