use hdisk::families::{calibration_family, random_localized, spike};
use hdisk::geometry::{mobius_z, polar_to_point, DiskPoint};
use hdisk::kappa::fft_length;
use hdisk::transform::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

fn reference(c_p: f64) -> &'static TransformPlan {
    assert_eq!(c_p, 1.0 / TAU);
    static PLAN: OnceLock<TransformPlan> = OnceLock::new();
    PLAN.get_or_init(|| {
        let x = Arc::new(build_spatial_grid(5.0, 160, 128).unwrap());
        let s = Arc::new(build_spectral_grid(16.0, 128, 128, c_p).unwrap());
        TransformPlan::new(x, s)
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Trigonometric interpolant of one spectral row (given by its modes) at an arbitrary angle.
fn interpolant(modes: &[Complex64], theta: f64) -> Complex64 {
    let half = (modes.len() / 2) as i32;
    let step = Complex64::from_polar(1.0, theta);
    let mut e = Complex64::from_polar(1.0, -(half as f64) * theta);
    let mut acc = Complex64::new(0.0, 0.0);
    for c in modes {
        acc += c * e;
        e *= step;
    }
    acc
}

#[test]
fn calibration_recovers_closed_form_constant() {
    let x = Arc::new(build_spatial_grid(5.0, 160, 128).unwrap());
    let t = Instant::now();
    let cal = calibrate_plancherel(x, 16.0, 128, 128).unwrap();
    eprintln!("calibration {:?} in {:?}", cal, t.elapsed());
    assert!(cal.c_p > 0.0);
    assert!(rel(cal.c_p, 1.0 / TAU) < 1e-8, "{}", cal.c_p);
    assert!(cal.spread <= 1e-6);
}

#[test]
fn round_trip_and_plancherel() {
    let plan = reference(1.0 / TAU);
    for f in calibration_family(&plan.spectral) {
        let g = plan.inverse(&f);
        let back = plan.forward(&g).unwrap();
        let rt = plancherel_norm(&back.sub(&f)) / plancherel_norm(&f);
        let pl = rel(plancherel_norm(&back), l2_norm(&g));
        assert!(rt <= 1e-6 && pl <= 1e-6, "rt {rt:e} pl {pl:e}");
        check_angular_truncation(&f).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let f = random_localized(&plan.spectral, &mut rng);
        let g = plan.inverse(&f);
        let back = plan.forward(&g).unwrap();
        let rt = plancherel_norm(&back.sub(&f)) / plancherel_norm(&f);
        assert!(rt <= 1e-5, "{rt:e}");
    }
}

#[test]
fn forward_is_linear_and_rejects_boundary_mass() {
    let plan = reference(1.0 / TAU);
    let fam = calibration_family(&plan.spectral);
    let (f, g) = (plan.inverse(&fam[0]), plan.inverse(&fam[1]));
    let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
    let lhs = plan.forward(&f.scale(a).add(&g.scale(b))).unwrap();
    let rhs = plan.forward(&f).unwrap().scale(a).add(&plan.forward(&g).unwrap().scale(b));
    assert!(plancherel_norm(&lhs.sub(&rhs)) <= 1e-13 * plancherel_norm(&lhs));
    let zero = plan.forward(&SpatialFunction::zeros(plan.spatial.clone())).unwrap();
    assert!(zero.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    let wide = SpatialFunction::from_fn(plan.spatial.clone(), |_| Complex64::new(1.0, 0.0));
    assert!(matches!(plan.forward(&wide), Err(hdisk::Error::BoundaryMass { .. })));
}

#[test]
fn inverse_matches_slow_oracle() {
    let plan = reference(1.0 / TAU);
    let f = &calibration_family(&plan.spectral)[1];
    let pts = [polar_to_point(0.4, 1.0).unwrap(), polar_to_point(1.9, 4.0).unwrap(), polar_to_point(3.7, 2.2).unwrap()];
    let fast = inverse_at_points(f, &pts);
    let g = &plan.spectral;
    let modes: Vec<Vec<Complex64>> = (0..g.n_lambda()).map(|l| modes_from_samples(f.row(l), g.n_b / 2)).collect();
    for (p, v) in pts.iter().zip(&fast) {
        let r = 2.0 * p.z().norm().atanh();
        let n = 2 * fft_length(r, 16.0, 64);
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..g.n_lambda() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let th = TAU * k as f64 / n as f64;
                let beta = hdisk::geometry::busemann_z(p.z(), Complex64::from_polar(1.0, th));
                s += interpolant(&modes[l], th) * Complex64::new(0.5, g.lams[l]).scale(beta).exp();
            }
            acc += s * (g.pq(l) / n as f64);
        }
        assert!((acc - v).norm() <= 1e-12 * acc.norm().max(1e-3), "{acc} {v}");
    }
    // radial spectrum: value at the origin is Σ F·p·q
    let radial = hdisk::families::heat_spectrum(&plan.spectral, &hdisk::families::calibration_terms()[0]);
    let at0 = inverse_at_points(&radial, &[DiskPoint::origin()])[0];
    let want: Complex64 = (0..g.n_lambda()).map(|l| radial.row(l)[0] * g.pq(l)).sum();
    assert!((at0 - want).norm() <= 1e-13 * want.norm());
}

#[test]
fn grid_inverse_matches_point_inverse_and_direct_sum() {
    let plan = reference(1.0 / TAU);
    let f = &calibration_family(&plan.spectral)[3];
    let g = plan.inverse(f);
    let idx = [5 * 128 + 7, 60 * 128 + 100, 130 * 128 + 64];
    let pts: Vec<DiskPoint> = idx.iter().map(|&j| plan.spatial.point(j)).collect();
    let at = inverse_at_points(f, &pts);
    let scale = g.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (j, v) in idx.iter().zip(&at) {
        assert!((g.values[*j] - v).norm() <= 1e-13 * scale, "{} {}", g.values[*j], v);
    }
    // the literal b-sum agrees where the kernel is resolved by n_b nodes
    let near: Vec<DiskPoint> = [0.2, 0.5].iter().map(|&r| polar_to_point(r, 0.7).unwrap()).collect();
    let direct = inverse_direct(f, &near);
    let exact = inverse_at_points(f, &near);
    for (a, b) in direct.iter().zip(&exact) {
        assert!((a - b).norm() <= 1e-12 * b.norm(), "{a} {b}");
    }
}

// Geodesic circle mean M(h) = f + (h²/4)Δf + O(h⁴), Richardson-extrapolated.
fn fd_laplacian(f: &SpectralFunction, center: Complex64, h: f64) -> Complex64 {
    let n = 64;
    let mean = |h: f64| -> Complex64 {
        let rho = (0.5 * h).tanh();
        let pts: Vec<DiskPoint> = (0..n)
            .map(|k| DiskPoint::new(mobius_z(center, Complex64::from_polar(rho, TAU * k as f64 / n as f64))).unwrap())
            .collect();
        inverse_at_points(f, &pts).iter().sum::<Complex64>() / n as f64
    };
    let f0 = inverse_at_points(f, &[DiskPoint::new(center).unwrap()])[0];
    let d = |h: f64| (mean(h) - f0) * (4.0 / (h * h));
    (d(h / 2.0) * 4.0 - d(h)) / 3.0
}

#[test]
fn laplacian_symbol_matches_finite_differences() {
    let plan = reference(1.0 / TAU);
    let f0 = &calibration_family(&plan.spectral)[1];
    let f = plan.inverse(f0);
    let lap = apply_multiplier(&plan.forward(&f).unwrap(), laplacian_symbol);
    let centers = [Complex64::new(0.1, 0.05), Complex64::new(-0.3, 0.2), Complex64::new(0.0, -0.45)];
    let (mut num, mut den) = (0.0, 0.0);
    for c in centers {
        let fd = fd_laplacian(f0, c, 0.05);
        let sp = inverse_at_points(&lap, &[DiskPoint::new(c).unwrap()])[0];
        num += (fd - sp).norm_sqr();
        den += sp.norm_sqr();
    }
    let res = (num / den).sqrt();
    assert!(res <= 1e-3, "{res:e}");
}

#[test]
fn spike_is_approximate_eigenfunction() {
    let plan = reference(1.0 / TAU);
    let g = &plan.spectral;
    let i = 40;
    let f = spike(g, i, 2);
    let lam = g.lams[i];
    let (mut num, mut den) = (0.0, 0.0);
    for &(r, t) in &[(0.5, 0.3), (1.2, 2.0), (1.9, 4.4)] {
        let c = polar_to_point(r, t).unwrap().z();
        let fd = fd_laplacian(&f, c, 0.04);
        let v = inverse_at_points(&f, &[DiskPoint::new(c).unwrap()])[0] * -(lam * lam + 0.25);
        num += (fd - v).norm_sqr();
        den += v.norm_sqr();
    }
    assert!((num / den).sqrt() <= 1e-3);
}

#[test]
fn compact_spectral_bump_spreads_past_reference_ball() {
    // A spectrum with compact λ-support decays only slowly in space.
    let plan = reference(1.0 / TAU);
    let bump = |l: f64| {
        if l > 1.0 && l < 4.0 {
            let x = (2.0 * l - 5.0) / 3.0;
            (-1.0 / (1.0 - x * x)).exp()
        } else {
            0.0
        }
    };
    let g =
        SpectralFunction::from_fn(plan.spectral.clone(), |l, t| Complex64::new(bump(l) * (1.0 + 0.3 * t.cos()), 0.0));
    let f = plan.inverse(&g);
    assert!(f.boundary_mass() > 1e-3, "{:e}", f.boundary_mass());
    assert!(matches!(plan.forward(&f), Err(hdisk::Error::BoundaryMass { .. })));
}

#[test]
fn forward_matches_literal_sum_where_resolved() {
    // Small λ and R keep the kernel's angular bandwidth (about λ·e^R) below n_θ/2.
    let x = Arc::new(build_spatial_grid(2.0, 64, 128).unwrap());
    let s = Arc::new(build_spectral_grid(4.0, 32, 32, 1.0 / TAU).unwrap());
    let plan = TransformPlan::new(x.clone(), s.clone());
    let f = SpatialFunction::from_fn(x, |p| {
        let z = p.z() - Complex64::new(0.2, -0.1);
        Complex64::new((-4.0 * z.norm_sqr()).exp(), z.re)
    });
    let fast = plan.forward_unchecked(&f);
    let slow = forward_direct(&f, s);
    let err = plancherel_norm(&fast.sub(&slow)) / plancherel_norm(&slow);
    assert!(err <= 1e-9, "{err:e}");
}
