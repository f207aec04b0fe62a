use hdisk::approx::*;
use hdisk::families::random_spectrum;
use hdisk::frames::*;
use hdisk::paley_wiener::mu;
use hdisk::transform::{build_spectral_grid, plancherel_norm, SpectralFunction, C_P};
use hdisk::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

fn reference_grid() -> Arc<hdisk::transform::SpectralGrid> {
    Arc::new(build_spectral_grid(16.0, 128, 128, C_P).unwrap())
}

#[test]
fn jackson_ratio_is_bounded() {
    let g = reference_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = random_spectrum(&g, &mut rng);
        for r in [1.0, 2.0, 4.0] {
            for t in [1.0, 2.0, 4.0] {
                worst = worst.max(jackson_check(&f, t, r).unwrap());
            }
        }
    }
    assert!(worst <= 1.0 + 1e-12, "{worst}");
}

#[test]
fn best_approximation_is_monotone() {
    let g = reference_grid();
    let f = random_spectrum(&g, &mut ChaCha8Rng::seed_from_u64(1));
    let mut last = f64::INFINITY;
    for k in 0..200 {
        let e = best_approx(&f, 0.01 + 0.08 * k as f64);
        assert!(e <= last);
        last = e;
    }
    assert_eq!(best_approx(&f, 17.0), 0.0);
}

#[test]
fn k_functional_sandwich() {
    let g = reference_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let ts = log_grid(1e-3, 1e3, 13);
    for _ in 0..200 {
        let f = random_spectrum(&g, &mut rng);
        for &t in &ts {
            for r in [1.0, 2.0] {
                let (k2, ku) = k2_functional(&f, t, r);
                assert!(k2 <= ku * (1.0 + 1e-15) && ku <= 2f64.sqrt() * k2 + 1e-12, "{k2} {ku}");
            }
        }
    }
    let f = random_spectrum(&g, &mut rng);
    let (a, _) = k2_functional(&f, 1e-6, 1.0);
    let (b, _) = k2_functional(&f, 2e-6, 1.0);
    assert!((b / a - 2.0).abs() < 1e-6);
    let (big, _) = k2_functional(&f, 1e8, 1.0);
    assert!((big - plancherel_norm(&f)).abs() < 1e-6 * big);
}

#[test]
fn modulus_bounds_and_monotonicity() {
    let g = reference_grid();
    let f = random_spectrum(&g, &mut ChaCha8Rng::seed_from_u64(33));
    let n = plancherel_norm(&f);
    let s = log_grid(1e-3, 10.0, 64);
    for r in [1u32, 2, 3] {
        let prof = modulus_profile(&f.energy_profile(), &g.lams, r, &s, MODULUS_TAUS);
        assert!(prof.windows(2).all(|w| w[0] <= w[1]));
        assert!(prof.iter().all(|&o| o <= 2f64.powi(r as i32) * n * (1.0 + 1e-14)));
        for (sk, pk) in s.iter().zip(&prof).step_by(7) {
            assert!(modulus(&f, r, *sk) <= *pk);
            let fine = modulus_with(&f, r, *sk, 64);
            eprintln!("r {r} s {sk:.4}: 32-point {:.6e}, 64-point {:.6e}", modulus(&f, r, *sk), fine);
        }
    }
}

fn power_profile(grid: &Arc<hdisk::transform::SpectralGrid>, decay: f64) -> SpectralFunction {
    // energy density ∝ (1+λ)^{−decay}
    SpectralFunction::from_fn(grid.clone(), |l, _| {
        let p = C_P * l * (std::f64::consts::PI * l).tanh();
        Complex64::new(((1.0 + l).powf(-decay) / p).sqrt(), 0.0)
    })
}

#[test]
fn besov_norm_properties() {
    let g = frame_grid(64).unwrap();
    let p = BesovParams::new(1.0, 2.0, 2).unwrap();
    assert_eq!(besov_norm(&SpectralFunction::zeros(g.clone()), &p), 0.0);
    let f = power_profile(&g, 2.0 * 1.0 + 1.0 + 1.0);
    let a = besov_norm(&f, &p);
    let b = besov_norm(&f.scale(Complex64::new(0.0, -3.0)), &p);
    assert!((b - 3.0 * a).abs() < 1e-12 * b);
}

// On s ≤ 1 the weight s^{−α} grows with α; on s > 1 the modulus is capped by 2^r‖f‖. With the
// same log-trapezoid weights this gives |f|²_{α1} ≤ |f|²_{α2} + Σ_{s_k>1} w_k s_k^{−2α1} 4^r ‖f‖².
#[test]
fn besov_seminorm_embedding_across_alpha() {
    let g = frame_grid(64).unwrap();
    let s = log_grid(BESOV_S_MIN, BESOV_S_MAX, BESOV_S_POINTS);
    let h = (BESOV_S_MAX / BESOV_S_MIN).ln() / (BESOV_S_POINTS - 1) as f64;
    let alphas = [0.25, 0.5, 1.0, 1.5, 1.9];
    for f in [heat_profile(&g), power_profile(&g, 6.0), power_profile(&g, 8.0)] {
        let norm2 = plancherel_norm(&f).powi(2);
        let semi: Vec<f64> = alphas
            .iter()
            .map(|&a| besov_report(&f, &BesovParams::new(a, 2.0, 2).unwrap(), BESOV_S_POINTS).seminorm)
            .collect();
        for i in 0..alphas.len() {
            for j in i + 1..alphas.len() {
                let tail: f64 = s
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x > 1.0)
                    .map(|(k, &x)| {
                        let w = if k == 0 || k == s.len() - 1 { 0.5 * h } else { h };
                        w * x.powf(-2.0 * alphas[i]) * 16.0 * norm2
                    })
                    .sum();
                assert!(semi[i].powi(2) <= semi[j].powi(2) + tail + 1e-12 * norm2);
            }
        }
    }
}

// Pointwise Ω(s) ≥ ‖(I − e^{is√−Δ})^r f‖ gives a lower bound; Ω(s)² ≤ Σ E_i min(s k_i, 2)^{2r}
// with k_i = √μ_i gives the closed-form upper bound Σ E_i k_i^{2α}·2^{2r−2α}(1/(2r−2α) + 1/(2α)).
#[test]
fn besov_seminorm_between_direct_bounds() {
    let g = frame_grid(64).unwrap();
    for (alpha, eps) in [(0.75, 0.5), (1.25, 0.5), (1.5, 1.0)] {
        let f = power_profile(&g, 2.0 * alpha + 1.0 + eps);
        let p = BesovParams::new(alpha, 2.0, 2).unwrap();
        let rep = besov_report(&f, &p, BESOV_S_POINTS);
        let (e, l) = (f.energy_profile(), &g.lams);
        let s = log_grid(BESOV_S_MIN, BESOV_S_MAX, BESOV_S_POINTS);
        let h = (BESOV_S_MAX / BESOV_S_MIN).ln() / (BESOV_S_POINTS - 1) as f64;
        let vals: Vec<f64> = s.iter().map(|&s| (s.powf(-alpha) * difference_norm(&e, l, 2, s)).powi(2)).collect();
        let direct = h * (vals.iter().sum::<f64>() - 0.5 * (vals[0] + vals[vals.len() - 1]));
        let c = 2f64.powf(4.0 - 2.0 * alpha) * (1.0 / (4.0 - 2.0 * alpha) + 1.0 / (2.0 * alpha));
        let upper: f64 = e.iter().zip(l).map(|(e, &l)| e * mu(l).powf(alpha) * c).sum();
        let sn2 = rep.seminorm.powi(2);
        assert!(direct <= sn2 && sn2 <= 1.05 * upper, "alpha {alpha}: {direct} {sn2} {upper}");
    }
}

fn full_frames() -> &'static Vec<FrameSystem> {
    static F: OnceLock<Vec<FrameSystem>> = OnceLock::new();
    F.get_or_init(|| {
        let g = frame_grid(16).unwrap();
        [2.0, 4.0, 8.0].iter().map(|&w| build_frame(&g, w, DEFAULT_C, Angular::Full, 0).unwrap()).collect()
    })
}

#[test]
fn phi_matches_best_approximation() {
    let frames = full_frames();
    let g = frames[0].space().grid.clone();
    let whole = FrameSpace::new(g.clone(), 16.0, Angular::Full).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for fr in frames {
        let slack = 10.0 * fr.solver_tol * fr.condition();
        for _ in 0..5 {
            let f = whole.project(&random_spectrum(&g, &mut rng));
            let r = phi_error(&f, fr).unwrap();
            assert!((r.phi - r.e).abs() <= slack * r.norm, "omega {}: {} vs {}", fr.omega, r.phi, r.e);
            let pw = fr.space().random(&mut rng);
            let r = phi_error(&pw, fr).unwrap();
            assert!(r.phi <= 1e-8 * fr.condition() * r.norm);
        }
        assert_eq!(phi_error(&SpectralFunction::zeros(g.clone()), fr).unwrap().phi, 0.0);
    }
}

fn radial_frames(n_lambda: usize, omegas: &[f64]) -> Vec<FrameSystem> {
    let g = frame_grid(n_lambda).unwrap();
    omegas.iter().map(|&w| build_frame(&g, w, DEFAULT_C, Angular::Radial, 0).unwrap()).collect()
}

#[test]
fn rate_fit_on_prescribed_profiles() {
    let frames = radial_frames(64, &[4.0, 8.0, 16.0, 32.0]);
    let g = frames[0].space().grid.clone();
    for alpha in [0.75, 1.25, 2.0] {
        let f = rate_profile(&g, alpha);
        let rep = rate_report(&f, &frames).unwrap();
        for (p, e) in rep.phi.iter().zip(&rep.e) {
            assert!((p - e).abs() <= 1e-8 * e);
        }
        // slope of log (1+ω)^{−α} against log ω over this ω range
        let exact: Vec<(f64, f64)> = rep.omegas.iter().map(|&w| (w, (1.0 + w).powf(-alpha))).collect();
        let want = rate_fit(&exact).unwrap().alpha_hat;
        assert!((rep.fit.alpha_hat - want).abs() < 1e-6, "{} vs {want}", rep.fit.alpha_hat);
        eprintln!(
            "alpha {alpha}: fitted {:.4} (relative deviation {:.3})",
            rep.fit.alpha_hat,
            rep.fit.alpha_hat / alpha - 1.0
        );
    }
}

#[test]
fn dyadic_functional_constant_is_stable() {
    let omegas: Vec<f64> = (1..=7).map(|m| 2f64.powi(m)).collect();
    let frames = radial_frames(128, &omegas);
    let g = frames[0].space().grid.clone();
    let f = heat_profile(&g);
    for (alpha, q) in [(1.0, 2.0), (1.5, 2.0), (1.0, f64::INFINITY)] {
        let p = BesovParams::new(alpha, q, 2).unwrap();
        let base = theorem52_functional(&f, &p, &frames[..6], 64).unwrap();
        let s2 = theorem52_functional(&f, &p, &frames[..6], 128).unwrap();
        let ext = theorem52_functional(&f, &p, &frames, 64).unwrap();
        assert!(base.c_hat.is_finite() && base.c_hat > 0.0);
        for other in [&s2, &ext] {
            assert!((other.c_hat / base.c_hat - 1.0).abs() <= 0.1, "{} vs {}", other.c_hat, base.c_hat);
        }
        let scaled = theorem52_functional(&f.scale(Complex64::new(2.5, 0.0)), &p, &frames[..6], 64).unwrap();
        assert!((scaled.c_hat / base.c_hat - 1.0).abs() < 1e-6);
    }
    // band-limited to 2 and measured from ω = 4: only solver-level errors
    let pw = hdisk::paley_wiener::pw_project(&f, 2.0).unwrap();
    let p = BesovParams::new(1.0, 2.0, 2).unwrap();
    let rep = theorem52_functional(&pw, &p, &frames[1..6], 64).unwrap();
    assert!(rep.lhs <= 1e-6 * rep.rhs, "{rep:?}");
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn arb_spectrum() -> impl Strategy<Value = SpectralFunction> {
        any::<u64>().prop_map(|seed| random_spectrum(&reference_grid(), &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn jackson_at_most_one(f in arb_spectrum(), t in 0.05f64..15.0, r in 0.1f64..4.0) {
            prop_assert!(jackson_check(&f, t, r).unwrap() <= 1.0 + 1e-12);
        }

        #[test]
        fn best_approx_nonincreasing(f in arb_spectrum(), a in 0.0f64..16.0, b in 0.0f64..16.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(best_approx(&f, hi) <= best_approx(&f, lo) * (1.0 + 1e-15));
            prop_assert!(best_approx(&f, 0.0) <= plancherel_norm(&f) * (1.0 + 1e-12));
        }

        #[test]
        fn k_functional_sandwich(f in arb_spectrum(), t in 1e-3f64..10.0, r in 0.5f64..3.0) {
            let (k2, upper) = k2_functional(&f, t, r);
            prop_assert!(k2 <= upper * (1.0 + 1e-12));
            prop_assert!(upper <= 2f64.sqrt() * k2 * (1.0 + 1e-12));
        }

        #[test]
        fn rate_fit_recovers_power_laws(alpha in 0.1f64..4.0, c in 1e-3f64..1e3, start in 1.0f64..8.0) {
            let pts: Vec<(f64, f64)> = (0..5).map(|k| {
                let w = start * 2f64.powi(k);
                (w, c * w.powf(-alpha))
            }).collect();
            let fit = rate_fit(&pts).unwrap();
            prop_assert!((fit.alpha_hat - alpha).abs() <= 1e-10);
            prop_assert!(fit.residual <= 1e-10);
        }

        #[test]
        fn modulus_profile_nondecreasing_and_bounded(f in arb_spectrum(), r in 1u32..4) {
            let s = log_grid(1e-3, 10.0, 24);
            let m = modulus_profile(&f.energy_profile(), &f.grid.lams, r, &s, 16);
            prop_assert!(m.windows(2).all(|w| w[0] <= w[1]));
            // |1 − e^{iθ}| ≤ 2
            let cap = 2f64.powi(r as i32) * plancherel_norm(&f);
            prop_assert!(m.iter().all(|&v| v <= cap * (1.0 + 1e-12)));
        }
    }
}
