//! Test-function families used by calibration, the check suite and the tests.
//!
//! Spatially localized functions come from translated heat kernels and their Laplacians:
//! the spectrum μ^k e^{−tμ}·e^{(−iλ+½)⟨a,b⟩} with μ = λ² + ¼ is the transform of Δ^k h_t
//! moved to the point a. Small t keeps the function well inside the truncated ball.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::Arc;

use crate::geometry::busemann_z;
use crate::transform::{SpectralFunction, SpectralGrid};

#[derive(Clone, Copy, Debug)]
pub struct HeatTerm {
    pub t: f64,
    pub k: u32,
    pub center: Complex64,
    pub coeff: Complex64,
}

impl HeatTerm {
    pub fn value(&self, lam: f64, theta_b: f64) -> Complex64 {
        let mu = lam * lam + 0.25;
        let beta = busemann_z(self.center, Complex64::from_polar(1.0, theta_b));
        self.coeff * mu.powi(self.k as i32) * (-self.t * mu).exp() * Complex64::new(0.5, -lam).scale(beta).exp()
    }
}

pub fn heat_spectrum(grid: &Arc<SpectralGrid>, terms: &[HeatTerm]) -> SpectralFunction {
    SpectralFunction::from_fn(grid.clone(), |l, t| terms.iter().map(|h| h.value(l, t)).sum())
}

pub fn calibration_terms() -> Vec<Vec<HeatTerm>> {
    let one = Complex64::new(1.0, 0.0);
    let h = |t, k, x, y| vec![HeatTerm { t, k, center: Complex64::new(x, y), coeff: one }];
    vec![h(0.15, 0, 0.0, 0.0), h(0.15, 1, 0.3, 0.1), h(0.2, 2, 0.0, 0.0), h(0.15, 3, 0.0, -0.2), h(0.2, 1, 0.25, 0.0)]
}

/// The fixed five-function calibration family.
pub fn calibration_family(grid: &Arc<SpectralGrid>) -> Vec<SpectralFunction> {
    calibration_terms().iter().map(|t| heat_spectrum(grid, t)).collect()
}

/// Three random heat terms with t ∈ [0.15, 0.2], k ≤ 3 and centers within |a| ≤ 0.3.
/// Spectral peaks sit at λ = sqrt(k/t) ≤ 4.5.
pub fn random_heat_terms(rng: &mut ChaCha8Rng) -> Vec<HeatTerm> {
    (0..3)
        .map(|_| HeatTerm {
            t: rng.gen_range(0.15..0.2),
            k: rng.gen_range(0..4),
            center: Complex64::from_polar(0.3 * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>()),
            coeff: Complex64::new(normal(rng), normal(rng)),
        })
        .collect()
}

pub fn random_localized(grid: &Arc<SpectralGrid>, rng: &mut ChaCha8Rng) -> SpectralFunction {
    heat_spectrum(grid, &random_heat_terms(rng))
}

/// Standard normal deviate (Box–Muller).
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (TAU * v).cos()
}

/// Random spectrum with independent complex normal entries on nodes λ_i < ω, zero above.
pub fn random_band_limited(grid: &Arc<SpectralGrid>, omega: f64, rng: &mut ChaCha8Rng) -> SpectralFunction {
    let mut f = SpectralFunction::zeros(grid.clone());
    let nb = grid.n_b;
    for i in 0..grid.count_below(omega) {
        for k in 0..nb {
            f.values[i * nb + k] = Complex64::new(normal(rng), normal(rng));
        }
    }
    f
}

/// Random spectrum over the whole grid with a random decay rate in λ.
pub fn random_spectrum(grid: &Arc<SpectralGrid>, rng: &mut ChaCha8Rng) -> SpectralFunction {
    let decay = rng.gen_range(0.05..2.0);
    let mut f = SpectralFunction::zeros(grid.clone());
    let nb = grid.n_b;
    for (i, &l) in grid.lams.iter().enumerate() {
        let s = (-decay * l).exp();
        for k in 0..nb {
            f.values[i * nb + k] = Complex64::new(normal(rng), normal(rng)) * s;
        }
    }
    f
}

/// One nonzero λ row equal to a single angular mode.
pub fn spike(grid: &Arc<SpectralGrid>, row: usize, mode: i64) -> SpectralFunction {
    let mut f = SpectralFunction::zeros(grid.clone());
    let nb = grid.n_b;
    for k in 0..nb {
        f.values[row * nb + k] = Complex64::from_polar(1.0, mode as f64 * grid.theta_b(k));
    }
    f
}
