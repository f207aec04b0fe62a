//! Approximation-theoretic functionals on the spectral side: best approximation by
//! band-limited functions, Jackson ratios, moduli of continuity, Besov norms, the quadratic
//! K-functional, the sampling error Φ and power-law rate fits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::borrow::Borrow;
use std::sync::Arc;

use crate::frames::FrameSystem;
use crate::paley_wiener::{mu, pw_project};
use crate::transform::{plancherel_norm, SpectralFunction, SpectralGrid};
use crate::{Error, Result};

/// E(f,t): Plancherel norm of the part of F at λ ≥ t.
pub fn best_approx(f: &SpectralFunction, t: f64) -> f64 {
    best_approx_profile(&f.energy_profile(), &f.grid.lams, t)
}

pub fn best_approx_profile(energy: &[f64], lams: &[f64], t: f64) -> f64 {
    energy.iter().zip(lams).filter(|(_, &l)| l >= t).map(|(e, _)| e).sum::<f64>().sqrt()
}

/// ‖Δ^{r/2} f‖.
pub fn sobolev_seminorm(f: &SpectralFunction, r: f64) -> f64 {
    f.energy_profile().iter().zip(&f.grid.lams).map(|(e, &l)| e * mu(l).powf(r)).sum::<f64>().sqrt()
}

/// E(f,t)·(t² + ¼)^{r/2} / ‖Δ^{r/2} f‖, at most 1 for every f.
pub fn jackson_check(f: &SpectralFunction, t: f64, r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Param(format!("t must be positive, got {t}")));
    }
    let s = sobolev_seminorm(f, r);
    if s == 0.0 {
        return Err(Error::Param("zero Sobolev norm".into()));
    }
    Ok(best_approx(f, t) * mu(t).powf(0.5 * r) / s)
}

pub const MODULUS_TAUS: usize = 32;
/// Smallest τ/s on the modulus grid.
pub const MODULUS_SPAN: f64 = 1e-3;

/// ‖(I − e^{iτ√(−Δ)})^r f‖ for a fixed τ.
pub fn difference_norm(energy: &[f64], lams: &[f64], r: u32, tau: f64) -> f64 {
    energy
        .iter()
        .zip(lams)
        .map(|(e, &l)| e * (2.0 * (0.5 * tau * mu(l).sqrt()).sin().abs()).powi(2 * r as i32))
        .sum::<f64>()
        .sqrt()
}

/// τ grid: n geometric points s·SPAN^{k/n}, k = 1..=n, plus s itself.
pub fn tau_grid(s: f64, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (1..=n).rev().map(|k| s * MODULUS_SPAN.powf(k as f64 / n as f64)).collect();
    t.push(s);
    t
}

/// Ω_r(f, s) with the sup over τ ≤ s taken on `tau_grid(s, n_tau)`.
pub fn modulus_with(f: &SpectralFunction, r: u32, s: f64, n_tau: usize) -> f64 {
    let (e, l) = (f.energy_profile(), &f.grid.lams);
    tau_grid(s, n_tau).into_iter().map(|t| difference_norm(&e, l, r, t)).fold(0.0, f64::max)
}

pub fn modulus(f: &SpectralFunction, r: u32, s: f64) -> f64 {
    modulus_with(f, r, s, MODULUS_TAUS)
}

/// Ω_r on an increasing s-grid; each value is the sup over the union of the τ grids up to
/// that s, so the result is nondecreasing.
pub fn modulus_profile(energy: &[f64], lams: &[f64], r: u32, s_grid: &[f64], n_tau: usize) -> Vec<f64> {
    let mut run = 0.0f64;
    s_grid
        .iter()
        .map(|&s| {
            let here = tau_grid(s, n_tau).into_iter().map(|t| difference_norm(energy, lams, r, t)).fold(0.0, f64::max);
            run = run.max(here);
            run
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub alpha: f64,
    /// Integrability index; `f64::INFINITY` for the sup form.
    pub q: f64,
    pub r: u32,
}

impl BesovParams {
    pub fn new(alpha: f64, q: f64, r: u32) -> Result<Self> {
        let ok_q = q >= 1.0;
        let ok_a = alpha > 0.0 && if q.is_infinite() { alpha <= r as f64 } else { alpha < r as f64 };
        if !(ok_q && ok_a) {
            return Err(Error::Param(format!("invalid Besov parameters alpha = {alpha}, q = {q}, r = {r}")));
        }
        Ok(Self { alpha, q, r })
    }
}

pub const BESOV_S_POINTS: usize = 64;
pub const BESOV_S_MIN: f64 = 1e-3;
pub const BESOV_S_MAX: f64 = 10.0;

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

#[derive(Clone, Debug)]
pub struct BesovReport {
    pub norm: f64,
    pub seminorm: f64,
    /// Bound on the omitted integral over s > s_max from Ω ≤ 2^r‖f‖.
    pub tail_large_s: f64,
    /// Bound on the omitted integral over s < s_min from Ω ≤ (s·√μ_max)^r‖f‖.
    pub tail_small_s: f64,
}

/// ‖f‖ + (∫ (s^{−α}Ω_r(f,s))^q ds/s)^{1/q} on a log-spaced s-grid with the trapezoid rule in
/// log s; q = ∞ takes the sup over the grid.
pub fn besov_report(f: &SpectralFunction, p: &BesovParams, n_s: usize) -> BesovReport {
    let (e, lams) = (f.energy_profile(), &f.grid.lams);
    let norm = e.iter().sum::<f64>().sqrt();
    let s = log_grid(BESOV_S_MIN, BESOV_S_MAX, n_s);
    let om = modulus_profile(&e, lams, p.r, &s, MODULUS_TAUS);
    let vals: Vec<f64> = s.iter().zip(&om).map(|(s, o)| s.powf(-p.alpha) * o).collect();
    let big = (2f64).powi(p.r as i32) * norm;
    let kmax = lams.iter().zip(&e).filter(|(_, &x)| x > 0.0).map(|(&l, _)| mu(l).sqrt()).fold(0.0, f64::max);
    let (seminorm, tail_large_s, tail_small_s) = if p.q.is_infinite() {
        let sup = vals.iter().cloned().fold(0.0, f64::max);
        let small = (kmax.powi(p.r as i32) * norm) * BESOV_S_MIN.powf(p.r as f64 - p.alpha);
        (sup, big * BESOV_S_MAX.powf(-p.alpha), small)
    } else {
        let h = (BESOV_S_MAX / BESOV_S_MIN).ln() / (n_s - 1) as f64;
        let pw: Vec<f64> = vals.iter().map(|v| v.powf(p.q)).collect();
        let integral = h * (pw.iter().sum::<f64>() - 0.5 * (pw[0] + pw[n_s - 1]));
        let large = big.powf(p.q) * BESOV_S_MAX.powf(-p.alpha * p.q) / (p.alpha * p.q);
        let d = (p.r as f64 - p.alpha) * p.q;
        let small = (kmax.powi(p.r as i32) * norm).powf(p.q) * BESOV_S_MIN.powf(d) / d;
        (integral.powf(1.0 / p.q), large, small)
    };
    BesovReport { norm: norm + seminorm, seminorm, tail_large_s, tail_small_s }
}

pub fn besov_norm(f: &SpectralFunction, p: &BesovParams) -> f64 {
    besov_report(f, p, BESOV_S_POINTS).norm
}

/// Quadratic K-functional k2 and the value k_upper of ‖f₀‖ + t‖f₁‖_{H^r} at the minimizing
/// split f₁ = F/(1 + t²μ^r); k2 ≤ K(f,t) ≤ k_upper ≤ √2·k2.
pub fn k2_functional(f: &SpectralFunction, t: f64, r: f64) -> (f64, f64) {
    let (mut k2, mut n0, mut n1) = (0.0, 0.0, 0.0);
    for (e, &l) in f.energy_profile().iter().zip(&f.grid.lams) {
        let m = mu(l).powf(r);
        let a = t * t * m;
        let d = 1.0 + a;
        k2 += e * a / d;
        n0 += e * (a / d) * (a / d);
        n1 += e * m / (d * d);
    }
    (k2.sqrt(), n0.sqrt() + t * n1.sqrt())
}

#[derive(Clone, Debug)]
pub struct PhiReport {
    pub phi: f64,
    pub e: f64,
    pub norm: f64,
}

/// Φ(f; Z_ω) = ‖F − Σ_j f_ω(x_j) Θ̂_j‖ with f_ω = χ_ω F, sampled through the frame's
/// analysis operator.
pub fn phi_error(f: &SpectralFunction, frame: &FrameSystem) -> Result<PhiReport> {
    let omega = frame.omega;
    let fw = pw_project(f, omega)?;
    let rec = frame.dual_apply(&frame.analysis.sample(&fw))?;
    Ok(PhiReport { phi: plancherel_norm(&f.sub(&rec)), e: best_approx(f, omega), norm: plancherel_norm(f) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub alpha_hat: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares slope of log v against log ω, negated.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::Param(format!("rate fit needs at least 4 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0) || !(p.0 > 0.0)) {
        return Err(Error::Param(format!("rate fit needs positive values, got ({}, {})", p.0, p.1)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let res = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / n;
    Ok(RateFit { alpha_hat: -slope, residual: res.sqrt() })
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub omegas: Vec<f64>,
    pub e: Vec<f64>,
    pub phi: Vec<f64>,
    /// Fit of Φ against ω.
    pub fit: RateFit,
}

pub fn rate_report<F: Borrow<FrameSystem>>(f: &SpectralFunction, frames: &[F]) -> Result<RateReport> {
    let mut omegas = Vec::new();
    let (mut e, mut phi) = (Vec::new(), Vec::new());
    for fr in frames {
        let fr = fr.borrow();
        let r = phi_error(f, fr)?;
        omegas.push(fr.omega);
        e.push(r.e);
        phi.push(r.phi);
    }
    let pts: Vec<(f64, f64)> = omegas.iter().cloned().zip(phi.iter().cloned()).collect();
    Ok(RateReport { fit: rate_fit(&pts)?, omegas, e, phi })
}

/// Radial spectrum whose cell energies follow T(ω) = (1+ω)^{−2α}/(2α): the cell around node i
/// (edges at midpoints between nodes, last cell open) carries T(lower) − T(upper), so
/// E(f, ω)² = T(ω) whenever ω is a cell edge.
pub fn rate_profile(grid: &Arc<SpectralGrid>, alpha: f64) -> SpectralFunction {
    let tail = |w: f64| (1.0 + w).powf(-2.0 * alpha) / (2.0 * alpha);
    let n = grid.n_lambda();
    let mut edges = vec![0.0];
    edges.extend((1..n).map(|i| 0.5 * (grid.lams[i - 1] + grid.lams[i])));
    let nb = grid.n_b;
    let mut f = SpectralFunction::zeros(grid.clone());
    for i in 0..n {
        let mass = if i + 1 < n { tail(edges[i]) - tail(edges[i + 1]) } else { tail(edges[i]) };
        let a = (mass / grid.pq(i)).sqrt();
        for v in &mut f.values[i * nb..(i + 1) * nb] {
            *v = Complex64::new(a, 0.0);
        }
    }
    f
}

/// Radial heat kernel with spectrum e^{−μ}.
pub fn heat_profile(grid: &Arc<SpectralGrid>) -> SpectralFunction {
    SpectralFunction::from_fn(grid.clone(), |l, _| Complex64::new((-mu(l)).exp(), 0.0))
}

#[derive(Clone, Debug)]
pub struct Theorem52Report {
    pub params: BesovParams,
    pub omegas: Vec<f64>,
    pub phi: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub c_hat: f64,
}

/// lhs = (Σ_m (ω_m^α Φ(f; Z_{ω_m}))^q·ln 2)^{1/q} over dyadic ω_m (sup for q = ∞),
/// rhs = Besov norm, and their ratio.
pub fn theorem52_functional<F: Borrow<FrameSystem>>(
    f: &SpectralFunction,
    p: &BesovParams,
    frames: &[F],
    n_s: usize,
) -> Result<Theorem52Report> {
    let mut omegas = Vec::new();
    let mut phi = Vec::new();
    for fr in frames {
        let fr = fr.borrow();
        omegas.push(fr.omega);
        phi.push(phi_error(f, fr)?.phi);
    }
    let terms: Vec<f64> = omegas.iter().zip(&phi).map(|(w, ph)| w.powf(p.alpha) * ph).collect();
    let lhs = if p.q.is_infinite() {
        terms.iter().cloned().fold(0.0, f64::max)
    } else {
        (terms.iter().map(|t| t.powf(p.q)).sum::<f64>() * std::f64::consts::LN_2).powf(1.0 / p.q)
    };
    let rhs = besov_report(f, p, n_s).norm;
    Ok(Theorem52Report { params: *p, omegas, phi, lhs, rhs, c_hat: lhs / rhs })
}
