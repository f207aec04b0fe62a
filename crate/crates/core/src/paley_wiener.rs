//! Band-limited calculus on the spectral side.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::transform::{apply_multiplier, SpectralFunction, SpectralGrid};
use crate::{Error, Result};

/// Relative energy above the band tolerated by band-limit preconditions.
pub const BAND_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct BandRegion {
    pub omega: f64,
    pub chi: Vec<f64>,
}

impl BandRegion {
    pub fn new(grid: &SpectralGrid, omega: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Param(format!("band limit must be positive, got {omega}")));
        }
        if omega > grid.lambda_max {
            return Err(Error::BandTooLarge(omega));
        }
        let chi = grid.lams.iter().map(|&l| if l < omega { 1.0 } else { 0.0 }).collect();
        Ok(Self { omega, chi })
    }
}

pub fn mu(lam: f64) -> f64 {
    lam * lam + 0.25
}

pub fn pw_project(f: &SpectralFunction, omega: f64) -> Result<SpectralFunction> {
    BandRegion::new(&f.grid, omega)?;
    Ok(apply_multiplier(f, |l| Complex64::new(if l < omega { 1.0 } else { 0.0 }, 0.0)))
}

/// Energy ‖F − χ_ω F‖² (squared tail Plancherel norm).
pub fn tail_energy(f: &SpectralFunction, omega: f64) -> f64 {
    f.energy_profile().iter().zip(&f.grid.lams).filter(|(_, &l)| l >= omega).map(|(e, _)| e).sum()
}

pub fn require_band_limited(f: &SpectralFunction, omega: f64) -> Result<()> {
    let total: f64 = f.energy_profile().iter().sum();
    let tail = tail_energy(f, omega);
    if total > 0.0 && tail > BAND_TOL * total {
        return Err(Error::NotBandLimited { omega, fraction: tail / total });
    }
    Ok(())
}

/// log‖Δ^s F‖² via log-sum-exp over λ nodes (−∞ for the zero function).
pub fn log_power_norm_sq(f: &SpectralFunction, s: f64) -> f64 {
    log_power_norm_sq_profile(&f.energy_profile(), &f.grid.lams, s)
}

pub fn log_power_norm_sq_profile(energy: &[f64], lams: &[f64], s: f64) -> f64 {
    let terms: Vec<f64> =
        energy.iter().zip(lams).filter(|(e, _)| **e > 0.0).map(|(e, &l)| e.ln() + 2.0 * s * mu(l).ln()).collect();
    log_sum_exp(&terms)
}

pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// ‖Δ^s F‖ / ((ω² + ¼)^s ‖F‖) for F ∈ PW_ω.
pub fn bernstein_ratio(f: &SpectralFunction, omega: f64, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Param(format!("power must be nonnegative, got {s}")));
    }
    require_band_limited(f, omega)?;
    let l0 = log_power_norm_sq(f, 0.0);
    if l0 == f64::NEG_INFINITY {
        return Err(Error::Param("zero function".into()));
    }
    let ls = log_power_norm_sq(f, s);
    Ok((0.5 * (ls - l0) - s * mu(omega).ln()).exp())
}

#[derive(Clone, Debug)]
pub struct BandwidthEstimate {
    pub omega_hat: f64,
    /// r_k = ‖Δ^{k+1}F‖/‖Δ^k F‖ for k = 0..=k_max.
    pub ratios: Vec<f64>,
}

pub fn bandwidth_estimate(f: &SpectralFunction, k_max: usize) -> Result<BandwidthEstimate> {
    if k_max < 4 {
        return Err(Error::Param(format!("k_max must be at least 4, got {k_max}")));
    }
    let energy = f.energy_profile();
    if energy.iter().all(|&e| e == 0.0) {
        return Err(Error::Param("zero function".into()));
    }
    let logs: Vec<f64> = (0..=k_max + 1).map(|k| log_power_norm_sq_profile(&energy, &f.grid.lams, k as f64)).collect();
    let ratios: Vec<f64> = logs.windows(2).map(|w| (0.5 * (w[1] - w[0])).exp()).collect();
    let omega_hat = (ratios[k_max] - 0.25).max(0.0).sqrt();
    Ok(BandwidthEstimate { omega_hat, ratios })
}

/// Truncated Riesz series (σ/π²) Σ (−1)^{k−1}(k−½)^{−2} e^{−i(π/σ)(k−½)μ} over the K symmetric
/// pairs k ∈ {1−K, …, K}; each pair contributes −2i·sin(·), so the μ = 0 value is exactly 0.
pub fn riesz_scalar(mu: f64, sigma: f64, k_terms: usize) -> Complex64 {
    let c = PI / sigma;
    let mut acc = 0.0;
    // smallest terms first
    for k in (1..=k_terms).rev() {
        let h = k as f64 - 0.5;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * (c * h * mu).sin() / (h * h);
    }
    Complex64::new(0.0, -2.0 * acc * sigma / (PI * PI))
}

/// Bound on the omitted part of the series: (σ/π²)·Σ_{omitted}(k−½)^{−2} ≤ 2σ/(π²(K−1)).
pub fn riesz_tail_bound(sigma: f64, k_terms: usize) -> f64 {
    2.0 * sigma / (PI * PI * (k_terms as f64 - 1.0))
}

/// (σ/π²)·Σ_{k∈ℤ}(k−½)^{−2}: K pairs summed directly plus the trigamma tail 2ψ'(K+½).
pub fn riesz_weight_total(sigma: f64, k_terms: usize) -> f64 {
    let mut partial = 0.0;
    for k in (1..=k_terms).rev() {
        let h = k as f64 - 0.5;
        partial += 2.0 / (h * h);
    }
    let x = k_terms as f64 + 0.5;
    let tail = 2.0 * trigamma_asymptotic(x);
    sigma / (PI * PI) * (partial + tail)
}

/// Asymptotic series for ψ'(x), accurate to double precision for x ≥ 10.
fn trigamma_asymptotic(x: f64) -> f64 {
    let x2 = x * x;
    1.0 / x + 1.0 / (2.0 * x2) + 1.0 / (6.0 * x2 * x) - 1.0 / (30.0 * x2 * x2 * x) + 1.0 / (42.0 * x2 * x2 * x2 * x)
        - 1.0 / (30.0 * x2 * x2 * x2 * x2 * x)
}

pub fn riesz_apply(f: &SpectralFunction, sigma: f64, k_terms: usize) -> SpectralFunction {
    apply_multiplier(f, |l| riesz_scalar(mu(l), sigma, k_terms))
}

/// Values of the Riesz series at a single eigenvalue against the two candidate identities.
#[derive(Clone, Copy, Debug)]
pub struct RieszIdentityReport {
    pub series: Complex64,
    /// Distance to −iμ (the multiplier of iΔ).
    pub err_i_delta: f64,
    /// Distance to −μ (the multiplier of Δ).
    pub err_delta: f64,
    pub tail_bound: f64,
}

pub fn riesz_identity_report(mu: f64, sigma: f64, k_terms: usize) -> RieszIdentityReport {
    let series = riesz_scalar(mu, sigma, k_terms);
    RieszIdentityReport {
        series,
        err_i_delta: (series - Complex64::new(0.0, -mu)).norm(),
        err_delta: (series - Complex64::new(-mu, 0.0)).norm(),
        tail_bound: riesz_tail_bound(sigma, k_terms),
    }
}

#[derive(Clone, Debug)]
pub struct SchrodingerExtension {
    pub u: SpectralFunction,
    pub norm_ratio: f64,
    pub bound: f64,
}

/// u(z) = e^{−iz(λ²+¼)}F at complex time z, with the growth bound e^{(ω²+¼)|Im z|}.
pub fn schrodinger_extend(f: &SpectralFunction, omega: f64, z: Complex64) -> Result<SchrodingerExtension> {
    require_band_limited(f, omega)?;
    let u = apply_multiplier(f, |l| (Complex64::new(0.0, -1.0) * z * mu(l)).exp());
    let n0 = crate::transform::plancherel_norm(f);
    let norm_ratio = if n0 == 0.0 { 0.0 } else { crate::transform::plancherel_norm(&u) / n0 };
    let bound = (mu(omega) * z.im.abs()).exp();
    if norm_ratio > bound * (1.0 + 1e-12) {
        return Err(Error::Param(format!("growth bound violated: {norm_ratio} > {bound}")));
    }
    Ok(SchrodingerExtension { u, norm_ratio, bound })
}

/// e^{itΔ}: multiplier e^{−it(λ²+¼)}.
pub fn schrodinger_group(f: &SpectralFunction, t: f64) -> SpectralFunction {
    apply_multiplier(f, |l| Complex64::from_polar(1.0, -t * mu(l)))
}

/// e^{is√(−Δ)}: multiplier e^{is√(λ²+¼)}.
pub fn wave_group(f: &SpectralFunction, s: f64) -> SpectralFunction {
    apply_multiplier(f, |l| Complex64::from_polar(1.0, s * mu(l).sqrt()))
}

/// Checks ‖Δ^m F‖ ≤ C·‖Δ^k F‖^{m/k}‖F‖^{1−m/k} and returns (holds, log slack).
pub fn moment_inequality(f: &SpectralFunction, m: u32, k: u32, constant: f64) -> Result<(bool, f64)> {
    if m > k {
        return Err(Error::Param(format!("need m <= k, got m={m}, k={k}")));
    }
    let l0 = log_power_norm_sq(f, 0.0);
    if l0 == f64::NEG_INFINITY {
        return Err(Error::Param("zero function".into()));
    }
    if k == 0 {
        return Ok((true, constant.ln()));
    }
    let lm = 0.5 * log_power_norm_sq(f, m as f64);
    let lk = 0.5 * log_power_norm_sq(f, k as f64);
    let theta = m as f64 / k as f64;
    let rhs = constant.ln() + theta * lk + (1.0 - theta) * 0.5 * l0;
    let slack = rhs - lm;
    Ok((slack >= -1e-12 * (1.0 + lm.abs()), slack))
}

/// The log-convexity form with constant 1.
pub fn moment_logconvexity_check(f: &SpectralFunction, m: u32, k: u32) -> Result<bool> {
    Ok(moment_inequality(f, m, k, 1.0)?.0)
}
