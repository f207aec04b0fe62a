//! Angular Fourier coefficients of the horocycle kernel.
//!
//! For a point at geodesic radius r the kernel e^{(iλ+½)⟨z,b⟩} depends only on the angle ψ
//! between z and b. `kappa_modes` returns κ_m(r,λ) = (1/2π)∫ e^{(iλ+½)β(r,ψ)} e^{−imψ} dψ
//! for m = 0..=mmax (the coefficients are even in m). κ_0 is the spherical function φ_λ(r).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::Arc;

use crate::quad::{gauss_legendre, ChebPanels};

/// Trapezoid length large enough that aliased coefficients are below double precision.
pub fn fft_length(r: f64, lam: f64, mmax: usize) -> usize {
    let eps = 1.0 - (0.5 * r).tanh();
    let need = 2.0 * mmax as f64 + (2.0 * lam + 2.0) / eps + 40.0 / eps;
    let need = need.max(256.0).min(1e8);
    (need.ceil() as usize).next_power_of_two()
}

/// β(r, ψ) = log((1−ρ²)/(1−2ρcosψ+ρ²)) with ρ = tanh(r/2), written as −log(cosh r − sinh r cos ψ).
fn beta(r: f64, psi: f64) -> f64 {
    // cosh r − sinh r cos ψ = e^{−r} + 2 sinh r sin²(ψ/2)
    let s = (0.5 * psi).sin();
    -((-r).exp() + 2.0 * r.sinh() * s * s).ln()
}

pub struct KappaPlanner {
    planner: FftPlanner<f64>,
    plans: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl Default for KappaPlanner {
    fn default() -> Self {
        Self::new()
    }
}

impl KappaPlanner {
    pub fn new() -> Self {
        Self { planner: FftPlanner::new(), plans: HashMap::new() }
    }

    fn plan(&mut self, n: usize) -> Arc<dyn Fft<f64>> {
        let planner = &mut self.planner;
        self.plans.entry(n).or_insert_with(|| planner.plan_fft_forward(n)).clone()
    }

    /// κ_m(r, λ) for m = 0..=mmax.
    pub fn kappa_modes(&mut self, r: f64, lam: f64, mmax: usize) -> Vec<Complex64> {
        if r == 0.0 {
            let mut out = vec![Complex64::new(0.0, 0.0); mmax + 1];
            out[0] = Complex64::new(1.0, 0.0);
            return out;
        }
        let n = fft_length(r, lam, mmax);
        let mut buf: Vec<Complex64> = (0..n)
            .map(|k| {
                let b = beta(r, TAU * k as f64 / n as f64);
                Complex64::from_polar((0.5 * b).exp(), lam * b)
            })
            .collect();
        self.plan(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        (0..=mmax).map(|m| buf[m] * scale).collect()
    }
}

/// Spherical functions φ_λ(r) for a batch of λ via the Mehler integral
/// φ_λ(r) = (√2/π) ∫₀^r cos(λs) (cosh r − cosh s)^{−1/2} ds.
pub fn spherical_batch(r: f64, lams: &[f64]) -> Vec<f64> {
    if r < 1e-9 {
        return lams.iter().map(|&l| 1.0 - (l * l + 0.25) * r * r / 4.0).collect();
    }
    let lmax = lams.iter().cloned().fold(0.0, f64::max);
    let (x, w) = gauss_legendre(16);
    let panels = ((lmax * r) / 10.0).ceil() as usize + 2;
    let mut out = vec![0.0; lams.len()];
    // s = r(1 − u²), u ∈ (0, 1)
    for p in 0..panels {
        let lo = p as f64 / panels as f64;
        let h = 1.0 / panels as f64;
        for j in 0..16 {
            let u = lo + 0.5 * (x[j] + 1.0) * h;
            let wu = 0.5 * w[j] * h;
            let d = r * u * u;
            let s = r - d;
            let g = 2.0 * r * u / (2.0 * (0.5 * (r + s)).sinh() * (0.5 * d).sinh()).sqrt();
            let c = wu * g;
            for (o, &l) in out.iter_mut().zip(lams) {
                *o += c * (l * s).cos();
            }
        }
    }
    for o in out.iter_mut() {
        *o *= SQRT_2 / PI;
    }
    out
}

/// κ_m(r, λ_l) tabulated on Chebyshev panels in r ∈ [0, r_max].
pub struct KappaTable {
    pub lams: Vec<f64>,
    pub mmax: usize,
    pub r_max: f64,
    cheb: ChebPanels,
    // [node][lambda][m]
    data: Vec<Complex64>,
}

const TABLE_ORDER: usize = 24;

impl KappaTable {
    /// Mode 0 uses the Mehler integral; higher modes use the trapezoid/FFT route.
    pub fn new(lams: &[f64], mmax: usize, r_max: f64) -> Self {
        let lmax = lams.iter().cloned().fold(0.0, f64::max);
        let width = (6.0 / (lmax + 1.0)).min(0.25);
        let panels = (r_max / width).ceil().max(1.0) as usize;
        let cheb = ChebPanels::new(r_max, panels, TABLE_ORDER);
        let nodes = cheb.nodes();
        let nl = lams.len();
        let stride = mmax + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); nodes.len() * nl * stride];
        let mut planner = KappaPlanner::new();
        for (i, &r) in nodes.iter().enumerate() {
            if mmax == 0 {
                for (l, v) in spherical_batch(r, lams).into_iter().enumerate() {
                    data[i * nl + l] = Complex64::new(v, 0.0);
                }
            } else {
                for (l, &lam) in lams.iter().enumerate() {
                    let k = planner.kappa_modes(r, lam, mmax);
                    let off = (i * nl + l) * stride;
                    data[off..off + stride].copy_from_slice(&k);
                }
            }
        }
        Self { lams: lams.to_vec(), mmax, r_max, cheb, data }
    }

    /// κ_m(r, λ_l) for all l and m = 0..=mmax, laid out [l][m].
    pub fn eval(&self, r: f64, out: &mut Vec<Complex64>, scratch: &mut Vec<f64>) {
        assert!(r <= self.r_max * (1.0 + 1e-12), "radius {r} beyond table range {}", self.r_max);
        let p = self.cheb.weights_at(r.min(self.r_max), scratch);
        let nl = self.lams.len();
        let stride = self.mmax + 1;
        let block = nl * stride;
        out.clear();
        out.resize(block, Complex64::new(0.0, 0.0));
        for (j, &c) in scratch.iter().enumerate() {
            let node = p * TABLE_ORDER + j;
            let src = &self.data[node * block..(node + 1) * block];
            for (o, s) in out.iter_mut().zip(src) {
                *o += s * c;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct trapezoid sum of the kernel against e^{−imψ}, independent of the FFT.
    fn slow_kappa(r: f64, lam: f64, m: i64, n: usize) -> Complex64 {
        let rho = (0.5 * r).tanh();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let psi = TAU * k as f64 / n as f64;
            let b = Complex64::from_polar(1.0, psi);
            let z = Complex64::new(rho, 0.0);
            let beta = ((1.0 - rho * rho) / (z - b).norm_sqr()).ln();
            acc += (Complex64::new(0.5, lam) * beta).exp() * Complex64::from_polar(1.0, -(m as f64) * psi);
        }
        acc / n as f64
    }

    #[test]
    fn fft_matches_direct_sum() {
        let mut p = KappaPlanner::new();
        for &(r, lam) in &[(0.3, 1.0), (2.0, 5.5), (4.5, 12.0)] {
            let k = p.kappa_modes(r, lam, 40);
            let n = 3 * fft_length(r, lam, 40);
            for m in [0usize, 1, 7, 40] {
                let s = slow_kappa(r, lam, m as i64, n);
                let s2 = slow_kappa(r, lam, -(m as i64), n);
                assert!((k[m] - s).norm() < 1e-13, "r={r} lam={lam} m={m} {} {}", k[m], s);
                assert!((s - s2).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn mode_zero_matches_mehler() {
        let mut p = KappaPlanner::new();
        let lams = [0.5, 1.0, 3.25, 8.0, 15.5, 40.0];
        for &r in &[0.01, 0.5, 1.7, 3.0, 5.0] {
            let m = spherical_batch(r, &lams);
            for (l, &lam) in lams.iter().enumerate() {
                let k = p.kappa_modes(r, lam, 0)[0];
                assert!(k.im.abs() < 1e-13, "{}", k.im);
                assert!((k.re - m[l]).abs() < 1e-12, "r={r} lam={lam} {} {}", k.re, m[l]);
            }
        }
    }

    #[test]
    fn spherical_function_is_laplace_eigenfunction() {
        // φ'' + coth(r) φ' = −(λ² + 1/4) φ, checked by central differences.
        let lams = [0.7, 2.5, 6.0];
        let h = 1e-3;
        for &r in &[0.8, 2.0, 3.5] {
            let a = spherical_batch(r - h, &lams);
            let b = spherical_batch(r, &lams);
            let c = spherical_batch(r + h, &lams);
            for l in 0..lams.len() {
                let d2 = (a[l] - 2.0 * b[l] + c[l]) / (h * h);
                let d1 = (c[l] - a[l]) / (2.0 * h);
                let lhs = d2 + d1 / r.tanh();
                let rhs = -(lams[l] * lams[l] + 0.25) * b[l];
                assert!((lhs - rhs).abs() < 1e-4 * (1.0 + rhs.abs()), "{lhs} {rhs}");
            }
        }
    }

    #[test]
    fn table_interpolates_fft_values() {
        let lams: Vec<f64> = (0..8).map(|n| n as f64 + 0.5).collect();
        let t = KappaTable::new(&lams, 20, 4.0);
        let mut p = KappaPlanner::new();
        let (mut out, mut s) = (Vec::new(), Vec::new());
        for &r in &[0.0, 0.013, 1.2345, 2.999, 3.87, 4.0] {
            t.eval(r, &mut out, &mut s);
            for (l, &lam) in lams.iter().enumerate() {
                let k = p.kappa_modes(r, lam, 20);
                for m in 0..=20 {
                    assert!((out[l * 21 + m] - k[m]).norm() < 1e-13, "r={r} l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn radial_table_high_frequency() {
        let lams: Vec<f64> = (0..64).map(|n| n as f64 + 0.5).collect();
        let t = KappaTable::new(&lams, 0, 4.0);
        let (mut out, mut s) = (Vec::new(), Vec::new());
        for &r in &[0.031, 1.111, 3.7, 3.99] {
            t.eval(r, &mut out, &mut s);
            let direct = spherical_batch(r, &lams);
            for l in 0..lams.len() {
                assert!((out[l].re - direct[l]).abs() < 1e-12, "r={r} l={l}");
            }
        }
    }
}
