//! Discretized Helgason–Fourier transform on the disk.
//!
//! Angular integrals are evaluated exactly on the trigonometric interpolant of the sampled
//! data: the kernel's angular Fourier coefficients κ_m(r,λ) are tabulated once per grid pair
//! (see [`crate::kappa`]), so forward and inverse reduce to mode-by-mode sums.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::geometry::{busemann_z, point_to_polar, DiskPoint};
use crate::kappa::KappaPlanner;
use crate::quad::composite_gauss_legendre;
use crate::{Error, Result};

const PANEL: usize = 16;

/// Plancherel constant 1/(2π) for this normalization; `calibrate_plancherel` recovers it numerically.
pub const C_P: f64 = 1.0 / TAU;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Geodesic polar product grid on the ball of radius R.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialGrid {
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub radii: Vec<f64>,
    /// Radial weights including the sinh r area factor.
    pub radial_weights: Vec<f64>,
}

impl SpatialGrid {
    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_theta as f64
    }

    /// Node index i·n_θ + k.
    pub fn point(&self, idx: usize) -> DiskPoint {
        let (i, k) = (idx / self.n_theta, idx % self.n_theta);
        DiskPoint::new(Complex64::from_polar((0.5 * self.radii[i]).tanh(), self.theta(k))).unwrap()
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.radial_weights[idx / self.n_theta] * TAU / self.n_theta as f64
    }

    pub fn nodes(&self) -> Vec<(DiskPoint, f64)> {
        (0..self.len()).map(|j| (self.point(j), self.weight(j))).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.radial_weights.iter().sum::<f64>() * TAU
    }
}

pub fn build_spatial_grid(radius: f64, n_r: usize, n_theta: usize) -> Result<SpatialGrid> {
    if !(radius > 0.0 && radius.is_finite()) || n_r < 8 || n_theta < 8 {
        return Err(Error::Param(format!(
            "spatial grid needs R > 0, n_r >= 8, n_theta >= 8 (got {radius}, {n_r}, {n_theta})"
        )));
    }
    if !n_r.is_multiple_of(PANEL) {
        return Err(Error::Param(format!("n_r must be a multiple of {PANEL}, got {n_r}")));
    }
    if (0.5 * radius).tanh() > crate::geometry::MAX_MODULUS {
        return Err(Error::Param(format!("radius {radius} too close to the boundary")));
    }
    let (radii, w) = composite_gauss_legendre(0.0, radius, n_r / PANEL, PANEL);
    let radial_weights = radii.iter().zip(&w).map(|(r, w)| w * r.sinh()).collect();
    Ok(SpatialGrid { radius, n_r, n_theta, radii, radial_weights })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaRule {
    /// Composite 16-point Gauss–Legendre panels.
    Gauss,
    /// Equispaced midpoint nodes.
    Midpoint,
    /// Caller-supplied nodes and weights.
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    pub lambda_max: f64,
    pub rule: LambdaRule,
    pub lams: Vec<f64>,
    pub q: Vec<f64>,
    pub n_b: usize,
    pub c_p: f64,
    /// Plancherel density c_P·λ·tanh(πλ) at the nodes.
    pub p: Vec<f64>,
}

impl SpectralGrid {
    pub fn n_lambda(&self) -> usize {
        self.lams.len()
    }

    pub fn len(&self) -> usize {
        self.lams.len() * self.n_b
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta_b(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_b as f64
    }

    /// Per-node measure p(λ_i)·q_i.
    pub fn pq(&self, i: usize) -> f64 {
        self.p[i] * self.q[i]
    }

    /// Grid from explicit nodes and weights; Λ_max is set half a weight past the last node.
    pub fn custom(lams: Vec<f64>, q: Vec<f64>, n_b: usize, c_p: f64) -> Result<Self> {
        if lams.is_empty() || lams.len() != q.len() {
            return Err(Error::Param("custom grid needs matching nonempty nodes and weights".into()));
        }
        if lams[0] <= 0.0 || lams.windows(2).any(|w| w[0] >= w[1]) || q.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Param("custom grid needs positive increasing nodes and positive weights".into()));
        }
        if n_b < 8 || !n_b.is_multiple_of(2) || !(c_p > 0.0 && c_p.is_finite()) {
            return Err(Error::Param(format!("invalid n_b {n_b} or c_P {c_p}")));
        }
        let lambda_max = lams[lams.len() - 1] + 0.5 * q[q.len() - 1];
        let p = plancherel_density(&lams, c_p);
        Ok(Self { lambda_max, rule: LambdaRule::Custom, lams, q, n_b, c_p, p })
    }

    pub fn with_c_p(&self, c_p: f64) -> SpectralGrid {
        let mut g = self.clone();
        g.c_p = c_p;
        g.p = plancherel_density(&g.lams, c_p);
        g
    }

    /// Number of nodes with λ_i < ω.
    pub fn count_below(&self, omega: f64) -> usize {
        self.lams.iter().take_while(|&&l| l < omega).count()
    }
}

pub fn plancherel_density(lams: &[f64], c_p: f64) -> Vec<f64> {
    lams.iter().map(|&l| c_p * l * (PI * l).tanh()).collect()
}

fn check_spectral_params(lambda_max: f64, n_lambda: usize, n_b: usize, c_p: f64) -> Result<()> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) || n_lambda < 16 || n_b < 8 || !n_b.is_multiple_of(2) {
        return Err(Error::Param(format!(
            "spectral grid needs Lambda_max > 0, n_lambda >= 16, even n_b >= 8 (got {lambda_max}, {n_lambda}, {n_b})"
        )));
    }
    if !(c_p > 0.0 && c_p.is_finite()) {
        return Err(Error::Param(format!("c_P must be positive, got {c_p}")));
    }
    Ok(())
}

pub fn build_spectral_grid(lambda_max: f64, n_lambda: usize, n_b: usize, c_p: f64) -> Result<SpectralGrid> {
    check_spectral_params(lambda_max, n_lambda, n_b, c_p)?;
    if !n_lambda.is_multiple_of(PANEL) {
        return Err(Error::Param(format!("n_lambda must be a multiple of {PANEL}, got {n_lambda}")));
    }
    let (lams, q) = composite_gauss_legendre(0.0, lambda_max, n_lambda / PANEL, PANEL);
    let p = plancherel_density(&lams, c_p);
    Ok(SpectralGrid { lambda_max, rule: LambdaRule::Gauss, lams, q, n_b, c_p, p })
}

/// Midpoint rule λ_i = (i + ½)·Λ/n on [0, Λ].
pub fn build_midpoint_spectral_grid(lambda_max: f64, n_lambda: usize, n_b: usize, c_p: f64) -> Result<SpectralGrid> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) || n_lambda < 1 || n_b < 8 || !n_b.is_multiple_of(2) {
        return Err(Error::Param(format!("invalid midpoint grid ({lambda_max}, {n_lambda}, {n_b})")));
    }
    if !(c_p > 0.0 && c_p.is_finite()) {
        return Err(Error::Param(format!("c_P must be positive, got {c_p}")));
    }
    let h = lambda_max / n_lambda as f64;
    let lams: Vec<f64> = (0..n_lambda).map(|i| (i as f64 + 0.5) * h).collect();
    let q = vec![h; n_lambda];
    let p = plancherel_density(&lams, c_p);
    Ok(SpectralGrid { lambda_max, rule: LambdaRule::Midpoint, lams, q, n_b, c_p, p })
}

#[derive(Clone, Debug)]
pub struct SpectralFunction {
    /// Row-major (λ index, b index).
    pub values: Vec<Complex64>,
    pub grid: Arc<SpectralGrid>,
}

impl SpectralFunction {
    pub fn zeros(grid: Arc<SpectralGrid>) -> Self {
        Self { values: vec![ZERO; grid.len()], grid }
    }

    pub fn new(grid: Arc<SpectralGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Param("spectral values must be finite".into()));
        }
        Ok(Self { values, grid })
    }

    pub fn from_fn(grid: Arc<SpectralGrid>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &l in &grid.lams {
            for k in 0..grid.n_b {
                values.push(f(l, grid.theta_b(k)));
            }
        }
        Self { values, grid }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.grid.n_b..(i + 1) * self.grid.n_b]
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * a).collect(), grid: self.grid.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid);
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(), grid: self.grid.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Per-node energies |F|²·p·q/n_b summed over b, one entry per λ node.
    pub fn energy_profile(&self) -> Vec<f64> {
        let g = &self.grid;
        (0..g.n_lambda())
            .map(|i| self.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>() * g.pq(i) / g.n_b as f64)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpatialFunction {
    /// Row-major (radial index, angular index).
    pub values: Vec<Complex64>,
    pub grid: Arc<SpatialGrid>,
}

impl SpatialFunction {
    pub fn zeros(grid: Arc<SpatialGrid>) -> Self {
        Self { values: vec![ZERO; grid.len()], grid }
    }

    pub fn new(grid: Arc<SpatialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Param("spatial values must be finite".into()));
        }
        Ok(Self { values, grid })
    }

    pub fn from_fn(grid: Arc<SpatialGrid>, f: impl Fn(&DiskPoint) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|j| f(&grid.point(j))).collect();
        Self { values, grid }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { values: self.values.iter().map(|v| v * a).collect(), grid: self.grid.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(), grid: self.grid.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Fraction of L² mass at geodesic radius r > R − 1.
    pub fn boundary_mass(&self) -> f64 {
        let g = &self.grid;
        let (mut outer, mut total) = (0.0, 0.0);
        for i in 0..g.n_r {
            let e: f64 = self.values[i * g.n_theta..(i + 1) * g.n_theta].iter().map(|v| v.norm_sqr()).sum::<f64>()
                * g.radial_weights[i];
            total += e;
            if g.radii[i] > g.radius - 1.0 {
                outer += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }
}

pub fn plancherel_norm(f: &SpectralFunction) -> f64 {
    f.energy_profile().iter().sum::<f64>().sqrt()
}

pub fn l2_norm(f: &SpatialFunction) -> f64 {
    let g = &f.grid;
    let s: f64 = f.values.iter().enumerate().map(|(j, v)| v.norm_sqr() * g.weight(j)).sum();
    s.sqrt()
}

/// Plancherel inner product ⟨F, G⟩ = Σ F·conj(G)·p·q/n_b.
pub fn plancherel_inner(f: &SpectralFunction, g: &SpectralFunction) -> Complex64 {
    let grid = &f.grid;
    let mut acc = ZERO;
    for i in 0..grid.n_lambda() {
        let s: Complex64 = f.row(i).iter().zip(g.row(i)).map(|(a, b)| a * b.conj()).sum();
        acc += s * (grid.pq(i) / grid.n_b as f64);
    }
    acc
}

pub fn apply_multiplier(f: &SpectralFunction, m: impl Fn(f64) -> Complex64) -> SpectralFunction {
    let g = &f.grid;
    let mut values = f.values.clone();
    for i in 0..g.n_lambda() {
        let mi = m(g.lams[i]);
        for v in &mut values[i * g.n_b..(i + 1) * g.n_b] {
            *v *= mi;
        }
    }
    SpectralFunction { values, grid: f.grid.clone() }
}

/// Laplacian symbol −(λ² + ¼).
pub fn laplacian_symbol(lam: f64) -> Complex64 {
    Complex64::new(-(lam * lam + 0.25), 0.0)
}

/// Angular Fourier coefficients of n equispaced samples for m = −mmax..=mmax.
/// The Nyquist mode (|m| = n/2) is split evenly between ±n/2.
pub fn modes_from_samples(vals: &[Complex64], mmax: usize) -> Vec<Complex64> {
    let n = vals.len();
    let tw = twiddles(n);
    let mut out = vec![ZERO; 2 * mmax + 1];
    for (j, o) in out.iter_mut().enumerate() {
        let m = j as i64 - mmax as i64;
        let am = m.unsigned_abs() as usize;
        if 2 * am > n {
            continue;
        }
        let mut c = ZERO;
        for (k, v) in vals.iter().enumerate() {
            c += v * tw[(m * k as i64).rem_euclid(n as i64) as usize].conj();
        }
        c /= n as f64;
        if 2 * am == n {
            c *= 0.5;
        }
        *o = c;
    }
    out
}

/// Samples Σ_m c_m e^{imθ_k} at n equispaced angles.
pub fn samples_from_modes(modes: &[Complex64], mmax: usize, n: usize) -> Vec<Complex64> {
    let mut folded = vec![ZERO; n];
    for (j, c) in modes.iter().enumerate() {
        let m = j as i64 - mmax as i64;
        folded[m.rem_euclid(n as i64) as usize] += c;
    }
    let tw = twiddles(n);
    (0..n)
        .map(|k| {
            let mut s = ZERO;
            for (m, c) in folded.iter().enumerate() {
                s += c * tw[(m * k) % n];
            }
            s
        })
        .collect()
}

fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect()
}

/// Precomputed κ_m(r_i, λ_l) for a grid pair.
pub struct TransformPlan {
    pub spatial: Arc<SpatialGrid>,
    pub spectral: Arc<SpectralGrid>,
    pub mmax: usize,
    // [radial][lambda][m = 0..=mmax]
    table: Vec<Complex64>,
}

impl TransformPlan {
    pub fn new(spatial: Arc<SpatialGrid>, spectral: Arc<SpectralGrid>) -> Self {
        let mmax = spectral.n_b.max(spatial.n_theta) / 2;
        let nl = spectral.n_lambda();
        let stride = mmax + 1;
        let mut table = vec![ZERO; spatial.n_r * nl * stride];
        let mut planner = KappaPlanner::new();
        for (i, &r) in spatial.radii.iter().enumerate() {
            for (l, &lam) in spectral.lams.iter().enumerate() {
                let k = planner.kappa_modes(r, lam, mmax);
                let off = (i * nl + l) * stride;
                table[off..off + stride].copy_from_slice(&k);
            }
        }
        Self { spatial, spectral, mmax, table }
    }

    fn kappa(&self, i: usize, l: usize, m: i64) -> Complex64 {
        let stride = self.mmax + 1;
        self.table[(i * self.spectral.n_lambda() + l) * stride + m.unsigned_abs() as usize]
    }

    /// Inverse transform onto the spatial grid nodes.
    pub fn inverse(&self, f: &SpectralFunction) -> SpatialFunction {
        let (sg, xg) = (&self.spectral, &self.spatial);
        assert_eq!(**sg, *f.grid, "spectral grid mismatch");
        let mm = self.mmax;
        let amodes: Vec<Vec<Complex64>> = (0..sg.n_lambda()).map(|l| modes_from_samples(f.row(l), mm)).collect();
        let mut values = Vec::with_capacity(xg.len());
        for i in 0..xg.n_r {
            let mut fm = vec![ZERO; 2 * mm + 1];
            for (l, a) in amodes.iter().enumerate() {
                let w = sg.pq(l);
                for (j, c) in a.iter().enumerate() {
                    if *c != ZERO {
                        fm[j] += c * self.kappa(i, l, j as i64 - mm as i64) * w;
                    }
                }
            }
            values.extend(samples_from_modes(&fm, mm, xg.n_theta));
        }
        SpatialFunction { values, grid: self.spatial.clone() }
    }

    /// Forward transform; errors when the function carries mass near the truncation radius.
    pub fn forward(&self, f: &SpatialFunction) -> Result<SpectralFunction> {
        let bm = f.boundary_mass();
        if bm > 1e-6 {
            return Err(Error::BoundaryMass { fraction: bm });
        }
        Ok(self.forward_unchecked(f))
    }

    pub fn forward_unchecked(&self, f: &SpatialFunction) -> SpectralFunction {
        let (sg, xg) = (&self.spectral, &self.spatial);
        assert_eq!(**xg, *f.grid, "spatial grid mismatch");
        let mm = self.mmax;
        let fmodes: Vec<Vec<Complex64>> =
            (0..xg.n_r).map(|i| modes_from_samples(&f.values[i * xg.n_theta..(i + 1) * xg.n_theta], mm)).collect();
        let mut values = Vec::with_capacity(sg.len());
        for l in 0..sg.n_lambda() {
            let mut out = vec![ZERO; 2 * mm + 1];
            for (i, a) in fmodes.iter().enumerate() {
                let w = xg.radial_weights[i] * TAU;
                for (j, c) in a.iter().enumerate() {
                    if *c != ZERO {
                        out[j] += c * self.kappa(i, l, j as i64 - mm as i64).conj() * w;
                    }
                }
            }
            values.extend(samples_from_modes(&out, mm, sg.n_b));
        }
        SpectralFunction { values, grid: self.spectral.clone() }
    }
}

/// Evaluate the inverse transform at arbitrary points.
pub fn inverse_at_points(f: &SpectralFunction, points: &[DiskPoint]) -> Vec<Complex64> {
    let g = &f.grid;
    let mm = g.n_b / 2;
    let amodes: Vec<Vec<Complex64>> = (0..g.n_lambda()).map(|l| modes_from_samples(f.row(l), mm)).collect();
    let mut planner = KappaPlanner::new();
    points
        .iter()
        .map(|p| {
            let (r, th) = point_to_polar(p);
            let phases: Vec<Complex64> =
                (0..=2 * mm).map(|j| Complex64::from_polar(1.0, (j as f64 - mm as f64) * th)).collect();
            let mut acc = ZERO;
            for (l, a) in amodes.iter().enumerate() {
                let k = planner.kappa_modes(r, g.lams[l], mm);
                let mut s = ZERO;
                for (j, c) in a.iter().enumerate() {
                    if *c != ZERO {
                        s += c * phases[j] * k[(j as i64 - mm as i64).unsigned_abs() as usize];
                    }
                }
                acc += s * g.pq(l);
            }
            acc
        })
        .collect()
}

/// Literal double sum Σ F·e^{(iλ+½)⟨x,b_k⟩}·p·q/n_b. Accurate only where the kernel's angular
/// bandwidth (roughly λ·e^r) is resolved by the n_b boundary nodes.
pub fn inverse_direct(f: &SpectralFunction, points: &[DiskPoint]) -> Vec<Complex64> {
    let g = &f.grid;
    let bs: Vec<Complex64> = (0..g.n_b).map(|k| Complex64::from_polar(1.0, g.theta_b(k))).collect();
    points
        .iter()
        .map(|p| {
            let beta: Vec<f64> = bs.iter().map(|&b| busemann_z(p.z(), b)).collect();
            let mut acc = ZERO;
            for l in 0..g.n_lambda() {
                let mut s = ZERO;
                for (k, &bk) in beta.iter().enumerate() {
                    s += f.values[l * g.n_b + k] * Complex64::from_polar((0.5 * bk).exp(), g.lams[l] * bk);
                }
                acc += s * (g.pq(l) / g.n_b as f64);
            }
            acc
        })
        .collect()
}

/// Literal dense sum Σ_nodes f(z)·e^{(−iλ+½)⟨z,b⟩}·w(z); same resolution caveat as [`inverse_direct`].
pub fn forward_direct(f: &SpatialFunction, spectral: Arc<SpectralGrid>) -> SpectralFunction {
    let xg = &f.grid;
    let pts: Vec<(Complex64, f64)> = (0..xg.len()).map(|j| (xg.point(j).z(), xg.weight(j))).collect();
    let mut values = Vec::with_capacity(spectral.len());
    for &lam in &spectral.lams {
        for k in 0..spectral.n_b {
            let b = Complex64::from_polar(1.0, spectral.theta_b(k));
            let mut s = ZERO;
            for (j, &(z, w)) in pts.iter().enumerate() {
                let bz = busemann_z(z, b);
                s += f.values[j] * Complex64::from_polar((0.5 * bz).exp() * w, -lam * bz);
            }
            values.push(s);
        }
    }
    SpectralFunction { values, grid: spectral }
}

/// Fraction of energy carried by the top (Nyquist) angular mode, maximized over λ rows.
pub fn top_mode_energy_fraction(f: &SpectralFunction) -> f64 {
    let g = &f.grid;
    let mm = g.n_b / 2;
    let mut worst: f64 = 0.0;
    for l in 0..g.n_lambda() {
        let row = f.row(l);
        let total: f64 = row.iter().map(|v| v.norm_sqr()).sum::<f64>() / g.n_b as f64;
        if total == 0.0 {
            continue;
        }
        let a = modes_from_samples(row, mm);
        let top = (a[0].norm_sqr() + a[2 * mm].norm_sqr()) * 2.0;
        worst = worst.max(top / total);
    }
    worst
}

/// Rejects spectra whose top angular mode carries more than 1e−8 of the energy.
pub fn check_angular_truncation(f: &SpectralFunction) -> Result<()> {
    let frac = top_mode_energy_fraction(f);
    if frac > 1e-8 {
        return Err(Error::Param(format!("top angular mode carries {frac:e} of the energy; increase n_b")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Calibration {
    pub c_p: f64,
    /// Per-function values ‖F‖²_{c=1}/‖inverse_{c=1} F‖².
    pub per_function: Vec<f64>,
    /// (max − min)/c_P over the family.
    pub spread: f64,
    /// Largest relative norm mismatch at the returned c_P.
    pub max_mismatch: f64,
}

/// Calibrates c_P from the norm identity on the fixed calibration family.
pub fn calibrate_plancherel(
    spatial: Arc<SpatialGrid>,
    lambda_max: f64,
    n_lambda: usize,
    n_b: usize,
) -> Result<Calibration> {
    let unit = Arc::new(build_spectral_grid(lambda_max, n_lambda, n_b, 1.0)?);
    let plan = TransformPlan::new(spatial, unit.clone());
    let mut per = Vec::new();
    for f in crate::families::calibration_family(&unit) {
        let s = plancherel_norm(&f).powi(2);
        let g = l2_norm(&plan.inverse(&f)).powi(2);
        per.push(s / g);
    }
    let lo = per.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = per.iter().cloned().fold(0.0, f64::max);
    let c_p = (0.5 * (lo.sqrt() + hi.sqrt())).powi(2);
    // mismatch at c: |sqrt(c_i/c) − 1|
    let max_mismatch = per.iter().map(|&ci| ((ci / c_p).sqrt() - 1.0).abs()).fold(0.0, f64::max);
    let spread = (hi - lo) / c_p;
    if spread > 1e-4 || !c_p.is_finite() {
        return Err(Error::Calibration { spread });
    }
    Ok(Calibration { c_p, per_function: per, spread, max_mismatch })
}
