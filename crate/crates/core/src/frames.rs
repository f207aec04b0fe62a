//! Sampling frames for band-limited functions on lattices: analysis operator, frame bounds,
//! dual reconstruction by conjugate gradients, and the lattice-density constant.
//!
//! The band-limited space lives on a midpoint λ-grid with unit spacing. Each λ-row keeps the
//! angular modes |m| ≤ M(λ) = min(63, ⌊λ·sinh(π)/2⌋); coordinates are u = √(p q)·a_m, so the
//! Euclidean norm of u equals the Plancherel norm of the function.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::families::normal;
use crate::geometry::point_to_polar;
use crate::kappa::KappaTable;
use crate::lattice::{build_lattice, nyquist_radius, Lattice};
use crate::linalg::{conjugate_gradient, lanczos_extremes, Matrix};
use crate::transform::{
    build_midpoint_spectral_grid, modes_from_samples, samples_from_modes, SpectralFunction, SpectralGrid, C_P,
};
use crate::{Error, Result};

/// Radius of the ball the sampling lattices cover.
pub const LATTICE_RADIUS: f64 = 4.0;
pub const MODE_CAP: usize = 63;
pub const FRAME_N_B: usize = 128;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;
/// Largest c (8-step bisection on [2, 8]) with B/A ≤ 100 at ω ∈ {2, 4, 8}.
pub const DEFAULT_C: f64 = 5.140625;
pub const BOUNDS_TOL: f64 = 1e-8;
pub const TARGET_CONDITION: f64 = 100.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angular {
    /// Modes up to the per-row cutoff M(λ).
    Full,
    /// Mode 0 only (radial functions).
    Radial,
}

/// Midpoint grid λ = ½, 3/2, … with unit spacing and n nodes.
pub fn frame_grid(n_lambda: usize) -> Result<Arc<SpectralGrid>> {
    Ok(Arc::new(build_midpoint_spectral_grid(n_lambda as f64, n_lambda, FRAME_N_B, C_P)?))
}

pub fn mode_cutoff(lam: f64) -> usize {
    ((0.5 * lam * std::f64::consts::PI.sinh()).floor() as usize).min(MODE_CAP)
}

/// Coordinates of the band-limited space Π_ω on a spectral grid.
#[derive(Clone, Debug)]
pub struct FrameSpace {
    pub grid: Arc<SpectralGrid>,
    pub omega: f64,
    pub angular: Angular,
    /// Mode cutoff per band row.
    pub modes: Vec<usize>,
    offsets: Vec<usize>,
    pub dim: usize,
}

impl FrameSpace {
    pub fn new(grid: Arc<SpectralGrid>, omega: f64, angular: Angular) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Param(format!("band limit must be positive, got {omega}")));
        }
        if omega > grid.lambda_max {
            return Err(Error::BandTooLarge(omega));
        }
        let n = grid.count_below(omega);
        if n == 0 {
            return Err(Error::EmptyBand);
        }
        let modes: Vec<usize> = grid.lams[..n]
            .iter()
            .map(|&l| match angular {
                Angular::Full => mode_cutoff(l).min(grid.n_b / 2 - 1),
                Angular::Radial => 0,
            })
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut dim = 0;
        for &m in &modes {
            offsets.push(dim);
            dim += 2 * m + 1;
        }
        offsets.push(dim);
        Ok(Self { grid, omega, angular, modes, offsets, dim })
    }

    pub fn n_band(&self) -> usize {
        self.modes.len()
    }

    /// (λ row, mode) of a coordinate index.
    pub fn column(&self, c: usize) -> (usize, i64) {
        let i = self.offsets.partition_point(|&o| o <= c) - 1;
        (i, (c - self.offsets[i]) as i64 - self.modes[i] as i64)
    }

    pub fn index(&self, i: usize, m: i64) -> Option<usize> {
        let mm = *self.modes.get(i)? as i64;
        (m.abs() <= mm).then(|| self.offsets[i] + (m + mm) as usize)
    }

    /// Orthogonal projection onto Π_ω in coordinates.
    pub fn coords(&self, f: &SpectralFunction) -> Vec<Complex64> {
        assert_eq!(*f.grid, *self.grid, "spectral grid mismatch");
        let mut u = Vec::with_capacity(self.dim);
        for (i, &mm) in self.modes.iter().enumerate() {
            let s = self.grid.pq(i).sqrt();
            u.extend(modes_from_samples(f.row(i), mm).into_iter().map(|a| a * s));
        }
        u
    }

    pub fn function(&self, u: &[Complex64]) -> SpectralFunction {
        assert_eq!(u.len(), self.dim);
        let nb = self.grid.n_b;
        let mut f = SpectralFunction::zeros(self.grid.clone());
        for (i, &mm) in self.modes.iter().enumerate() {
            let s = 1.0 / self.grid.pq(i).sqrt();
            let a: Vec<Complex64> = u[self.offsets[i]..self.offsets[i + 1]].iter().map(|v| v * s).collect();
            f.values[i * nb..(i + 1) * nb].copy_from_slice(&samples_from_modes(&a, mm, nb));
        }
        f
    }

    pub fn project(&self, f: &SpectralFunction) -> SpectralFunction {
        self.function(&self.coords(f))
    }

    /// Random element with independent complex normal coordinates.
    pub fn random(&self, rng: &mut ChaCha8Rng) -> SpectralFunction {
        let u: Vec<Complex64> = (0..self.dim).map(|_| Complex64::new(normal(rng), normal(rng))).collect();
        self.function(&u)
    }
}

/// Sampling operator u ↦ (f(x_j))_j. Points that share a row (radial space, equal radii)
/// are stored once with a multiplicity.
pub struct AnalysisOperator {
    pub space: FrameSpace,
    pub n_points: usize,
    rows: Matrix,
    which: Vec<usize>,
    counts: Vec<f64>,
}

/// Rows E[j,(i,m)] = √(p_i q_i)·e^{imθ_j}·κ_m(r_j, λ_i) at the lattice points.
pub fn assemble_analysis(lattice: &Lattice, space: FrameSpace) -> Result<AnalysisOperator> {
    if lattice.points.is_empty() {
        return Err(Error::Lattice("empty lattice".into()));
    }
    let polar: Vec<(f64, f64)> = lattice.points.iter().map(point_to_polar).collect();
    let mut keys: Vec<(f64, f64)> = Vec::new();
    let mut which = Vec::with_capacity(polar.len());
    match space.angular {
        Angular::Full => {
            keys = polar.clone();
            which.extend(0..polar.len());
        }
        Angular::Radial => {
            let mut order: Vec<usize> = (0..polar.len()).collect();
            order.sort_by(|&a, &b| polar[a].0.total_cmp(&polar[b].0));
            which.resize(polar.len(), 0);
            for j in order {
                if keys.last().is_none_or(|k| k.0 != polar[j].0) {
                    keys.push((polar[j].0, 0.0));
                }
                which[j] = keys.len() - 1;
            }
        }
    }
    let mut counts = vec![0.0; keys.len()];
    for &k in &which {
        counts[k] += 1.0;
    }
    let n = space.n_band();
    let mmax = space.modes.iter().cloned().max().unwrap_or(0);
    let r_max = keys.iter().map(|k| k.0).fold(1e-3, f64::max);
    let table = KappaTable::new(&space.grid.lams[..n], mmax, r_max);
    let sq: Vec<f64> = (0..n).map(|i| space.grid.pq(i).sqrt()).collect();
    let mut rows = Matrix::zeros(keys.len(), space.dim);
    let (mut kap, mut scratch) = (Vec::new(), Vec::new());
    for (row, &(r, th)) in keys.iter().enumerate() {
        table.eval(r, &mut kap, &mut scratch);
        let dst = &mut rows.data[row * space.dim..(row + 1) * space.dim];
        let mut c = 0;
        for (i, &mm) in space.modes.iter().enumerate() {
            for m in -(mm as i64)..=(mm as i64) {
                let k = kap[i * (mmax + 1) + m.unsigned_abs() as usize];
                dst[c] = k * Complex64::from_polar(sq[i], m as f64 * th);
                c += 1;
            }
        }
    }
    Ok(AnalysisOperator { space, n_points: polar.len(), rows, which, counts })
}

impl AnalysisOperator {
    pub fn dim(&self) -> usize {
        self.space.dim
    }

    /// Samples f(x_j) of the function with coordinates u.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let distinct = self.rows.apply(u);
        self.which.iter().map(|&k| distinct[k]).collect()
    }

    /// Adjoint Eᴴy in coordinates.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.n_points);
        let mut folded = vec![ZERO; self.rows.rows];
        for (&k, v) in self.which.iter().zip(y) {
            folded[k] += v;
        }
        self.rows.apply_adjoint(&folded)
    }

    /// Frame operator S = EᴴE.
    pub fn gram(&self) -> Matrix {
        self.rows.gram_weighted(&self.counts)
    }

    /// Row j as a dense vector.
    pub fn row(&self, j: usize) -> &[Complex64] {
        self.rows.row(self.which[j])
    }

    pub fn sample(&self, f: &SpectralFunction) -> Vec<Complex64> {
        self.apply(&self.space.coords(f))
    }
}

/// Extreme eigenvalues (A, B) of the frame operator; RankDeficient when A < 1e−12·B.
pub fn frame_bounds(s: &Matrix) -> Result<(f64, f64)> {
    let e = lanczos_extremes(|x| s.apply(x), s.rows, BOUNDS_TOL);
    if !(e.min >= 1e-12 * e.max) || e.max <= 0.0 {
        return Err(Error::RankDeficient { a: e.min, b: e.max });
    }
    Ok((e.min, e.max))
}

pub struct FrameSystem {
    pub analysis: AnalysisOperator,
    pub gram: Matrix,
    pub a: f64,
    pub b: f64,
    pub omega: f64,
    pub lattice: Lattice,
    pub c: Option<f64>,
    pub solver_tol: f64,
    pub max_iter: usize,
}

impl FrameSystem {
    pub fn new(lattice: Lattice, space: FrameSpace, solver_tol: f64) -> Result<Self> {
        let omega = space.omega;
        let analysis = assemble_analysis(&lattice, space)?;
        let gram = analysis.gram();
        let (a, b) = frame_bounds(&gram)?;
        let max_iter = 10 * analysis.dim();
        Ok(Self { analysis, gram, a, b, omega, lattice, c: None, solver_tol, max_iter })
    }

    pub fn space(&self) -> &FrameSpace {
        &self.analysis.space
    }

    pub fn condition(&self) -> f64 {
        self.b / self.a
    }

    fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(conjugate_gradient(|x| self.gram.apply(x), rhs, self.solver_tol, self.max_iter)?.x)
    }

    /// Coordinates of S⁻¹Eᴴs.
    pub fn dual_coords(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        if samples.len() != self.analysis.n_points {
            return Err(Error::LengthMismatch { expected: self.analysis.n_points, got: samples.len() });
        }
        self.solve(&self.analysis.apply_adjoint(samples))
    }

    /// Reconstruction Σ_j s_j Θ̂_j from samples at the lattice points.
    pub fn dual_apply(&self, samples: &[Complex64]) -> Result<SpectralFunction> {
        Ok(self.space().function(&self.dual_coords(samples)?))
    }

    /// Θ̂_j = S⁻¹ k_j in coordinates, one solve per lattice point.
    pub fn dual_frame_coords(&self) -> Result<Vec<Vec<Complex64>>> {
        (0..self.analysis.n_points)
            .map(|j| {
                let rhs: Vec<Complex64> = self.analysis.row(j).iter().map(|v| v.conj()).collect();
                self.solve(&rhs)
            })
            .collect()
    }

    pub fn dual_frame_functions(&self) -> Result<Vec<SpectralFunction>> {
        Ok(self.dual_frame_coords()?.iter().map(|u| self.space().function(u)).collect())
    }

    /// y = S⁻¹x for a coordinate vector.
    pub fn solve_frame_operator(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.solve(x)
    }
}

/// Frame at band ω on a lattice with radius r = c·(ω² + ¼)^{−1/2}.
pub fn build_frame(grid: &Arc<SpectralGrid>, omega: f64, c: f64, angular: Angular, seed: u64) -> Result<FrameSystem> {
    let space = FrameSpace::new(grid.clone(), omega, angular)?;
    let lattice = build_lattice(LATTICE_RADIUS, nyquist_radius(omega, c), seed)?;
    let mut f = FrameSystem::new(lattice, space, DEFAULT_SOLVER_TOL)?;
    f.c = Some(c);
    Ok(f)
}

#[derive(Clone, Debug)]
pub struct CCalibration {
    pub c: f64,
    /// (c, worst condition number over the sweep; infinite when rank deficient).
    pub history: Vec<(f64, f64)>,
}

/// Worst condition number over the ω-sweep at density constant c.
pub fn sweep_condition(grid: &Arc<SpectralGrid>, omegas: &[f64], c: f64, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for &w in omegas {
        match build_frame(grid, w, c, Angular::Full, seed) {
            Ok(f) => worst = worst.max(f.condition()),
            Err(Error::RankDeficient { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        }
    }
    Ok(worst)
}

/// Largest c in [lo, hi] found by bisection with worst condition ≤ target.
pub fn calibrate_c(
    grid: &Arc<SpectralGrid>,
    omegas: &[f64],
    lo: f64,
    hi: f64,
    steps: usize,
    target: f64,
    seed: u64,
) -> Result<CCalibration> {
    let mut history = Vec::new();
    let k_lo = sweep_condition(grid, omegas, lo, seed)?;
    history.push((lo, k_lo));
    if k_lo > target {
        return Err(Error::Param(format!("density constant {lo} already exceeds condition {target} ({k_lo:.3e})")));
    }
    let k_hi = sweep_condition(grid, omegas, hi, seed)?;
    history.push((hi, k_hi));
    if k_hi <= target {
        return Ok(CCalibration { c: hi, history });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..steps {
        let mid = 0.5 * (a + b);
        let k = sweep_condition(grid, omegas, mid, seed)?;
        history.push((mid, k));
        if k <= target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(CCalibration { c: a, history })
}
