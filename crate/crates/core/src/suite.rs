//! The invariant suite run by `check` and by the acceptance target. Each check compares the
//! library against an independent computation at a fixed tolerance.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::{OnceCell, RefCell};
use std::collections::BTreeMap;
use std::f64::consts::{SQRT_2, TAU};
use std::rc::Rc;
use std::sync::Arc;
use std::time::Instant;

use crate::approx::{
    heat_profile, jackson_check, k2_functional, log_grid, phi_error, rate_profile, rate_report, theorem52_functional,
    BesovParams,
};
use crate::families::{calibration_family, random_band_limited, random_localized, random_spectrum, spike};
use crate::frames::{Angular, FrameSpace, FrameSystem, TARGET_CONDITION};
use crate::geometry::{mobius_z, polar_to_point, DiskPoint};
use crate::io::RunConfig;
use crate::paley_wiener::{bandwidth_estimate, bernstein_ratio, pw_project, riesz_identity_report, riesz_weight_total};
use crate::quadrature::{apply_rule, integrate_region, integrate_spectral, spatial_weights, spectral_weights, Region};
use crate::transform::{
    apply_multiplier, calibrate_plancherel, inverse_at_points, l2_norm, laplacian_symbol, plancherel_norm,
    SpectralFunction, SpectralGrid, TransformPlan,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Fast,
    All,
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Level::Fast),
            "all" => Ok(Level::All),
            _ => Err(Error::Param(format!("suite must be fast or all, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Failed, and the failure is understood and recorded.
    KnownFail,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS".to_string(),
            Status::Fail => "FAIL".to_string(),
            Status::KnownFail => format!("FAIL (known: {})", known_failure(self.id).unwrap_or("")),
        };
        format!("[{:>2}] {:<28} {tag} ({:.1} s) {}", self.id, self.name, self.seconds, self.detail)
    }
}

/// Criteria that cannot be met as stated, with the reason.
pub fn known_failure(id: usize) -> Option<&'static str> {
    match id {
        12 => Some("a log-log fit of (1+ω)^-α over ω in 4..32 has slope 0.909α"),
        _ => None,
    }
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { ok, detail })
}

type Check = fn(&Ctx) -> Result<Outcome>;

const CHECKS: [(&str, Check); 13] = [
    ("plancherel and inversion", plancherel),
    ("laplacian symbol", laplacian),
    ("bernstein inequality", bernstein),
    ("riesz operator", riesz),
    ("bandwidth estimate", bandwidth),
    ("lattice certificates", lattices),
    ("frames and reconstruction", frames),
    ("quadrature exactness", quadrature),
    ("jackson bound", jackson),
    ("k-functional sandwich", k_functional),
    ("phi versus best approximation", phi_vs_e),
    ("rate recovery", rates),
    ("dyadic besov functional", dyadic_functional),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check in order, reporting each result as it completes.
pub fn run(level: Level, cfg: &RunConfig, mut report: impl FnMut(&CheckResult)) -> Vec<CheckResult> {
    let ctx = Ctx::new(cfg, level);
    let mut out = Vec::new();
    for (k, (name, check)) in CHECKS.iter().enumerate() {
        let id = k + 1;
        let t = Instant::now();
        let (ok, detail) = match check(&ctx) {
            Ok(o) => (o.ok, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let status = match (ok, known_failure(id)) {
            (true, _) => Status::Pass,
            (false, Some(_)) => Status::KnownFail,
            (false, None) => Status::Fail,
        };
        let r = CheckResult { id, name, status, detail, seconds: t.elapsed().as_secs_f64() };
        report(&r);
        out.push(r);
    }
    out
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    level: Level,
    plan: OnceCell<TransformPlan>,
    frame_grid: OnceCell<Arc<SpectralGrid>>,
    radial_grid: OnceCell<Arc<SpectralGrid>>,
    frames: RefCell<BTreeMap<(u64, bool), Rc<FrameSystem>>>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig, level: Level) -> Self {
        Self {
            cfg,
            level,
            plan: OnceCell::new(),
            frame_grid: OnceCell::new(),
            radial_grid: OnceCell::new(),
            frames: RefCell::new(BTreeMap::new()),
        }
    }

    fn pick<T>(&self, all: T, fast: T) -> T {
        if self.level == Level::All {
            all
        } else {
            fast
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_mul(1000).wrapping_add(stream))
    }

    fn plan(&self) -> Result<&TransformPlan> {
        if self.plan.get().is_none() {
            let p = TransformPlan::new(self.cfg.spatial_grid()?, self.cfg.spectral_grid()?);
            let _ = self.plan.set(p);
        }
        Ok(self.plan.get().unwrap())
    }

    fn frame_grid(&self) -> Result<&Arc<SpectralGrid>> {
        if self.frame_grid.get().is_none() {
            let _ = self.frame_grid.set(self.cfg.frame_grid()?);
        }
        Ok(self.frame_grid.get().unwrap())
    }

    /// Bands used with full angular frames.
    fn sweep(&self) -> Vec<f64> {
        let w = &self.cfg.omegas;
        self.pick(w.clone(), w[..w.len().min(2)].to_vec())
    }

    /// (base, extended) dyadic bands for the Besov functional.
    fn dyadic(&self) -> (Vec<f64>, Vec<f64>) {
        let d = &self.cfg.dyadic_omegas;
        match self.level {
            Level::All => {
                let mut ext = d.clone();
                ext.push(2.0 * d.iter().cloned().fold(0.0, f64::max));
                (d.clone(), ext)
            }
            Level::Fast => (d[..d.len().saturating_sub(1)].to_vec(), d.clone()),
        }
    }

    /// Unit-spaced grid long enough for every radial band.
    fn radial_grid(&self) -> Result<&Arc<SpectralGrid>> {
        if self.radial_grid.get().is_none() {
            let top = self.dyadic().1.iter().chain(&self.cfg.rate_omegas).cloned().fold(0.0, f64::max);
            let n = self.cfg.frame_n_lambda.max(top.ceil() as usize);
            let _ = self.radial_grid.set(crate::frames::frame_grid(n)?);
        }
        Ok(self.radial_grid.get().unwrap())
    }

    fn frame(&self, omega: f64, angular: Angular) -> Result<Rc<FrameSystem>> {
        let key = (omega.to_bits(), angular == Angular::Radial);
        if let Some(f) = self.frames.borrow().get(&key) {
            return Ok(f.clone());
        }
        let grid = match angular {
            Angular::Full => self.frame_grid()?,
            Angular::Radial => self.radial_grid()?,
        };
        let f = Rc::new(self.cfg.frame(grid, omega, angular)?);
        self.frames.borrow_mut().insert(key, f.clone());
        Ok(f)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn plancherel(ctx: &Ctx) -> Result<Outcome> {
    let plan = ctx.plan()?;
    let tol = ctx.cfg.tol;
    let (mut fam, mut rnd) = (0.0f64, 0.0f64);
    for f in calibration_family(&plan.spectral) {
        let g = plan.inverse(&f);
        let back = plan.forward(&g)?;
        fam =
            fam.max(plancherel_norm(&back.sub(&f)) / plancherel_norm(&f)).max(rel(plancherel_norm(&back), l2_norm(&g)));
    }
    let mut rng = ctx.rng(1);
    for _ in 0..ctx.pick(20, 5) {
        let f = random_localized(&plan.spectral, &mut rng);
        let g = plan.inverse(&f);
        let back = plan.forward(&g)?;
        rnd =
            rnd.max(plancherel_norm(&back.sub(&f)) / plancherel_norm(&f)).max(rel(plancherel_norm(&back), l2_norm(&g)));
    }
    let mut ok = fam <= tol && rnd <= 10.0 * tol;
    let mut detail = format!("family {fam:.2e} (tol {tol:.0e}), random {rnd:.2e} (tol {:.0e})", 10.0 * tol);
    if ctx.level == Level::All {
        let c = ctx.cfg;
        let cal = calibrate_plancherel(plan.spatial.clone(), c.lambda_max, c.n_lambda, c.n_b)?;
        let dev = rel(cal.c_p, c.c_p());
        ok &= cal.spread <= 1e-6 && dev <= 1e-6;
        detail += &format!(", calibrated c_P {:.10} (spread {:.1e}, deviation {dev:.1e})", cal.c_p, cal.spread);
    }
    outcome(ok, detail)
}

/// Δf at a point from geodesic circle means, M(h) = f + (h²/4)Δf + O(h⁴), Richardson-extrapolated.
pub fn circle_mean_laplacian(f: &SpectralFunction, center: Complex64, h: f64) -> Result<Complex64> {
    let n = 64;
    let c = DiskPoint::new(center)?;
    let mean = |h: f64| -> Result<Complex64> {
        let rho = (0.5 * h).tanh();
        let pts = (0..n)
            .map(|k| DiskPoint::new(mobius_z(center, Complex64::from_polar(rho, TAU * k as f64 / n as f64))))
            .collect::<Result<Vec<_>>>()?;
        Ok(inverse_at_points(f, &pts).iter().sum::<Complex64>() / n as f64)
    };
    let f0 = inverse_at_points(f, &[c])[0];
    let d = |h: f64| -> Result<Complex64> { Ok((mean(h)? - f0) * (4.0 / (h * h))) };
    Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

fn laplacian(ctx: &Ctx) -> Result<Outcome> {
    let plan = ctx.plan()?;
    let fam = calibration_family(&plan.spectral);
    let centers = [Complex64::new(0.1, 0.05), Complex64::new(-0.3, 0.2), Complex64::new(0.0, -0.45)];
    let mut worst = 0.0f64;
    for f0 in [&fam[1], &fam[3]] {
        let lap = apply_multiplier(&plan.forward(&plan.inverse(f0))?, laplacian_symbol);
        let (mut num, mut den) = (0.0, 0.0);
        for c in centers {
            let fd = circle_mean_laplacian(f0, c, 0.05)?;
            let sp = inverse_at_points(&lap, &[DiskPoint::new(c)?])[0];
            num += (fd - sp).norm_sqr();
            den += sp.norm_sqr();
        }
        worst = worst.max((num / den).sqrt());
    }
    // spike at one node as an approximate eigenfunction
    let g = &plan.spectral;
    let i = g.count_below(4.0) - 1;
    let f = spike(g, i, 2);
    let lam = g.lams[i];
    let (mut num, mut den) = (0.0, 0.0);
    for &(r, t) in &[(0.5, 0.3), (1.2, 2.0), (1.9, 4.4)] {
        let c = polar_to_point(r, t)?.z();
        let fd = circle_mean_laplacian(&f, c, 0.04)?;
        let v = inverse_at_points(&f, &[DiskPoint::new(c)?])[0] * -(lam * lam + 0.25);
        num += (fd - v).norm_sqr();
        den += v.norm_sqr();
    }
    let eig = (num / den).sqrt();
    outcome(
        worst <= 1e-3 && eig <= 1e-3,
        format!("symbol residual {worst:.2e}, eigenfunction residual {eig:.2e} (tol 1e-3)"),
    )
}

fn bernstein(ctx: &Ctx) -> Result<Outcome> {
    let g = &ctx.plan()?.spectral;
    let mut rng = ctx.rng(3);
    let mut worst = 0.0f64;
    let n = ctx.pick(100, 20);
    for omega in [2.0, 4.0, 8.0] {
        for _ in 0..n {
            let f = random_band_limited(g, omega, &mut rng);
            for s in [0.5, 1.0, 2.0, 5.0] {
                worst = worst.max(bernstein_ratio(&f, omega, s)?);
            }
        }
    }
    outcome(worst <= 1.0 + 1e-12, format!("max ratio {worst:.12} over {} functions", 3 * n))
}

fn riesz(_ctx: &Ctx) -> Result<Outcome> {
    let k = 100_000;
    let (mut wt, mut series, mut literal) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut ok = true;
    for sigma in [1.0, 2.5, 8.0] {
        let w = (riesz_weight_total(sigma, k) - sigma).abs() / sigma.max(1.0);
        wt = wt.max(w);
        let rep = riesz_identity_report(0.5 * sigma, sigma, k);
        ok &= rep.err_i_delta <= rep.tail_bound;
        series = series.max(rep.err_i_delta / rep.tail_bound);
        literal = literal.min(rep.err_delta);
    }
    ok &= wt <= 1e-10;
    outcome(
        ok,
        format!("weights {wt:.1e}, series error / tail bound {series:.3}; without the factor i the series misses -mu by at least {literal:.3}"),
    )
}

fn bandwidth(ctx: &Ctx) -> Result<Outcome> {
    let g = &ctx.plan()?.spectral;
    let mut spike_err = 0.0f64;
    for (row, mode) in [(10, 0), (47, 3), (90, -5)] {
        let est = bandwidth_estimate(&spike(g, row, mode), 40)?;
        spike_err = spike_err.max(rel(est.omega_hat, g.lams[row]));
    }
    let heat = &calibration_family(g)[0];
    let mut worst_gap = 0.0f64;
    let mut ok = spike_err <= 1e-12;
    for omega in [2.0, 4.0, 8.0] {
        let est = bandwidth_estimate(&pw_project(heat, omega)?, 40)?;
        // nominal grid spacing Λ_max/n_λ
        let spacing = g.lambda_max / g.n_lambda() as f64;
        let gap = (omega - est.omega_hat).abs() / spacing;
        worst_gap = worst_gap.max(gap);
        ok &= gap <= 1.0;
    }
    let mut rng = ctx.rng(5);
    let mut mono = true;
    for _ in 0..50 {
        let est = bandwidth_estimate(&random_spectrum(g, &mut rng), 40)?;
        mono &= est.ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    }
    outcome(
        ok && mono,
        format!("spike error {spike_err:.1e}, heat estimate within {worst_gap:.3} spacings, ratios monotone: {mono}"),
    )
}

fn lattices(ctx: &Ctx) -> Result<Outcome> {
    let mut omegas = ctx.sweep();
    omegas.extend(&ctx.cfg.rate_omegas);
    omegas.extend(ctx.dyadic().1);
    omegas.sort_by(f64::total_cmp);
    omegas.dedup();
    let mut ok = true;
    let mut parts = Vec::new();
    for w in omegas {
        let l = ctx.cfg.lattice(w)?;
        let c = &l.certificate;
        let good = l.certified();
        ok &= good;
        let sep = c.min_pairwise.map_or(f64::INFINITY, |m| m / l.r);
        parts.push(format!(
            "w={w}: n={} sep/r={sep:.3} cov/r={:.3}{}",
            l.len(),
            c.covering_radius / l.r,
            if good { "" } else { " FAILED" }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn frames(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng(7);
    let mut ok = true;
    let mut parts = Vec::new();
    for w in ctx.sweep() {
        let f = ctx.frame(w, Angular::Full)?;
        let cond = f.condition();
        let mut worst = 0.0f64;
        for _ in 0..ctx.pick(20, 5) {
            let g = f.space().random(&mut rng);
            let rec = f.dual_apply(&f.analysis.sample(&g))?;
            worst = worst.max(plancherel_norm(&rec.sub(&g)) / plancherel_norm(&g));
        }
        let good = cond <= TARGET_CONDITION && worst <= 1e-8 * cond;
        ok &= good;
        // half the density: r doubled
        let mut sparse = ctx.cfg.clone();
        let (r, _) = ctx.cfg.lattice_radius(w);
        sparse.lattice.r = Some(2.0 * r);
        sparse.lattice_file = None;
        let flagged = match sparse.frame(ctx.frame_grid()?, w, Angular::Full) {
            Err(Error::RankDeficient { .. }) => "rank deficient".to_string(),
            Ok(s) if s.condition() > 1e4 => format!("cond {:.1e}", s.condition()),
            Ok(s) => {
                ok = false;
                format!("NOT FLAGGED, cond {:.1e}", s.condition())
            }
            Err(e) => return Err(e),
        };
        parts.push(format!("w={w}: n={} cond {cond:.1} err {worst:.1e}, undersampled {flagged}", f.lattice.len()));
    }
    outcome(ok, parts.join("; "))
}

fn quadrature(ctx: &Ctx) -> Result<Outcome> {
    let w = ctx.cfg.omega;
    let f = ctx.frame(w, Angular::Full)?;
    let plan = TransformPlan::new(ctx.cfg.spatial_grid()?, ctx.frame_grid()?.clone());
    let mut rng = ctx.rng(8);
    let n = ctx.pick(10, 3);
    let big_r = plan.spatial.radius;
    let (mut spatial, mut spectral) = (0.0f64, 0.0f64);
    for u in
        [Region::Ball { center: [0.0, 0.0], radius: big_r }, Region::Ball { center: [0.2, 0.1], radius: 0.4 * big_r }]
    {
        let rule = spatial_weights(&u, &f, &plan.spatial)?;
        for _ in 0..n {
            let g = f.space().random(&mut rng);
            let exact = integrate_region(&plan.inverse(&g), &u)?;
            let q = apply_rule(&f.analysis.sample(&g), &rule)?;
            spatial = spatial.max((q - exact).norm() / exact.norm());
        }
    }
    let full = Region::Band { lambda: [0.0, w] };
    let rule = spectral_weights(&full, &f)?;
    for _ in 0..n {
        let g = f.space().random(&mut rng);
        let exact = integrate_spectral(&g, &full)?;
        let q = apply_rule(&f.analysis.sample(&g), &rule)?;
        spectral = spectral.max((q - exact).norm() / exact.norm());
    }
    let left = spectral_weights(&Region::Band { lambda: [0.0, 0.4 * w] }, &f)?;
    let right = spectral_weights(&Region::Band { lambda: [0.4 * w, w] }, &f)?;
    let additive = left
        .weights
        .iter()
        .zip(&right.weights)
        .zip(&rule.weights)
        .map(|((l, r), t)| (l + r - t).norm() / t.norm().max(1e-3))
        .fold(0.0, f64::max);
    outcome(
        spatial <= 1e-6 && spectral <= 1e-8 && additive <= 1e-14,
        format!(
            "w={w}: spatial {spatial:.1e} (tol 1e-6), spectral {spectral:.1e} (tol 1e-8), additivity {additive:.1e}"
        ),
    )
}

fn jackson(ctx: &Ctx) -> Result<Outcome> {
    let g = &ctx.plan()?.spectral;
    let mut rng = ctx.rng(9);
    let mut worst = 0.0f64;
    let n = ctx.pick(100, 20);
    for _ in 0..n {
        let f = random_spectrum(g, &mut rng);
        for r in [1.0, 2.0, 4.0] {
            for t in [1.0, 2.0, 4.0] {
                worst = worst.max(jackson_check(&f, t, r)?);
            }
        }
    }
    outcome(worst <= 1.0 + 1e-12, format!("max slack ratio {worst:.6} over {n} spectra"))
}

fn k_functional(ctx: &Ctx) -> Result<Outcome> {
    let g = &ctx.plan()?.spectral;
    let mut rng = ctx.rng(10);
    let ts = log_grid(1e-3, 1e3, 13);
    let n = ctx.pick(200, 40);
    let (mut lower, mut upper) = (0.0f64, 0.0f64);
    let mut ok = true;
    for _ in 0..n {
        let f = random_spectrum(g, &mut rng);
        for &t in &ts {
            for r in [1.0, 2.0] {
                let (k2, ku) = k2_functional(&f, t, r);
                ok &= k2 <= ku * (1.0 + 1e-15) && ku <= SQRT_2 * k2 + 1e-12;
                lower = lower.max(k2 / ku);
                upper = upper.max(ku / k2);
            }
        }
    }
    outcome(ok, format!("max k_upper/k2 {upper:.6} (bound {SQRT_2:.6}), max k2/k_upper {lower:.6}, {n} spectra"))
}

fn phi_vs_e(ctx: &Ctx) -> Result<Outcome> {
    let mut rng = ctx.rng(11);
    let mut worst = 0.0f64;
    let mut ok = true;
    let grid = ctx.frame_grid()?;
    let whole = FrameSpace::new(grid.clone(), grid.lambda_max, Angular::Full)?;
    for w in ctx.sweep() {
        let fr = ctx.frame(w, Angular::Full)?;
        let slack = 10.0 * fr.solver_tol * fr.condition();
        for _ in 0..ctx.pick(5, 2) {
            let f = whole.project(&random_spectrum(grid, &mut rng));
            let r = phi_error(&f, &fr)?;
            ok &= (r.phi - r.e).abs() <= slack * r.norm;
            worst = worst.max((r.phi - r.e).abs() / (slack * r.norm));
        }
    }
    let rg = ctx.radial_grid()?;
    let profiles = [rate_profile(rg, 1.25), heat_profile(rg)];
    for &w in &ctx.cfg.rate_omegas {
        let fr = ctx.frame(w, Angular::Radial)?;
        let slack = 10.0 * fr.solver_tol * fr.condition();
        for f in &profiles {
            let r = phi_error(f, &fr)?;
            ok &= (r.phi - r.e).abs() <= slack * r.norm;
            worst = worst.max((r.phi - r.e).abs() / (slack * r.norm));
        }
    }
    outcome(ok, format!("max |Phi - E| / (10 tol cond |f|) = {worst:.3}"))
}

fn rates(ctx: &Ctx) -> Result<Outcome> {
    let frames = ctx.cfg.rate_omegas.iter().map(|&w| ctx.frame(w, Angular::Radial)).collect::<Result<Vec<_>>>()?;
    let rg = ctx.radial_grid()?;
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.75, 1.25, 2.0] {
        let f = rate_profile(rg, alpha);
        let rep = rate_report(&f, &frames)?;
        let dev = rep.fit.alpha_hat / alpha - 1.0;
        ok &= dev.abs() <= 0.05;
        parts.push(format!("alpha {alpha}: fitted {:.4} ({:+.1}%)", rep.fit.alpha_hat, 100.0 * dev));
    }
    outcome(ok, parts.join(", "))
}

fn dyadic_functional(ctx: &Ctx) -> Result<Outcome> {
    let (base, ext) = ctx.dyadic();
    let frames = ext.iter().map(|&w| ctx.frame(w, Angular::Radial)).collect::<Result<Vec<_>>>()?;
    let f = heat_profile(ctx.radial_grid()?);
    let mut ok = true;
    let mut parts = Vec::new();
    for (alpha, q) in [(1.0, 2.0), (1.5, 2.0), (1.0, f64::INFINITY)] {
        let p = BesovParams::new(alpha, q, 2)?;
        let b = theorem52_functional(&f, &p, &frames[..base.len()], 64)?;
        let s2 = theorem52_functional(&f, &p, &frames[..base.len()], 128)?;
        let e = theorem52_functional(&f, &p, &frames, 64)?;
        let (ds, de) = (s2.c_hat / b.c_hat - 1.0, e.c_hat / b.c_hat - 1.0);
        ok &= b.c_hat.is_finite() && b.c_hat > 0.0 && ds.abs() <= 0.1 && de.abs() <= 0.1;
        parts.push(format!(
            "({alpha},{q}): C_hat {:.4}, s-grid {:+.2}%, bands {:+.2}%",
            b.c_hat,
            100.0 * ds,
            100.0 * de
        ));
    }
    outcome(ok, parts.join("; "))
}
