//! Command-line front end. Exit codes: 0 success, 1 failed invariant, 2 I/O or configuration
//! error.

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::approx::{heat_profile, phi_error, rate_profile, rate_report, theorem52_functional, BESOV_S_POINTS};
use crate::families::calibration_family;
use crate::frames::{calibrate_c, Angular, FrameSpace, FrameSystem, TARGET_CONDITION};
use crate::io::{self, CsvKind, FrameReport, FunctionalReport, RunConfig};
use crate::lattice::build_lattice;
use crate::linalg::{conjugate_gradient, lanczos_extremes};
use crate::paley_wiener::pw_project;
use crate::quadrature::{apply_rule, integrate_region, integrate_spectral, spatial_weights, spectral_weights, Region};
use crate::suite::{self, Level, Status};
use crate::transform::{calibrate_plancherel, plancherel_norm, SpectralFunction, SpectralGrid, TransformPlan};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "hdisk", version, about = "Fourier analysis, sampling and approximation on the hyperbolic disk")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; built-in reference values when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Band limit, overriding the config.
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Input data file, overriding the config.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write one spectral CSV per dual frame function (`frame`).
    #[arg(long, global = true)]
    pub dump_duals: bool,
    #[arg(long, global = true, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Forward transform of a spatial CSV or inverse transform of a spectral CSV.
    Transform,
    /// Band-limit a spectral CSV to λ < ω.
    Project,
    /// Build and certify the sampling lattice for band ω.
    Lattice,
    /// Frame bounds for band ω.
    Frame,
    /// Reconstruct from lattice samples, or measure reconstruction of a spectral CSV.
    Reconstruct,
    /// Quadrature weights for the configured region.
    Quadrature,
    /// Best approximation and reconstruction error across bands, with a rate fit.
    Rates,
    /// Dyadic Besov functional of a radial profile against its Besov norm.
    Theorem52,
    /// Run the invariant suite.
    Check,
    /// Calibrate the Plancherel constant and the lattice density constant.
    Calibrate,
    /// Time the main kernels.
    Bench,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteArg {
    Fast,
    All,
}

/// Outcome of a command that ran to completion.
pub enum Verdict {
    Ok,
    Violated(String),
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BoundaryMass { .. }
        | Error::Calibration { .. }
        | Error::NotBandLimited { .. }
        | Error::RankDeficient { .. }
        | Error::Solver { .. } => 1,
        _ => 2,
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I: IntoIterator<Item = T>, T: Into<OsString> + Clone>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(Verdict::Ok) => 0,
        Ok(Verdict::Violated(msg)) => {
            eprintln!("invariant failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(w) = cli.omega {
        c.omega = w;
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(p) = &cli.input {
        c.input = Some(p.clone());
    }
    c.validate()?;
    Ok(c)
}

fn input(cfg: &RunConfig) -> Result<(PathBuf, Vec<u8>, CsvKind)> {
    let path = cfg.input.clone().ok_or_else(|| Error::Param("no input file (set \"input\" or pass --input)".into()))?;
    let bytes = io::read_bytes(&path)?;
    let kind = io::detect_csv(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((path, bytes, kind))
}

fn in_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn run(cli: &Cli) -> Result<Verdict> {
    let cfg = config(cli)?;
    let out = &cli.out;
    match cli.command {
        Command::Transform => transform(&cfg, out),
        Command::Project => project(&cfg, out),
        Command::Lattice => lattice(&cfg, out),
        Command::Frame => frame(&cfg, out, cli.dump_duals),
        Command::Reconstruct => reconstruct(&cfg, out),
        Command::Quadrature => quadrature(&cfg, out),
        Command::Rates => rates(&cfg, out),
        Command::Theorem52 => dyadic(&cfg, out),
        Command::Check => check(&cfg, out, cli.suite),
        Command::Calibrate => calibrate(&cfg, out),
        Command::Bench => bench(&cfg, out),
    }
}

fn transform(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let (path, bytes, kind) = input(cfg)?;
    let plan = TransformPlan::new(cfg.spatial_grid()?, cfg.spectral_grid()?);
    match kind {
        CsvKind::Spatial => {
            let f = in_path(&path, io::parse_spatial(&bytes, &plan.spatial))?;
            let g = plan.forward(&f)?;
            let dest = out.join("spectral.csv");
            io::write_text(&dest, &io::spectral_csv(&g))?;
            println!("forward transform: {} nodes -> {}", f.values.len(), dest.display());
        }
        CsvKind::Spectral => {
            let f = in_path(&path, io::parse_spectral(&bytes, &plan.spectral))?;
            let g = plan.inverse(&f);
            let dest = out.join("spatial.csv");
            io::write_text(&dest, &io::spatial_csv(&g))?;
            println!("inverse transform: {} nodes -> {}", g.values.len(), dest.display());
        }
        _ => return Err(Error::Parse(format!("{}: transform needs a spatial or spectral CSV", path.display()))),
    }
    Ok(Verdict::Ok)
}

fn project(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let (path, bytes, _) = input(cfg)?;
    let f = in_path(&path, io::parse_spectral(&bytes, &cfg.spectral_grid()?))?;
    let p = pw_project(&f, cfg.omega)?;
    let dest = out.join("projected.csv");
    io::write_text(&dest, &io::spectral_csv(&p))?;
    let n = plancherel_norm(&f);
    let tail = plancherel_norm(&f.sub(&p));
    println!(
        "projected to omega = {}: relative tail {:.3e} -> {}",
        cfg.omega,
        if n > 0.0 { tail / n } else { 0.0 },
        dest.display()
    );
    Ok(Verdict::Ok)
}

fn lattice(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let l = cfg.lattice(cfg.omega)?;
    io::write_text(&out.join("lattice.csv"), &io::lattice_csv(&l.points))?;
    io::write_json(&out.join("certificate.json"), &l.certificate)?;
    let c = &l.certificate;
    println!(
        "lattice: {} points, r = {}, min separation {:?}, covering radius {}, multiplicity {}",
        l.len(),
        l.r,
        c.min_pairwise,
        c.covering_radius,
        c.multiplicity
    );
    if l.certified() {
        Ok(Verdict::Ok)
    } else {
        Ok(Verdict::Violated(format!("lattice certificate fails at r = {}: {c:?}", l.r)))
    }
}

fn frame_report(f: &FrameSystem) -> FrameReport {
    FrameReport {
        omega: f.omega,
        r: f.lattice.r,
        c: f.c,
        n_points: f.lattice.len(),
        a: f.a,
        b: f.b,
        cond: f.condition(),
        solver_tol: f.solver_tol,
    }
}

fn frame(cfg: &RunConfig, out: &Path, dump: bool) -> Result<Verdict> {
    let f = cfg.frame(&cfg.frame_grid()?, cfg.omega, cfg.angular)?;
    let rep = frame_report(&f);
    io::write_json(&out.join("frame.json"), &rep)?;
    println!("frame: {} points, A = {:.6e}, B = {:.6e}, B/A = {:.3}", rep.n_points, rep.a, rep.b, rep.cond);
    if dump {
        let duals = f.dual_frame_functions()?;
        for (j, d) in duals.iter().enumerate() {
            io::write_text(&out.join("duals").join(format!("dual_{j:06}.csv")), &io::spectral_csv(d))?;
        }
        println!("wrote {} dual frame functions", duals.len());
    }
    Ok(Verdict::Ok)
}

#[derive(Serialize)]
struct ReconstructReport {
    omega: f64,
    n_points: usize,
    cond: f64,
    /// Present when the input was a spectrum.
    phi: Option<f64>,
    best_approximation: Option<f64>,
    norm: Option<f64>,
}

fn reconstruct(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let grid = cfg.frame_grid()?;
    let fr = cfg.frame(&grid, cfg.omega, cfg.angular)?;
    let source = match &cfg.input {
        None => None,
        Some(_) => Some(input(cfg)?),
    };
    let mut rep = ReconstructReport {
        omega: fr.omega,
        n_points: fr.lattice.len(),
        cond: fr.condition(),
        phi: None,
        best_approximation: None,
        norm: None,
    };
    let mut verdict = Verdict::Ok;
    let rec = match source {
        Some((path, bytes, CsvKind::Values)) => {
            let samples = in_path(&path, io::parse_values(&bytes))?;
            fr.dual_apply(&samples)?
        }
        other => {
            let f = match other {
                Some((path, bytes, CsvKind::Spectral)) => in_path(&path, io::parse_spectral(&bytes, &grid))?,
                Some((path, ..)) => {
                    return Err(Error::Parse(format!(
                        "{}: reconstruct needs samples (id,re,im) or a spectral CSV",
                        path.display()
                    )))
                }
                None => fr.space().random(&mut ChaCha8Rng::seed_from_u64(cfg.seed)),
            };
            let r = phi_error(&f, &fr)?;
            let slack = 10.0 * fr.solver_tol * fr.condition() * r.norm;
            if (r.phi - r.e).abs() > slack {
                verdict = Verdict::Violated(format!("|Phi - E| = {:.3e} exceeds {slack:.3e}", (r.phi - r.e).abs()));
            }
            println!(
                "reconstruction error Phi = {:.6e}, best approximation E = {:.6e}, norm {:.6e}",
                r.phi, r.e, r.norm
            );
            rep.phi = Some(r.phi);
            rep.best_approximation = Some(r.e);
            rep.norm = Some(r.norm);
            fr.dual_apply(&fr.analysis.sample(&pw_project(&f, fr.omega)?))?
        }
    };
    io::write_text(&out.join("reconstruction.csv"), &io::spectral_csv(&rec))?;
    io::write_json(&out.join("reconstruct.json"), &rep)?;
    Ok(verdict)
}

#[derive(Serialize)]
struct QuadratureReport {
    kind: &'static str,
    n_points: usize,
    /// Relative error of the rule on a random band-limited function.
    check_error: f64,
    tolerance: f64,
}

fn quadrature(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let region =
        cfg.region.clone().ok_or_else(|| Error::Param("quadrature needs a \"region\" in the config".into()))?;
    let grid = cfg.frame_grid()?;
    let fr = cfg.frame(&grid, cfg.omega, cfg.angular)?;
    let g = fr.space().random(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let samples = fr.analysis.sample(&g);
    let (rule, exact, kind, tol) = match region {
        Region::Ball { .. } => {
            let plan = TransformPlan::new(cfg.spatial_grid()?, grid.clone());
            let rule = spatial_weights(&region, &fr, &plan.spatial)?;
            let exact = integrate_region(&plan.inverse(&g), &region)?;
            (rule, exact, "spatial", 1e-6)
        }
        Region::Band { .. } => (spectral_weights(&region, &fr)?, integrate_spectral(&g, &region)?, "spectral", 1e-8),
    };
    let q = apply_rule(&samples, &rule)?;
    let err = if exact.norm() > 0.0 { (q - exact).norm() / exact.norm() } else { q.norm() };
    io::write_text(&out.join("weights.csv"), &io::values_csv(&rule.weights))?;
    io::write_json(
        &out.join("quadrature.json"),
        &QuadratureReport { kind, n_points: rule.weights.len(), check_error: err, tolerance: tol },
    )?;
    println!("{kind} weights for {} points; exactness check {err:.3e}", rule.weights.len());
    if err <= tol {
        Ok(Verdict::Ok)
    } else {
        Ok(Verdict::Violated(format!("quadrature exactness {err:.3e} exceeds {tol:e}")))
    }
}

fn radial_grid(cfg: &RunConfig, omegas: &[f64]) -> Result<Arc<SpectralGrid>> {
    let top = omegas.iter().cloned().fold(0.0, f64::max);
    crate::frames::frame_grid(cfg.frame_n_lambda.max(top.ceil() as usize))
}

/// Input spectrum for the radial commands, or the default profile.
fn radial_input(cfg: &RunConfig, grid: &Arc<SpectralGrid>, default: SpectralFunction) -> Result<SpectralFunction> {
    let Some(_) = &cfg.input else { return Ok(default) };
    let (path, bytes, _) = input(cfg)?;
    let f = in_path(&path, io::parse_spectral(&bytes, grid))?;
    let space = FrameSpace::new(grid.clone(), grid.lambda_max, Angular::Radial)?;
    let off = plancherel_norm(&f.sub(&space.project(&f)));
    if off > 1e-12 * plancherel_norm(&f) {
        return Err(Error::Param(format!("{}: profile must be radial (constant along each λ row)", path.display())));
    }
    Ok(f)
}

fn radial_frames(cfg: &RunConfig, grid: &Arc<SpectralGrid>, omegas: &[f64]) -> Result<Vec<FrameSystem>> {
    omegas.iter().map(|&w| cfg.frame(grid, w, Angular::Radial)).collect()
}

#[derive(Serialize)]
struct RateSummary {
    alpha_hat: f64,
    residual: f64,
    /// Decay exponent of the built-in profile; absent for file input.
    alpha: Option<f64>,
}

fn rates(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let grid = radial_grid(cfg, &cfg.rate_omegas)?;
    let f = radial_input(cfg, &grid, rate_profile(&grid, cfg.rate_alpha))?;
    let frames = radial_frames(cfg, &grid, &cfg.rate_omegas)?;
    let rep = rate_report(&f, &frames)?;
    io::write_text(&out.join("rates.csv"), &io::rates_csv(&rep.omegas, &rep.e, &rep.phi))?;
    let alpha = cfg.input.is_none().then_some(cfg.rate_alpha);
    io::write_json(
        &out.join("rate_fit.json"),
        &RateSummary { alpha_hat: rep.fit.alpha_hat, residual: rep.fit.residual, alpha },
    )?;
    println!("fitted alpha {:.6} (residual {:.3e})", rep.fit.alpha_hat, rep.fit.residual);
    let norm = plancherel_norm(&f);
    for (fr, (p, e)) in frames.iter().zip(rep.phi.iter().zip(&rep.e)) {
        let slack = 10.0 * fr.solver_tol * fr.condition() * norm;
        if (p - e).abs() > slack {
            return Ok(Verdict::Violated(format!(
                "omega {}: |Phi - E| = {:.3e} exceeds {slack:.3e}",
                fr.omega,
                (p - e).abs()
            )));
        }
    }
    Ok(Verdict::Ok)
}

fn dyadic(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let p = cfg.besov.params()?;
    let grid = radial_grid(cfg, &cfg.dyadic_omegas)?;
    let f = radial_input(cfg, &grid, heat_profile(&grid))?;
    let frames = radial_frames(cfg, &grid, &cfg.dyadic_omegas)?;
    let rep = theorem52_functional(&f, &p, &frames, BESOV_S_POINTS)?;
    let fr = FunctionalReport { alpha: p.alpha, q: p.q, r: p.r, lhs: rep.lhs, rhs: rep.rhs, c_hat: rep.c_hat };
    io::write_json(&out.join("functional.json"), &fr)?;
    println!("lhs {:.6e}, Besov norm {:.6e}, C_hat {:.6}", rep.lhs, rep.rhs, rep.c_hat);
    Ok(Verdict::Ok)
}

fn check(cfg: &RunConfig, out: &Path, level: SuiteArg) -> Result<Verdict> {
    let level = match level {
        SuiteArg::Fast => Level::Fast,
        SuiteArg::All => Level::All,
    };
    let results = suite::run(level, cfg, |r| println!("{}", r.line()));
    let mut csv = String::from("id,name,status,seconds,detail\n");
    for r in &results {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::KnownFail => "known-fail",
        };
        csv += &format!("{},{},{status},{:.3},\"{}\"\n", r.id, r.name, r.seconds, r.detail.replace('"', "'"));
    }
    io::write_text(&out.join("check.csv"), &csv)?;
    let failed: Vec<String> = results.iter().filter(|r| r.status == Status::Fail).map(|r| r.name.to_string()).collect();
    if failed.is_empty() {
        Ok(Verdict::Ok)
    } else {
        Ok(Verdict::Violated(failed.join(", ")))
    }
}

#[derive(Serialize)]
struct CalibrationReport {
    #[serde(rename = "c_P")]
    c_p: f64,
    c_p_spread: f64,
    c: f64,
    /// (c, worst B/A over the sweep); null marks rank deficiency.
    history: Vec<(f64, Option<f64>)>,
}

fn calibrate(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let cal = calibrate_plancherel(cfg.spatial_grid()?, cfg.lambda_max, cfg.n_lambda, cfg.n_b)?;
    println!("c_P = {} (spread {:.2e})", cal.c_p, cal.spread);
    let cc = calibrate_c(&cfg.frame_grid()?, &cfg.omegas, 2.0, 8.0, 8, TARGET_CONDITION, cfg.seed)?;
    println!("c = {}", cc.c);
    let history = cc.history.iter().map(|&(c, k)| (c, k.is_finite().then_some(k))).collect();
    io::write_json(
        &out.join("calibration.json"),
        &CalibrationReport { c_p: cal.c_p, c_p_spread: cal.spread, c: cc.c, history },
    )?;
    Ok(Verdict::Ok)
}

fn bench(cfg: &RunConfig, out: &Path) -> Result<Verdict> {
    let mut rows: Vec<(String, usize, usize, usize, f64)> = Vec::new();
    let mut time = |name: &str, rows_: usize, cols: usize, applies: usize, t: Instant| {
        rows.push((name.to_string(), rows_, cols, applies, t.elapsed().as_secs_f64()))
    };

    let t = Instant::now();
    let plan = TransformPlan::new(cfg.spatial_grid()?, cfg.spectral_grid()?);
    let (ns, nl) = (plan.spatial.len(), plan.spectral.len());
    time("transform_plan", ns, nl, 0, t);
    let f = &calibration_family(&plan.spectral)[1];
    let t = Instant::now();
    let g = plan.inverse(f);
    time("inverse", ns, nl, 1, t);
    let t = Instant::now();
    plan.forward(&g)?;
    time("forward", nl, ns, 1, t);

    let t = Instant::now();
    let (r, _) = cfg.lattice_radius(cfg.omega);
    let l = build_lattice(cfg.lattice.big_r, r, cfg.seed)?;
    time("lattice", l.len(), 0, 0, t);
    let t = Instant::now();
    let fr = cfg.frame(&cfg.frame_grid()?, cfg.omega, cfg.angular)?;
    time("frame_total", fr.lattice.len(), fr.analysis.dim(), 0, t);
    let dim = fr.analysis.dim();
    let t = Instant::now();
    let _ = fr.analysis.gram();
    time("gram_assembly", dim, dim, 0, t);
    let t = Instant::now();
    let ev = lanczos_extremes(|x| fr.gram.apply(x), dim, crate::frames::BOUNDS_TOL);
    time("frame_bounds", dim, dim, ev.iterations, t);
    let u = fr.space().coords(&fr.space().random(&mut ChaCha8Rng::seed_from_u64(cfg.seed)));
    let rhs = fr.analysis.apply_adjoint(&fr.analysis.apply(&u));
    let t = Instant::now();
    let cg = conjugate_gradient(|x| fr.gram.apply(x), &rhs, fr.solver_tol, fr.max_iter)?;
    time("cg_solve", dim, dim, cg.iterations, t);
    let t = Instant::now();
    let _ = fr.gram.apply(&u);
    time("gram_apply", dim, dim, 1, t);

    let mut csv = String::from("kernel,rows,cols,applies,seconds\n");
    for (k, a, b, n, s) in &rows {
        csv += &format!("{k},{a},{b},{n},{s:.6}\n");
        println!("{k:<16} {a:>8} x {b:<8} applies {n:<5} {s:.4} s");
    }
    io::write_text(&out.join("bench.csv"), &csv)?;
    Ok(Verdict::Ok)
}
