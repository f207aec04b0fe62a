//! Run configuration (JSON) and the CSV/JSON data formats.
//!
//! Parsers take raw bytes so they can be driven directly by fuzzers; the path-based readers
//! wrap them and name the file in every error.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::approx::BesovParams;
use crate::frames::{Angular, FrameSpace, FrameSystem, DEFAULT_C, DEFAULT_SOLVER_TOL, LATTICE_RADIUS};
use crate::geometry::DiskPoint;
use crate::lattice::{build_lattice, nyquist_radius, Lattice};
use crate::quadrature::Region;
use crate::transform::{
    build_spatial_grid, build_spectral_grid, SpatialFunction, SpatialGrid, SpectralFunction, SpectralGrid, C_P,
};
use crate::{Error, Result};

pub const SPATIAL_HEADER: [&str; 4] = ["x", "y", "re", "im"];
pub const SPECTRAL_HEADER: [&str; 6] = ["lambda_index", "b_index", "lambda", "theta_b", "re", "im"];
pub const VALUES_HEADER: [&str; 3] = ["id", "re", "im"];
pub const LATTICE_HEADER: [&str; 3] = ["id", "x", "y"];

/// Coordinates in data files must match the configured grid to this tolerance.
const NODE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    /// Density constant in r = c·(ω² + ¼)^{−1/2}; ignored when `r` is set.
    pub c: Option<f64>,
    pub r: Option<f64>,
    /// Radius of the covered ball.
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { c: None, r: None, big_r: LATTICE_RADIUS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    /// Defaults to 10·dim.
    pub max_iter: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: DEFAULT_SOLVER_TOL, max_iter: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BesovConfig {
    pub alpha: f64,
    #[serde(deserialize_with = "de_q", serialize_with = "ser_q")]
    pub q: f64,
    pub r: u32,
}

impl Default for BesovConfig {
    fn default() -> Self {
        Self { alpha: 1.0, q: 2.0, r: 2 }
    }
}

impl BesovConfig {
    pub fn params(&self) -> Result<BesovParams> {
        BesovParams::new(self.alpha, self.q, self.r)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QValue {
    Num(f64),
    Text(String),
}

fn de_q<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    match QValue::deserialize(d)? {
        QValue::Num(q) => Ok(q),
        QValue::Text(s) if s == "inf" || s == "infinity" => Ok(f64::INFINITY),
        QValue::Text(s) => Err(serde::de::Error::custom(format!("q must be a number or \"inf\", got {s:?}"))),
    }
}

fn ser_q<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if q.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(rename = "Lambda_max")]
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub n_b: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub n_r: usize,
    pub n_theta: usize,
    /// Plancherel constant; the calibrated value is used when absent.
    #[serde(rename = "c_P")]
    pub c_p: Option<f64>,
    /// Round-trip and Plancherel tolerance for transform checks.
    pub tol: f64,
    pub omega: f64,
    /// Sweep for frames and lattices.
    pub omegas: Vec<f64>,
    /// Bands for rate fits.
    pub rate_omegas: Vec<f64>,
    /// Dyadic bands for the Besov functional.
    pub dyadic_omegas: Vec<f64>,
    /// Number of unit-spaced λ nodes of the frame grid.
    pub frame_n_lambda: usize,
    pub angular: Angular,
    pub lattice: LatticeConfig,
    pub solver: SolverConfig,
    pub seed: u64,
    pub region: Option<Region>,
    pub besov: BesovConfig,
    /// Decay exponent α of the prescribed-rate profile used by `rates`.
    pub rate_alpha: f64,
    pub input: Option<PathBuf>,
    pub lattice_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            lambda_max: 16.0,
            n_lambda: 128,
            n_b: 128,
            big_r: 5.0,
            n_r: 160,
            n_theta: 128,
            c_p: None,
            tol: 1e-6,
            omega: 4.0,
            omegas: vec![2.0, 4.0, 8.0],
            rate_omegas: vec![4.0, 8.0, 16.0, 32.0],
            dyadic_omegas: (1..=6).map(|m| 2f64.powi(m)).collect(),
            frame_n_lambda: 64,
            angular: Angular::Full,
            lattice: LatticeConfig::default(),
            solver: SolverConfig::default(),
            seed: 0,
            region: None,
            besov: BesovConfig::default(),
            rate_alpha: 1.25,
            input: None,
            lattice_file: None,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Param(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("config: {e}")))?;
        if !v.is_object() {
            return Err(Error::Parse("config: expected a JSON object".into()));
        }
        let c: RunConfig = serde_json::from_value(v).map_err(|e| Error::Parse(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file; relative data paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_bytes(path)?;
        let mut c = Self::from_json(&bytes).map_err(|e| at_path(path, e))?;
        let dir = path.parent().unwrap_or(Path::new(""));
        for p in [&mut c.input, &mut c.lattice_file].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        positive("Lambda_max", self.lambda_max)?;
        positive("R", self.big_r)?;
        positive("tol", self.tol)?;
        positive("omega", self.omega)?;
        positive("solver.tol", self.solver.tol)?;
        positive("lattice.R", self.lattice.big_r)?;
        positive("rate_alpha", self.rate_alpha)?;
        if let Some(c) = self.c_p {
            positive("c_P", c)?;
        }
        if let Some(c) = self.lattice.c {
            positive("lattice.c", c)?;
        }
        if let Some(r) = self.lattice.r {
            positive("lattice.r", r)?;
        }
        for (name, list) in
            [("omegas", &self.omegas), ("rate_omegas", &self.rate_omegas), ("dyadic_omegas", &self.dyadic_omegas)]
        {
            for &w in list {
                positive(name, w)?;
            }
        }
        if self.frame_n_lambda < 16 {
            return Err(Error::Param(format!("frame_n_lambda must be at least 16, got {}", self.frame_n_lambda)));
        }
        if self.solver.max_iter == Some(0) {
            return Err(Error::Param("solver.max_iter must be positive".into()));
        }
        self.besov.params()?;
        build_spatial_grid(self.big_r, self.n_r, self.n_theta)?;
        build_spectral_grid(self.lambda_max, self.n_lambda, self.n_b, self.c_p())?;
        Ok(())
    }

    pub fn c_p(&self) -> f64 {
        self.c_p.unwrap_or(C_P)
    }

    pub fn spatial_grid(&self) -> Result<Arc<SpatialGrid>> {
        Ok(Arc::new(build_spatial_grid(self.big_r, self.n_r, self.n_theta)?))
    }

    pub fn spectral_grid(&self) -> Result<Arc<SpectralGrid>> {
        Ok(Arc::new(build_spectral_grid(self.lambda_max, self.n_lambda, self.n_b, self.c_p())?))
    }

    pub fn frame_grid(&self) -> Result<Arc<SpectralGrid>> {
        crate::frames::frame_grid(self.frame_n_lambda)
    }

    /// Lattice radius at band ω and the density constant it came from (None when r is fixed).
    pub fn lattice_radius(&self, omega: f64) -> (f64, Option<f64>) {
        match self.lattice.r {
            Some(r) => (r, None),
            None => {
                let c = self.lattice.c.unwrap_or(DEFAULT_C);
                (nyquist_radius(omega, c), Some(c))
            }
        }
    }
}

impl RunConfig {
    /// Lattice at band ω from `lattice_file` or the greedy construction.
    pub fn lattice(&self, omega: f64) -> Result<Lattice> {
        let (r, _) = self.lattice_radius(omega);
        match &self.lattice_file {
            Some(path) => Lattice::from_points(read_lattice(path)?, r, self.lattice.big_r, self.seed),
            None => build_lattice(self.lattice.big_r, r, self.seed),
        }
    }

    /// Frame at band ω with the configured lattice and solver settings.
    pub fn frame(&self, grid: &Arc<SpectralGrid>, omega: f64, angular: Angular) -> Result<FrameSystem> {
        let space = FrameSpace::new(grid.clone(), omega, angular)?;
        let mut f = FrameSystem::new(self.lattice(omega)?, space, self.solver.tol)?;
        f.c = self.lattice_radius(omega).1.filter(|_| self.lattice_file.is_none());
        if let Some(m) = self.solver.max_iter {
            f.max_iter = m;
        }
        Ok(f)
    }
}

fn at_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Param(m) => Error::Param(format!("{}: {m}", path.display())),
        other => other,
    }
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.display().to_string(), message: e.to_string() })?;
    }
    fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}

/// Shortest round-trip representation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsvKind {
    Spatial,
    Spectral,
    Values,
    Lattice,
}

pub fn detect_csv(bytes: &[u8]) -> Result<CsvKind> {
    let line = bytes.split(|&b| b == b'\n').next().unwrap_or(&[]);
    let line = std::str::from_utf8(line).map_err(|_| Error::Parse("header is not UTF-8".into()))?;
    let cols: Vec<&str> = line.trim().split(',').map(str::trim).collect();
    let is = |h: &[&str]| cols == h;
    if is(&SPATIAL_HEADER) {
        Ok(CsvKind::Spatial)
    } else if is(&SPECTRAL_HEADER) {
        Ok(CsvKind::Spectral)
    } else if is(&VALUES_HEADER) {
        Ok(CsvKind::Values)
    } else if is(&LATTICE_HEADER) {
        Ok(CsvKind::Lattice)
    } else {
        Err(Error::Parse(format!("unrecognized CSV header {line:?}")))
    }
}

/// Rows of numbers under an exact header.
fn parse_table(bytes: &[u8], header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let h = rd.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if h.iter().collect::<Vec<_>>() != header {
        return Err(Error::Parse(format!(
            "expected header {}, got {}",
            header.join(","),
            h.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (n, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != header.len() {
            return Err(Error::Parse(format!("row {}: expected {} fields, got {}", n + 1, header.len(), rec.len())));
        }
        let row = rec
            .iter()
            .map(|s| match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse(format!("row {}: invalid number {s:?}", n + 1))),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn index(v: f64, row: usize, name: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::Parse(format!("row {}: {name} must be a nonnegative integer, got {v}", row + 1)))
    }
}

fn check_count(rows: usize, want: usize) -> Result<()> {
    if rows != want {
        return Err(Error::Parse(format!("expected {want} data rows, got {rows}")));
    }
    Ok(())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= NODE_TOL * b.abs().max(1.0)
}

pub fn parse_spatial(bytes: &[u8], grid: &Arc<SpatialGrid>) -> Result<SpatialFunction> {
    let rows = parse_table(bytes, &SPATIAL_HEADER)?;
    check_count(rows.len(), grid.len())?;
    let mut values = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        let p = grid.point(j);
        if !close(r[0], p.x()) || !close(r[1], p.y()) {
            return Err(Error::Parse(format!(
                "row {}: point ({}, {}) is not grid node ({}, {})",
                j + 1,
                r[0],
                r[1],
                p.x(),
                p.y()
            )));
        }
        values.push(Complex64::new(r[2], r[3]));
    }
    SpatialFunction::new(grid.clone(), values)
}

pub fn parse_spectral(bytes: &[u8], grid: &Arc<SpectralGrid>) -> Result<SpectralFunction> {
    let rows = parse_table(bytes, &SPECTRAL_HEADER)?;
    check_count(rows.len(), grid.len())?;
    let nb = grid.n_b;
    let mut values = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        let (i, k) = (index(r[0], j, "lambda_index")?, index(r[1], j, "b_index")?);
        if (i, k) != (j / nb, j % nb) {
            return Err(Error::Parse(format!(
                "row {}: expected indices ({}, {}), got ({i}, {k})",
                j + 1,
                j / nb,
                j % nb
            )));
        }
        if !close(r[2], grid.lams[i]) || !close(r[3], grid.theta_b(k)) {
            return Err(Error::Parse(format!(
                "row {}: node ({}, {}) does not match the configured grid",
                j + 1,
                r[2],
                r[3]
            )));
        }
        values.push(Complex64::new(r[4], r[5]));
    }
    SpectralFunction::new(grid.clone(), values)
}

/// `id,re,im` rows with ids 0, 1, 2, …
pub fn parse_values(bytes: &[u8]) -> Result<Vec<Complex64>> {
    let rows = parse_table(bytes, &VALUES_HEADER)?;
    let mut out = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        if index(r[0], j, "id")? != j {
            return Err(Error::Parse(format!("row {}: expected id {j}, got {}", j + 1, r[0])));
        }
        out.push(Complex64::new(r[1], r[2]));
    }
    Ok(out)
}

pub fn parse_lattice(bytes: &[u8]) -> Result<Vec<DiskPoint>> {
    let rows = parse_table(bytes, &LATTICE_HEADER)?;
    let mut out = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        if index(r[0], j, "id")? != j {
            return Err(Error::Parse(format!("row {}: expected id {j}, got {}", j + 1, r[0])));
        }
        out.push(DiskPoint::from_xy(r[1], r[2]).map_err(|e| Error::Parse(format!("row {}: {e}", j + 1)))?);
    }
    if out.is_empty() {
        return Err(Error::Parse("no points".into()));
    }
    Ok(out)
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| at_path(path, e))
}

pub fn read_spatial(path: &Path, grid: &Arc<SpatialGrid>) -> Result<SpatialFunction> {
    with_path(path, parse_spatial(&read_bytes(path)?, grid))
}

pub fn read_spectral(path: &Path, grid: &Arc<SpectralGrid>) -> Result<SpectralFunction> {
    with_path(path, parse_spectral(&read_bytes(path)?, grid))
}

pub fn read_values(path: &Path) -> Result<Vec<Complex64>> {
    with_path(path, parse_values(&read_bytes(path)?))
}

pub fn read_lattice(path: &Path) -> Result<Vec<DiskPoint>> {
    with_path(path, parse_lattice(&read_bytes(path)?))
}

pub fn spatial_csv(f: &SpatialFunction) -> String {
    let mut s = SPATIAL_HEADER.join(",") + "\n";
    for (j, v) in f.values.iter().enumerate() {
        let p = f.grid.point(j);
        s += &format!("{},{},{},{}\n", fmt_f64(p.x()), fmt_f64(p.y()), fmt_f64(v.re), fmt_f64(v.im));
    }
    s
}

pub fn spectral_csv(f: &SpectralFunction) -> String {
    let g = &f.grid;
    let mut s = SPECTRAL_HEADER.join(",") + "\n";
    for (j, v) in f.values.iter().enumerate() {
        let (i, k) = (j / g.n_b, j % g.n_b);
        s += &format!("{i},{k},{},{},{},{}\n", fmt_f64(g.lams[i]), fmt_f64(g.theta_b(k)), fmt_f64(v.re), fmt_f64(v.im));
    }
    s
}

pub fn values_csv(values: &[Complex64]) -> String {
    let mut s = VALUES_HEADER.join(",") + "\n";
    for (j, v) in values.iter().enumerate() {
        s += &format!("{j},{},{}\n", fmt_f64(v.re), fmt_f64(v.im));
    }
    s
}

pub fn lattice_csv(points: &[DiskPoint]) -> String {
    let mut s = LATTICE_HEADER.join(",") + "\n";
    for (j, p) in points.iter().enumerate() {
        s += &format!("{j},{},{}\n", fmt_f64(p.x()), fmt_f64(p.y()));
    }
    s
}

pub fn rates_csv(omegas: &[f64], e: &[f64], phi: &[f64]) -> String {
    let mut s = String::from("omega,E,Phi\n");
    for ((w, e), p) in omegas.iter().zip(e).zip(phi) {
        s += &format!("{},{},{}\n", fmt_f64(*w), fmt_f64(*e), fmt_f64(*p));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub omega: f64,
    pub r: f64,
    pub c: Option<f64>,
    pub n_points: usize,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub cond: f64,
    pub solver_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub alpha: f64,
    #[serde(serialize_with = "ser_q")]
    pub q: f64,
    pub r: u32,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
}
