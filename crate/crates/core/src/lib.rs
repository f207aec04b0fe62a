//! Fourier analysis on the hyperbolic plane in the Poincaré disk model: a discretized
//! Helgason–Fourier transform, band-limited sampling and reconstruction from lattices,
//! quadrature rules, and approximation-rate diagnostics.

pub mod approx;
pub mod cli;
pub mod families;
pub mod frames;
pub mod geometry;
pub mod io;
pub mod kappa;
pub mod lattice;
pub mod linalg;
pub mod paley_wiener;
pub mod quad;
pub mod quadrature;
pub mod suite;
pub mod transform;

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point with modulus {0} is outside the admissible disk")]
    OutsideDisk(f64),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("boundary mass {fraction:e} exceeds 1e-6; the function is not supported inside the truncated ball")]
    BoundaryMass { fraction: f64 },
    #[error("calibration spread {spread:e} exceeds 1e-4")]
    Calibration { spread: f64 },
    #[error("function is not band-limited to {omega}: energy fraction {fraction:e} above the band")]
    NotBandLimited { omega: f64, fraction: f64 },
    #[error("band {0} exceeds the represented spectrum")]
    BandTooLarge(f64),
    #[error("no spectral nodes below the band limit")]
    EmptyBand,
    #[error("frame is rank deficient: A = {a:e}, B = {b:e}")]
    RankDeficient { a: f64, b: f64 },
    #[error("solver did not converge after {iterations} iterations, relative residual {residual:e}")]
    Solver { iterations: usize, residual: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("lattice: {0}")]
    Lattice(String),
    #[error("region: {0}")]
    Region(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
