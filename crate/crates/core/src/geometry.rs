//! Hyperbolic geometry of the Poincaré disk (curvature −1).

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::Error;

/// Spectral shift for H² with curvature −1.
pub const RHO: f64 = 0.5;

/// Largest admissible modulus of a disk point.
pub const MAX_MODULUS: f64 = 1.0 - 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint {
    z: Complex64,
}

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self, Error> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_MODULUS {
            return Err(Error::OutsideDisk(z.norm()));
        }
        Ok(Self { z })
    }

    pub fn from_xy(x: f64, y: f64) -> Result<Self, Error> {
        Self::new(Complex64::new(x, y))
    }

    pub fn origin() -> Self {
        Self { z: Complex64::new(0.0, 0.0) }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn x(&self) -> f64 {
        self.z.re
    }

    pub fn y(&self) -> f64 {
        self.z.im
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        Self { theta: t }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn b(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConstants {
    pub rho: f64,
    pub c_p: f64,
}

impl ModelConstants {
    pub fn new(c_p: f64) -> Result<Self, Error> {
        if !(c_p > 0.0 && c_p.is_finite()) {
            return Err(Error::Param(format!("c_P must be positive, got {c_p}")));
        }
        Ok(Self { rho: RHO, c_p })
    }
}

/// Cross ratio |p−q|²/((1−|p|²)(1−|q|²)); cosh d = 1 + 2·delta.
pub fn delta(p: Complex64, q: Complex64) -> f64 {
    (p - q).norm_sqr() / ((1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr()))
}

/// Distance corresponding to a cross ratio value.
pub fn dist_from_delta(d: f64) -> f64 {
    // acosh(1 + 2d) = 2 asinh(sqrt(d)), accurate for small d
    2.0 * d.sqrt().asinh()
}

/// Cross ratio corresponding to a distance.
pub fn delta_from_dist(r: f64) -> f64 {
    let s = (0.5 * r).sinh();
    s * s
}

pub fn dist(p: &DiskPoint, q: &DiskPoint) -> f64 {
    dist_from_delta(delta(p.z, q.z))
}

pub fn busemann(p: &DiskPoint, b: &BoundaryPoint) -> f64 {
    busemann_z(p.z, b.b())
}

/// Busemann function for a boundary point b with |b| = 1.
pub fn busemann_z(z: Complex64, b: Complex64) -> f64 {
    let w = z * b.conj();
    let d = (w.re - 1.0) * (w.re - 1.0) + w.im * w.im;
    ((1.0 - z.norm_sqr()) / d).ln()
}

/// Isometry p ↦ (p + a)/(1 + ā p), mapping 0 to a.
pub fn mobius_translate(a: &DiskPoint, p: &DiskPoint) -> DiskPoint {
    let w = mobius_z(a.z, p.z);
    let n = w.norm();
    let w = if n > MAX_MODULUS { w * (MAX_MODULUS / n) } else { w };
    DiskPoint { z: w }
}

pub fn mobius_z(a: Complex64, p: Complex64) -> Complex64 {
    (p + a) / (Complex64::new(1.0, 0.0) + a.conj() * p)
}

pub fn polar_to_point(r: f64, theta: f64) -> Result<DiskPoint, Error> {
    if !(r >= 0.0) {
        return Err(Error::Param(format!("geodesic radius must be nonnegative, got {r}")));
    }
    DiskPoint::new(Complex64::from_polar((0.5 * r).tanh(), theta))
}

/// Returns (r, θ) with θ ∈ [0, 2π); θ = 0 at the origin.
pub fn point_to_polar(p: &DiskPoint) -> (f64, f64) {
    let m = p.z.norm();
    if m == 0.0 {
        return (0.0, 0.0);
    }
    (2.0 * m.atanh(), BoundaryPoint::new(p.z.arg()).theta())
}
