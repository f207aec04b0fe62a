//! Quadrature rules built from the dual frame: spatial weights w_j = ∫_U Θ_j and spectral
//! weights υ_j = ∫_V Θ̂_j dμ.
//!
//! If the integral of f is the linear form ⟨h, u⟩ in frame coordinates, the weights are
//! conj(E·S⁻¹·conj(h)), so no dual frame function has to be formed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::frames::FrameSystem;
use crate::geometry::{delta, delta_from_dist, dist_from_delta, DiskPoint};
use crate::kappa::KappaTable;
use crate::transform::{SpatialFunction, SpatialGrid, SpectralFunction, TransformPlan};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Region {
    /// Geodesic ball.
    Ball { center: [f64; 2], radius: f64 },
    /// λ ∈ [a, b) times the whole boundary circle.
    Band { lambda: [f64; 2] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Spatial,
    Spectral,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub weights: Vec<Complex64>,
    pub region: Region,
    pub kind: RuleKind,
}

fn ball(region: &Region, grid: &SpatialGrid) -> Result<(DiskPoint, f64)> {
    let Region::Ball { center, radius } = region else {
        return Err(Error::Region("spatial weights need a ball region".into()));
    };
    let c = DiskPoint::from_xy(center[0], center[1]).map_err(|e| Error::Region(e.to_string()))?;
    if !(*radius >= 0.0) {
        return Err(Error::Region(format!("ball radius must be nonnegative, got {radius}")));
    }
    let reach = dist_from_delta(delta(c.z(), Complex64::new(0.0, 0.0))) + radius;
    if reach > grid.radius * (1.0 + 1e-12) {
        return Err(Error::Region(format!(
            "ball reaches geodesic radius {reach}, beyond the grid radius {}",
            grid.radius
        )));
    }
    Ok((c, *radius))
}

/// Grid nodes inside the region (indicator at nodes).
pub fn ball_indicator(region: &Region, grid: &SpatialGrid) -> Result<Vec<bool>> {
    let (c, rho) = ball(region, grid)?;
    let dmax = delta_from_dist(rho);
    Ok((0..grid.len()).map(|j| delta(grid.point(j).z(), c.z()) <= dmax).collect())
}

/// ∫_U f with the grid weights.
pub fn integrate_region(f: &SpatialFunction, region: &Region) -> Result<Complex64> {
    let ind = ball_indicator(region, &f.grid)?;
    Ok(f.values.iter().enumerate().filter(|(j, _)| ind[*j]).map(|(j, v)| v * f.grid.weight(j)).sum())
}

fn weights_from_form(frame: &FrameSystem, h: &[Complex64]) -> Result<Vec<Complex64>> {
    let hc: Vec<Complex64> = h.iter().map(|v| v.conj()).collect();
    let y = frame.solve_frame_operator(&hc)?;
    Ok(frame.analysis.apply(&y).into_iter().map(|v| v.conj()).collect())
}

/// Spatial weights for a ball U inside the grid.
pub fn spatial_weights(region: &Region, frame: &FrameSystem, grid: &SpatialGrid) -> Result<QuadratureRule> {
    let ind = ball_indicator(region, grid)?;
    let space = frame.space();
    let n = space.n_band();
    let mmax = space.modes.iter().cloned().max().unwrap_or(0);
    let table = KappaTable::new(&space.grid.lams[..n], mmax, grid.radius);
    let mut h = vec![Complex64::new(0.0, 0.0); space.dim];
    let (mut kap, mut scratch) = (Vec::new(), Vec::new());
    let nt = grid.n_theta;
    for (i, &r) in grid.radii.iter().enumerate() {
        let inside: Vec<usize> = (0..nt).filter(|&k| ind[i * nt + k]).collect();
        if inside.is_empty() {
            continue;
        }
        // Σ_k e^{imθ_k} over the nodes of this ring inside U
        let ring: Vec<Complex64> = (-(mmax as i64)..=mmax as i64)
            .map(|m| inside.iter().map(|&k| Complex64::from_polar(1.0, m as f64 * grid.theta(k))).sum())
            .collect();
        table.eval(r, &mut kap, &mut scratch);
        let w = grid.weight(i * nt);
        let mut c = 0;
        for (l, &mm) in space.modes.iter().enumerate() {
            let s = space.grid.pq(l).sqrt() * w;
            for m in -(mm as i64)..=(mm as i64) {
                h[c] += kap[l * (mmax + 1) + m.unsigned_abs() as usize] * ring[(m + mmax as i64) as usize] * s;
                c += 1;
            }
        }
    }
    Ok(QuadratureRule { weights: weights_from_form(frame, &h)?, region: region.clone(), kind: RuleKind::Spatial })
}

/// Same weights from the dual frame functions: invert each Θ̂_j onto the grid and integrate.
pub fn spatial_weights_from_duals(
    region: &Region,
    frame: &FrameSystem,
    plan: &TransformPlan,
) -> Result<QuadratureRule> {
    let ind = ball_indicator(region, &plan.spatial)?;
    let weights = frame
        .dual_frame_functions()?
        .iter()
        .map(|theta| {
            let g = plan.inverse(theta);
            g.values.iter().enumerate().filter(|(j, _)| ind[*j]).map(|(j, v)| v * plan.spatial.weight(j)).sum()
        })
        .collect();
    Ok(QuadratureRule { weights, region: region.clone(), kind: RuleKind::Spatial })
}

fn band_rows(region: &Region, frame: &FrameSystem) -> Result<Vec<usize>> {
    let Region::Band { lambda: [a, b] } = *region else {
        return Err(Error::Region("spectral weights need a band region".into()));
    };
    if !(a >= 0.0 && a <= b) {
        return Err(Error::Region(format!("band needs 0 <= a <= b, got [{a}, {b}]")));
    }
    if b > frame.omega {
        return Err(Error::Region(format!("band [{a}, {b}] leaves the band limit {}", frame.omega)));
    }
    let lams = &frame.space().grid.lams;
    Ok((0..frame.space().n_band()).filter(|&i| lams[i] >= a && lams[i] < b).collect())
}

/// Spectral weights for V = [a, b) × circle with b ≤ ω. The rule is the sum of per-row rules,
/// so weights are additive over adjacent bands.
pub fn spectral_weights(region: &Region, frame: &FrameSystem) -> Result<QuadratureRule> {
    let space = frame.space();
    let mut weights = vec![Complex64::new(0.0, 0.0); frame.analysis.n_points];
    for i in band_rows(region, frame)? {
        let mut h = vec![Complex64::new(0.0, 0.0); space.dim];
        h[space.index(i, 0).unwrap()] = Complex64::new(space.grid.pq(i).sqrt(), 0.0);
        for (w, v) in weights.iter_mut().zip(weights_from_form(frame, &h)?) {
            *w += v;
        }
    }
    Ok(QuadratureRule { weights, region: region.clone(), kind: RuleKind::Spectral })
}

/// υ_j = Σ_{λ_i ∈ V} Σ_k Θ̂_j(λ_i, b_k)·p q / n_b from the dual frame functions.
pub fn spectral_weights_from_duals(region: &Region, frame: &FrameSystem) -> Result<QuadratureRule> {
    let rows = band_rows(region, frame)?;
    let weights = frame.dual_frame_functions()?.iter().map(|theta| integrate_band(theta, &rows)).collect();
    Ok(QuadratureRule { weights, region: region.clone(), kind: RuleKind::Spectral })
}

fn integrate_band(f: &SpectralFunction, rows: &[usize]) -> Complex64 {
    let g = &f.grid;
    rows.iter().map(|&i| f.row(i).iter().sum::<Complex64>() * (g.pq(i) / g.n_b as f64)).sum()
}

/// ∫_V F dμ over the nodes λ_i ∈ [a, b).
pub fn integrate_spectral(f: &SpectralFunction, region: &Region) -> Result<Complex64> {
    let Region::Band { lambda: [a, b] } = *region else {
        return Err(Error::Region("spectral integral needs a band region".into()));
    };
    let rows: Vec<usize> = (0..f.grid.n_lambda()).filter(|&i| f.grid.lams[i] >= a && f.grid.lams[i] < b).collect();
    Ok(integrate_band(f, &rows))
}

/// Σ_j f(x_j)·weight_j.
pub fn apply_rule(samples: &[Complex64], rule: &QuadratureRule) -> Result<Complex64> {
    if samples.len() != rule.weights.len() {
        return Err(Error::LengthMismatch { expected: rule.weights.len(), got: samples.len() });
    }
    Ok(samples.iter().zip(&rule.weights).map(|(s, w)| s * w).sum())
}
