//! Separated, covering point sets on geodesic balls built by greedy farthest-point insertion.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::geometry::{delta, delta_from_dist, dist_from_delta, point_to_polar, polar_to_point, DiskPoint};
use crate::{Error, Result};

/// Largest probe grid the constructor will build.
pub const MAX_PROBES: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// None for a single point.
    pub min_pairwise: Option<f64>,
    pub covering_radius: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct Lattice {
    pub points: Vec<DiskPoint>,
    pub r: f64,
    pub big_r: f64,
    pub seed: u64,
    pub certificate: Certificate,
}

/// r = c·(ω² + ρ²)^{−1/2}.
pub fn nyquist_radius(omega: f64, c: f64) -> f64 {
    c / (omega * omega + 0.25).sqrt()
}

/// Spatial index over points bucketed by geodesic radius and sorted by angle within a bucket.
pub struct PolarIndex {
    bin_width: f64,
    bins: Vec<Bin>,
}

#[derive(Default)]
struct Bin {
    r_lo: f64,
    r_hi: f64,
    thetas: Vec<f64>,
    ids: Vec<usize>,
    zs: Vec<Complex64>,
}

impl PolarIndex {
    pub fn new(points: &[Complex64], bin_width: f64) -> Self {
        assert!(bin_width > 0.0);
        let polar: Vec<(f64, f64)> =
            points.iter().map(|&z| (2.0 * z.norm().atanh(), z.arg().rem_euclid(TAU))).collect();
        let rmax = polar.iter().map(|p| p.0).fold(0.0, f64::max);
        let nbins = (rmax / bin_width).floor() as usize + 1;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); nbins];
        for (i, &(r, _)) in polar.iter().enumerate() {
            members[((r / bin_width).floor() as usize).min(nbins - 1)].push(i);
        }
        let bins = members
            .into_iter()
            .map(|mut ids| {
                ids.sort_by(|&a, &b| polar[a].1.total_cmp(&polar[b].1).then(a.cmp(&b)));
                let r_lo = ids.iter().map(|&i| polar[i].0).fold(f64::INFINITY, f64::min);
                let r_hi = ids.iter().map(|&i| polar[i].0).fold(0.0, f64::max);
                Bin {
                    r_lo,
                    r_hi,
                    thetas: ids.iter().map(|&i| polar[i].1).collect(),
                    zs: ids.iter().map(|&i| points[i]).collect(),
                    ids,
                }
            })
            .collect();
        Self { bin_width, bins }
    }

    /// Calls `visit(id, δ)` for every indexed point within geodesic distance `d` of z.
    pub fn for_each_within(&self, z: Complex64, d: f64, mut visit: impl FnMut(usize, f64)) {
        let dmax = delta_from_dist(d);
        let r1 = 2.0 * z.norm().atanh();
        let th1 = z.arg().rem_euclid(TAU);
        let lo = (((r1 - d) / self.bin_width).floor().max(0.0)) as usize;
        let hi = (((r1 + d) / self.bin_width).floor() as usize).min(self.bins.len().saturating_sub(1));
        for bin in self.bins.get(lo..=hi).unwrap_or(&[]) {
            if bin.ids.is_empty() {
                continue;
            }
            let m = (bin.r_lo - r1).max(r1 - bin.r_hi).max(0.0);
            if m > d {
                continue;
            }
            let den = 2.0 * r1.sinh() * bin.r_lo.sinh();
            let s2 = if den > 0.0 { (d.cosh() - m.cosh()) / den } else { f64::INFINITY };
            let mut check = |k: usize| {
                let dl = delta(z, bin.zs[k]);
                if dl <= dmax {
                    visit(bin.ids[k], dl);
                }
            };
            if s2 >= 0.25 {
                // window wider than ±π/3: scan the whole bin
                (0..bin.ids.len()).for_each(&mut check);
                continue;
            }
            let half = 2.0 * s2.sqrt().asin() * (1.0 + 1e-9) + 1e-12;
            let (a, b) = (th1 - half, th1 + half);
            let n = bin.thetas.len();
            let start = bin.thetas.partition_point(|&t| t < a.rem_euclid(TAU));
            let end = bin.thetas.partition_point(|&t| t <= b.rem_euclid(TAU));
            if a >= 0.0 && b < TAU {
                (start..end).for_each(&mut check);
            } else {
                // the window wraps through angle 0
                (start..n).chain(0..end).for_each(&mut check);
            }
        }
    }
}

/// Quasi-uniform probe grid on the closed ball of radius R: the origin plus rings with
/// geodesic spacing h = r/4 in radius and along each ring. The seed rotates each ring.
pub fn probe_grid(big_r: f64, r: f64, seed: u64) -> Result<Vec<Complex64>> {
    if !(r > 0.0 && big_r > 0.0) {
        return Err(Error::Param(format!("lattice needs r > 0 and R > 0, got r = {r}, R = {big_r}")));
    }
    let h = r / 4.0;
    let nr = (big_r / h).ceil() as usize;
    let estimate = TAU * (big_r.cosh() - 1.0) / (h * h) + nr as f64;
    if estimate > MAX_PROBES as f64 {
        return Err(Error::Lattice(format!(
            "r = {r} is too small for a certified covering of radius {big_r}: the probe grid would need about {estimate:.3e} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for i in 1..=nr {
        let rr = big_r * i as f64 / nr as f64;
        let nt = ((TAU * rr.sinh() / h).ceil() as usize).max(6);
        let offset: f64 = rng.gen();
        for k in 0..nt {
            let p = polar_to_point(rr, TAU * (k as f64 + offset) / nt as f64)?;
            pts.push(p.z());
        }
    }
    Ok(pts)
}

/// Max-tree over probe values; ties resolve to the lowest index.
struct MaxTree {
    size: usize,
    vals: Vec<f64>,
    tree: Vec<usize>,
}

impl MaxTree {
    fn new(vals: Vec<f64>) -> Self {
        let size = vals.len().next_power_of_two();
        let mut tree = vec![usize::MAX; 2 * size];
        for i in 0..vals.len() {
            tree[size + i] = i;
        }
        let mut t = Self { size, vals, tree };
        for node in (1..size).rev() {
            t.tree[node] = t.better(t.tree[2 * node], t.tree[2 * node + 1]);
        }
        t
    }

    fn better(&self, a: usize, b: usize) -> usize {
        match (a, b) {
            (usize::MAX, _) => b,
            (_, usize::MAX) => a,
            _ if self.vals[b] > self.vals[a] => b,
            _ => a,
        }
    }

    fn set(&mut self, i: usize, v: f64) {
        self.vals[i] = v;
        let mut node = (self.size + i) / 2;
        while node >= 1 {
            self.tree[node] = self.better(self.tree[2 * node], self.tree[2 * node + 1]);
            node /= 2;
        }
    }

    fn argmax(&self) -> usize {
        self.tree[1]
    }
}

/// Greedy farthest-point lattice on the ball of radius R: start at the origin and keep adding
/// the probe farthest from the current set until every probe is within r/2.
pub fn build_lattice(big_r: f64, r: f64, seed: u64) -> Result<Lattice> {
    let probes = probe_grid(big_r, r, seed)?;
    let index = PolarIndex::new(&probes, r / 4.0);
    let stop = delta_from_dist(0.5 * r);
    let origin = Complex64::new(0.0, 0.0);
    let mut tree = MaxTree::new(probes.iter().map(|&p| delta(p, origin)).collect());
    let mut chosen = vec![origin];
    loop {
        let j = tree.argmax();
        let dmax = tree.vals[j];
        if dmax <= stop {
            break;
        }
        let x = probes[j];
        chosen.push(x);
        let mut updates = Vec::new();
        index.for_each_within(x, dist_from_delta(dmax), |i, d| {
            if d < tree.vals[i] {
                updates.push((i, d));
            }
        });
        for (i, d) in updates {
            tree.set(i, d);
        }
    }
    let points = chosen.into_iter().map(DiskPoint::new).collect::<Result<Vec<_>>>()?;
    let certificate = certify(&points, &probes, r, big_r);
    Ok(Lattice { points, r, big_r, seed, certificate })
}

impl Lattice {
    /// Wrap an arbitrary point set; its certificate is measured on the standard probe grid.
    pub fn from_points(points: Vec<DiskPoint>, r: f64, big_r: f64, seed: u64) -> Result<Lattice> {
        if points.is_empty() {
            return Err(Error::Lattice("empty point set".into()));
        }
        let probes = probe_grid(big_r, r, seed)?;
        let certificate = certify(&points, &probes, r, big_r);
        Ok(Lattice { points, r, big_r, seed, certificate })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Separation ≥ r/2 and covering ≤ r/2.
    pub fn certified(&self) -> bool {
        let c = &self.certificate;
        c.min_pairwise.is_none_or(|m| m >= 0.5 * self.r - 1e-12) && c.covering_radius <= 0.5 * self.r + 1e-12
    }
}

/// Recompute the certificate of a lattice on its probe grid.
pub fn verify_lattice(l: &Lattice) -> Result<Certificate> {
    if l.points.is_empty() {
        return Err(Error::Lattice("empty lattice".into()));
    }
    let probes = probe_grid(l.big_r, l.r, l.seed)?;
    Ok(certify(&l.points, &probes, l.r, l.big_r))
}

fn certify(points: &[DiskPoint], probes: &[Complex64], r: f64, big_r: f64) -> Certificate {
    let zs: Vec<Complex64> = points.iter().map(|p| p.z()).collect();
    let index = PolarIndex::new(&zs, (r / 2.0).max(1e-3));
    let min_pairwise = if zs.len() < 2 {
        None
    } else {
        let mut radius = r;
        loop {
            let mut best = f64::INFINITY;
            for (i, &z) in zs.iter().enumerate() {
                index.for_each_within(z, radius, |j, d| {
                    if j != i {
                        best = best.min(d);
                    }
                });
            }
            if best.is_finite() {
                break Some(dist_from_delta(best));
            }
            radius *= 2.0;
        }
    };
    let mut cover = 0.0f64;
    let mut multiplicity = 0;
    for &p in probes {
        let mut near = f64::INFINITY;
        let mut count = 0;
        index.for_each_within(p, r, |_, d| {
            near = near.min(d);
            count += 1;
        });
        if !near.is_finite() {
            near = zs.iter().map(|&z| delta(p, z)).fold(f64::INFINITY, f64::min);
        }
        cover = cover.max(near);
        multiplicity = multiplicity.max(count);
    }
    Certificate { r, big_r, min_pairwise, covering_radius: dist_from_delta(cover), multiplicity }
}

/// Geodesic radius of each lattice point.
pub fn radii(l: &Lattice) -> Vec<f64> {
    l.points.iter().map(|p| point_to_polar(p).0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;

    #[test]
    fn nyquist_limits() {
        assert!((nyquist_radius(0.0, 1.3) - 2.6).abs() < 1e-15);
        assert!((nyquist_radius(1e6, 2.0) * 1e6 / 2.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_domain_gives_origin_only() {
        let l = build_lattice(0.2, 1.0, 0).unwrap();
        assert_eq!(l.points.len(), 1);
        assert_eq!(l.points[0].z(), Complex64::new(0.0, 0.0));
        assert!(l.certificate.min_pairwise.is_none());
        assert!((l.certificate.covering_radius - 0.2).abs() < 1e-12);
    }

    #[test]
    fn index_query_matches_brute_force() {
        let probes = probe_grid(3.0, 0.7, 5).unwrap();
        let index = PolarIndex::new(&probes, 0.3);
        for (k, &c) in probes.iter().enumerate().step_by(97) {
            for d in [0.1, 0.6, 2.5] {
                let mut got = Vec::new();
                index.for_each_within(c, d, |i, _| got.push(i));
                got.sort();
                let want: Vec<usize> =
                    (0..probes.len()).filter(|&i| delta(c, probes[i]) <= delta_from_dist(d)).collect();
                assert_eq!(got, want, "probe {k} radius {d}");
            }
        }
    }

    #[test]
    fn certificate_matches_brute_force() {
        let l = build_lattice(2.5, 0.6, 3).unwrap();
        assert!(l.certified());
        let mut min = f64::INFINITY;
        for i in 0..l.len() {
            for j in 0..i {
                min = min.min(dist(&l.points[i], &l.points[j]));
            }
        }
        assert!((l.certificate.min_pairwise.unwrap() - min).abs() < 1e-12);
        let probes = probe_grid(2.5, 0.6, 3).unwrap();
        let mut cover = 0.0f64;
        let mut mult = 0;
        for p in &probes {
            let p = DiskPoint::new(*p).unwrap();
            let ds: Vec<f64> = l.points.iter().map(|q| dist(&p, q)).collect();
            cover = cover.max(ds.iter().cloned().fold(f64::INFINITY, f64::min));
            mult = mult.max(ds.iter().filter(|&&d| d <= 0.6).count());
        }
        assert!((l.certificate.covering_radius - cover).abs() < 1e-12);
        assert_eq!(l.certificate.multiplicity, mult);
        assert_eq!(verify_lattice(&l).unwrap(), l.certificate);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_lattice(4.0, 0.0, 0).is_err());
        assert!(matches!(build_lattice(12.0, 1e-3, 0), Err(Error::Lattice(_))));
        let l = build_lattice(1.0, 0.5, 0).unwrap();
        assert!(Lattice::from_points(Vec::new(), 0.5, 1.0, 0).is_err());
        assert_eq!(Lattice::from_points(l.points.clone(), 0.5, 1.0, 0).unwrap().certificate, l.certificate);
    }
}
