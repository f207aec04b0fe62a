//! Gauss–Legendre rules and piecewise Chebyshev interpolation.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1], nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite rule with `panels` equal panels of `k`-point Gauss–Legendre on [a, b].
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, k: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(k);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * k);
    let mut weights = Vec::with_capacity(panels * k);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for j in 0..k {
            nodes.push(lo + 0.5 * (x[j] + 1.0) * h);
            weights.push(0.5 * w[j] * h);
        }
    }
    (nodes, weights)
}

/// Piecewise Chebyshev interpolation on equal panels of [0, len].
#[derive(Clone, Debug)]
pub struct ChebPanels {
    pub len: f64,
    pub panels: usize,
    pub order: usize,
    unit_nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl ChebPanels {
    pub fn new(len: f64, panels: usize, order: usize) -> Self {
        let unit_nodes: Vec<f64> = (0..order).map(|j| -((2 * j + 1) as f64 * PI / (2 * order) as f64).cos()).collect();
        let bary = (0..order)
            .map(|j| {
                let t = (2 * j + 1) as f64 * PI / (2 * order) as f64;
                let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                -s * t.sin()
            })
            .collect();
        Self { len, panels, order, unit_nodes, bary }
    }

    pub fn width(&self) -> f64 {
        self.len / self.panels as f64
    }

    /// All interpolation nodes, panel-major.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.width();
        let mut out = Vec::with_capacity(self.panels * self.order);
        for p in 0..self.panels {
            let lo = p as f64 * h;
            for &u in &self.unit_nodes {
                out.push(lo + 0.5 * (u + 1.0) * h);
            }
        }
        out
    }

    /// Panel index and interpolation weights for x ∈ [0, len].
    pub fn weights_at(&self, x: f64, out: &mut Vec<f64>) -> usize {
        let h = self.width();
        let p = ((x / h).floor() as isize).clamp(0, self.panels as isize - 1) as usize;
        let u = 2.0 * (x - p as f64 * h) / h - 1.0;
        out.clear();
        for (j, &node) in self.unit_nodes.iter().enumerate() {
            if u == node {
                out.clear();
                out.extend((0..self.order).map(|k| if k == j { 1.0 } else { 0.0 }));
                return p;
            }
        }
        let mut denom = 0.0;
        for j in 0..self.order {
            let c = self.bary[j] / (u - self.unit_nodes[j]);
            out.push(c);
            denom += c;
        }
        for c in out.iter_mut() {
            *c /= denom;
        }
        p
    }
}
