//! Dense Hermitian kernels: matrix-vector products, Lanczos extreme eigenvalues and
//! conjugate gradients.

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Conjugate transpose applied to y.
    pub fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![ZERO; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi == ZERO {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * yi;
            }
        }
        out
    }

    /// Gram matrix AᴴA, Hermitian by construction.
    pub fn gram(&self) -> Matrix {
        self.gram_weighted(&vec![1.0; self.rows])
    }

    /// AᴴWA for a diagonal weight W.
    pub fn gram_weighted(&self, w: &[f64]) -> Matrix {
        assert_eq!(w.len(), self.rows);
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..n {
                let ca = r[a].conj() * w[i];
                if ca == ZERO {
                    continue;
                }
                let dst = &mut g.data[a * n..(a + 1) * n];
                for (d, rb) in dst[a..].iter_mut().zip(&r[a..]) {
                    *d += ca * rb;
                }
            }
        }
        for a in 0..n {
            g.data[a * n + a].im = 0.0;
            for b in 0..a {
                g.data[a * n + b] = g.data[b * n + a].conj();
            }
        }
        g
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (alpha, beta) below x.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..alpha.len() {
        let b2 = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] };
        d = alpha[i] - x - b2 / d;
        if d == 0.0 {
            d = -f64::EPSILON * (alpha[i].abs() + x.abs() + 1e-300);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix by bisection.
pub fn tridiagonal_eigenvalue(alpha: &[f64], beta: &[f64], k: usize) -> f64 {
    let n = alpha.len();
    assert!(k < n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = (if i > 0 { beta[i - 1].abs() } else { 0.0 }) + (if i + 1 < n { beta[i].abs() } else { 0.0 });
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    let pad = 1e-14 * (lo.abs().max(hi.abs()) + 1e-300);
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Unit eigenvector of the tridiagonal for an accurate eigenvalue, by inverse iteration
/// with partial pivoting.
fn tridiagonal_eigenvector(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let n = alpha.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = alpha.iter().chain(beta).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let shift = theta + 1e-13 * scale;
    let mut y = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..3 {
        // rows hold (diag, super1, super2) after elimination
        let mut d: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
        let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { beta[i] } else { 0.0 }).collect();
        let mut u2 = vec![0.0; n];
        let mut rhs = y.clone();
        let mut sub: Vec<f64> = beta.to_vec();
        for i in 0..n - 1 {
            if sub[i].abs() > d[i].abs() {
                // swap rows i and i+1
                let (di, u1i, u2i, ri) = (d[i], u1[i], u2[i], rhs[i]);
                d[i] = sub[i];
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                rhs[i] = rhs[i + 1];
                sub[i] = di;
                d[i + 1] = u1i;
                u1[i + 1] = u2i;
                rhs[i + 1] = ri;
            }
            let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
            let m = sub[i] / piv;
            d[i + 1] -= m * u1[i];
            if i + 1 < n {
                u1[i + 1] -= m * u2[i];
            }
            rhs[i + 1] -= m * rhs[i];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * y[i + 2];
            }
            let piv = if d[i] == 0.0 { 1e-300 } else { d[i] };
            y[i] = s / piv;
        }
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in y.iter_mut() {
            *v /= nrm;
        }
    }
    y
}

#[derive(Clone, Debug)]
pub struct ExtremeEigenvalues {
    pub min: f64,
    pub max: f64,
    pub iterations: usize,
}

/// Smallest and largest eigenvalues of a positive semidefinite Hermitian operator of size n
/// by Lanczos with full reorthogonalization from the all-ones start vector. Stops when each
/// extreme Ritz residual bound falls below `tol` times its Ritz value (or below roundoff of
/// the largest one).
pub fn lanczos_extremes(apply: impl Fn(&[Complex64]) -> Vec<Complex64>, n: usize, tol: f64) -> ExtremeEigenvalues {
    assert!(n > 0);
    let mut v = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    loop {
        let mut w = apply(&v);
        let a = dot(&v, &w).re;
        axpy(&mut w, Complex64::new(-a, 0.0), &v);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(&mut w, Complex64::new(-b, 0.0), prev);
        }
        basis.push(v);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(&mut w, -c, q);
            }
        }
        let b = norm(&w);
        let k = alpha.len();
        let lo = tridiagonal_eigenvalue(&alpha, &beta, 0);
        let hi = tridiagonal_eigenvalue(&alpha, &beta, k - 1);
        let scale = hi.abs().max(1e-300);
        let done = k == n || b <= 1e-14 * scale || {
            let ylo = tridiagonal_eigenvector(&alpha, &beta, lo);
            let yhi = tridiagonal_eigenvector(&alpha, &beta, hi);
            let (rlo, rhi) = ((b * ylo[k - 1]).abs(), (b * yhi[k - 1]).abs());
            (rlo <= tol * lo.abs() || rlo <= 1e-14 * scale) && rhi <= tol * scale
        };
        if done {
            return ExtremeEigenvalues { min: lo, max: hi, iterations: k };
        }
        beta.push(b);
        v = w.iter().map(|x| x / b).collect();
    }
}

#[derive(Clone, Debug)]
pub struct CgResult {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Conjugate gradients for a Hermitian positive definite operator, to relative residual `tol`.
pub fn conjugate_gradient(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<CgResult> {
    let n = b.len();
    let bn = norm(b);
    let mut x = vec![ZERO; n];
    if bn == 0.0 {
        return Ok(CgResult { x, iterations: 0, residual: 0.0 });
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for it in 1..=max_iter {
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap).re;
        axpy(&mut x, Complex64::new(alpha, 0.0), &p);
        axpy(&mut r, Complex64::new(-alpha, 0.0), &ap);
        let rr_new = dot(&r, &r).re;
        if rr_new.sqrt() <= tol * bn {
            // confirm with the true residual
            let ax = apply(&x);
            let res = ax.iter().zip(b).map(|(a, bi)| (bi - a).norm_sqr()).sum::<f64>().sqrt() / bn;
            if res <= tol {
                return Ok(CgResult { x, iterations: it, residual: res });
            }
            r = ax.iter().zip(b).map(|(a, bi)| bi - a).collect();
            p = r.clone();
            rr = dot(&r, &r).re;
            continue;
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + *pi * beta;
        }
        rr = rr_new;
    }
    Err(Error::Solver { iterations: max_iter, residual: rr.sqrt() / bn })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(rows, cols);
        for v in m.data.iter_mut() {
            *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        m
    }

    #[test]
    fn tridiagonal_bisection_known_spectrum() {
        // second-difference matrix: eigenvalues 2 − 2cos(kπ/(n+1))
        let n = 12;
        let alpha = vec![2.0; n];
        let beta = vec![-1.0; n - 1];
        for k in 0..n {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((tridiagonal_eigenvalue(&alpha, &beta, k) - want).abs() < 1e-13);
        }
        let y = tridiagonal_eigenvector(&alpha, &beta, tridiagonal_eigenvalue(&alpha, &beta, 0));
        let want: Vec<f64> = (1..=n).map(|j| (j as f64 * std::f64::consts::PI / (n + 1) as f64).sin()).collect();
        let wn = want.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dotp: f64 = y.iter().zip(&want).map(|(a, b)| a * b / wn).sum();
        assert!((dotp.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_matches_adjoint_product() {
        let a = random_matrix(9, 5, 1);
        let g = a.gram();
        let x: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let lhs = g.apply(&x);
        let rhs = a.apply_adjoint(&a.apply(&x));
        assert!(lhs.iter().zip(&rhs).all(|(p, q)| (p - q).norm() < 1e-12));
    }

    #[test]
    fn lanczos_diagonal() {
        let d = [0.5, 3.0, 1.0, 7.5, 2.0];
        let e = lanczos_extremes(|x| x.iter().zip(&d).map(|(v, s)| v * s).collect(), 5, 1e-10);
        assert!((e.min - 0.5).abs() < 1e-12 && (e.max - 7.5).abs() < 1e-12);
    }

    #[test]
    fn cg_solves_and_reports_failure() {
        let a = random_matrix(40, 20, 3);
        let g = a.gram();
        let xt: Vec<Complex64> = (0..20).map(|i| Complex64::new((i as f64).sin(), 0.3)).collect();
        let b = g.apply(&xt);
        let r = conjugate_gradient(|v| g.apply(v), &b, 1e-12, 200).unwrap();
        assert!(r.residual <= 1e-12);
        assert!(r.x.iter().zip(&xt).all(|(p, q)| (p - q).norm() < 1e-8));
        assert!(matches!(conjugate_gradient(|v| g.apply(v), &b, 1e-12, 2), Err(Error::Solver { .. })));
        let z = conjugate_gradient(|v| g.apply(v), &vec![ZERO; 20], 1e-12, 5).unwrap();
        assert!(z.x.iter().all(|v| *v == ZERO));
    }
}
