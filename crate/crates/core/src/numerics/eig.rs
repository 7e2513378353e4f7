//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form, then single-shift QR sweeps with Wilkinson shifts.

use num_complex::Complex64;

use super::{ComplexMatrix, Tolerances};
use crate::error::{Error, Result};

/// Scratch buffers for repeated small eigenvalue problems (grid scans).
#[derive(Debug, Default, Clone)]
pub struct EigenWorkspace {
    h: Vec<Complex64>,
    v: Vec<Complex64>,
    rot: Vec<(f64, Complex64)>,
    out: Vec<Complex64>,
}

impl EigenWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads `a` into the workspace and returns the eigenvalues.
    pub fn eigenvalues(&mut self, a: &ComplexMatrix) -> Result<&[Complex64]> {
        assert!(a.is_square());
        let n = a.rows();
        self.h.clear();
        self.h.extend_from_slice(a.as_slice());
        self.solve(n)
    }

    /// Eigenvalues of the row-major `n×n` matrix in `data`.
    pub fn eigenvalues_of(&mut self, data: &[Complex64], n: usize) -> Result<&[Complex64]> {
        assert_eq!(data.len(), n * n);
        self.h.clear();
        self.h.extend_from_slice(data);
        self.solve(n)
    }

    fn solve(&mut self, n: usize) -> Result<&[Complex64]> {
        if self.h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        hessenberg(&mut self.h, n, &mut self.v);
        self.out.clear();
        hessenberg_qr(&mut self.h, n, &mut self.rot, &mut self.out, &Tolerances::default())?;
        Ok(&self.out)
    }
}

/// All `n` eigenvalues of `a`, with multiplicity, in no particular order.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let mut ws = EigenWorkspace::new();
    Ok(ws.eigenvalues(a)?.to_vec())
}

/// In-place variant on a row-major buffer; `h` is destroyed.
pub fn eigenvalues_in_place(
    h: &mut [Complex64],
    n: usize,
    out: &mut Vec<Complex64>,
    tol: &Tolerances,
) -> Result<()> {
    let mut v = Vec::new();
    let mut rot = Vec::new();
    hessenberg(h, n, &mut v);
    out.clear();
    hessenberg_qr(h, n, &mut rot, out, tol)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().fold(0.0, |m, z| m.max(z.norm())))
}

fn hessenberg(h: &mut [Complex64], n: usize, v: &mut Vec<Complex64>) {
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let len = n - k - 1;
        v.clear();
        v.extend((0..len).map(|i| h[(k + 1 + i) * n + k]));
        let tail: f64 = v[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let norm = (v[0].norm_sqr() + tail).sqrt();
        let phase = if v[0].norm() > 0.0 {
            v[0] / v[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // (I - τ v vᴴ) A
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..len {
                s += v[i].conj() * h[(k + 1 + i) * n + j];
            }
            s *= tau;
            for i in 0..len {
                h[(k + 1 + i) * n + j] -= v[i] * s;
            }
        }
        // A (I - τ v vᴴ)
        for r in 0..n {
            let row = &mut h[r * n..(r + 1) * n];
            let mut s = Complex64::new(0.0, 0.0);
            for l in 0..len {
                s += row[k + 1 + l] * v[l];
            }
            s *= tau;
            for l in 0..len {
                row[k + 1 + l] -= s * v[l].conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in 1..len {
            h[(k + 1 + i) * n + k] = Complex64::new(0.0, 0.0);
        }
    }
}

#[inline]
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let nu = an.hypot(bn);
    (an / nu, (a / an) * b.conj() / nu)
}

fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let m = (a + d) * 0.5;
    let disc = (((a - d) * 0.5).powi(2) + b * c).sqrt();
    let l1 = if (m + disc).norm() >= (m - disc).norm() {
        m + disc
    } else {
        m - disc
    };
    let det = a * d - b * c;
    let l2 = if l1.norm() > 0.0 { det / l1 } else { m - disc };
    (l1, l2)
}

fn hessenberg_qr(
    h: &mut [Complex64],
    n: usize,
    rot: &mut Vec<(f64, Complex64)>,
    out: &mut Vec<Complex64>,
    tol: &Tolerances,
) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let scale = h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let max_sweeps = tol.sweeps_per_dim * n;
    let mut sweeps = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            out.push(h[0]);
            return Ok(());
        }
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1) * n + l - 1].norm() + h[l * n + l].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[l * n + l - 1].norm() <= tol.deflation * s {
                h[l * n + l - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[hi * n + hi]);
            hi -= 1;
            iter = 0;
            continue;
        }
        if l + 1 == hi {
            let (l1, l2) = eig2(
                h[l * n + l],
                h[l * n + hi],
                h[hi * n + l],
                h[hi * n + hi],
            );
            out.push(l1);
            out.push(l2);
            if l == 0 {
                return Ok(());
            }
            hi = l - 1;
            iter = 0;
            continue;
        }
        sweeps += 1;
        iter += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence(sweeps));
        }
        let d = h[hi * n + hi];
        let shift = if iter.is_multiple_of(10) {
            let sub = h[hi * n + hi - 1].norm() + h[(hi - 1) * n + hi - 2].norm();
            d + Complex64::new(0.75 * sub, 0.4 * sub)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 1) * n + hi - 1],
                h[(hi - 1) * n + hi],
                h[hi * n + hi - 1],
                d,
            );
            if (l1 - d).norm() <= (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        for i in l..=hi {
            h[i * n + i] -= shift;
        }
        rot.clear();
        for k in l..hi {
            let (c, s) = givens(h[k * n + k], h[(k + 1) * n + k]);
            rot.push((c, s));
            for j in k..=hi {
                let x = h[k * n + j];
                let y = h[(k + 1) * n + j];
                h[k * n + j] = x * c + s * y;
                h[(k + 1) * n + j] = -s.conj() * x + y * c;
            }
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rot[idx];
            let last = (k + 1).min(hi);
            for i in l..=last {
                let x = h[i * n + k];
                let y = h[i * n + k + 1];
                h[i * n + k] = x * c + y * s.conj();
                h[i * n + k + 1] = -x * s + y * c;
            }
        }
        for i in l..=hi {
            h[i * n + i] += shift;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{lu_solve, Scalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn diagonal_matrix() {
        let a = ComplexMatrix::diagonal(&[c(0.5, 0.0), c(-0.25, 0.0)]);
        let ev = sorted(eigenvalues(&a).unwrap());
        assert!((ev[0] - c(-0.25, 0.0)).norm() < 1e-15);
        assert!((ev[1] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(spectral_radius(&a).unwrap(), 0.5);
    }

    #[test]
    fn nilpotent_block() {
        let a = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(0., 0.), c(0., 0.)]]);
        for z in eigenvalues(&a).unwrap() {
            assert!(z.norm() < 1e-15);
        }
    }

    #[test]
    fn companion_of_z2_minus_1() {
        let a = ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]);
        let ev = sorted(eigenvalues(&a).unwrap());
        assert!((ev[0] - c(-1., 0.)).norm() < 1e-14);
        assert!((ev[1] - c(1., 0.)).norm() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_zero_radius() {
        assert_eq!(spectral_radius(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(eigenvalues(&a).is_err());
    }

    /// Inverse iteration gives an eigenvector for each computed eigenvalue;
    /// its residual is the backward error.
    #[test]
    fn residuals_are_small_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..200 {
            let n = 1 + trial % 10;
            let a = random_matrix(&mut rng, n);
            let ev = eigenvalues(&a).unwrap();
            assert_eq!(ev.len(), n);
            let anorm = a.norm_fro();
            for &lam in &ev {
                let mut shifted = a.clone();
                for i in 0..n {
                    shifted[(i, i)] -= lam + c(1e-13 * anorm, 0.0);
                }
                let mut x: Vec<Complex64> = (0..n).map(|i| c(1.0 + i as f64 * 0.1, 0.3)).collect();
                for _ in 0..3 {
                    x = lu_solve(&shifted, &x).unwrap();
                    let nx = x.iter().map(|z| z.abs2()).sum::<f64>().sqrt();
                    x.iter_mut().for_each(|z| *z /= nx);
                }
                let ax = a.mat_vec(&x);
                let res = ax
                    .iter()
                    .zip(&x)
                    .map(|(&p, &q)| (p - lam * q).abs2())
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-8 * anorm, "n={n} residual {res}");
            }
        }
    }

    #[test]
    fn adjoint_eigenvalues_are_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let a = random_matrix(&mut rng, n);
            let mut e1: Vec<Complex64> = eigenvalues(&a).unwrap().iter().map(|z| z.conj()).collect();
            let mut e2 = eigenvalues(&a.adjoint()).unwrap();
            // greedy multiset match
            for z in e1.drain(..) {
                let (idx, d) = e2
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (i, (w - z).norm()))
                    .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                    .unwrap();
                assert!(d < 1e-8, "n={n} mismatch {d}");
                e2.remove(idx);
            }
        }
    }

    #[test]
    fn spectral_radius_is_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            let a = random_matrix(&mut rng, n);
            let s = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let r1 = spectral_radius(&a.scaled(s)).unwrap();
            let r0 = spectral_radius(&a).unwrap();
            assert!((r1 - s.norm() * r0).abs() <= 1e-10 * r1.max(1e-300));
        }
    }
}
