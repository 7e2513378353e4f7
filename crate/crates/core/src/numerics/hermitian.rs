//! Hermitian (and real symmetric) eigenvalues: Householder tridiagonalization
//! followed by implicit QL on the real tridiagonal matrix. The eigenvector of
//! the smallest eigenvalue is recovered by tridiagonal inverse iteration and
//! back-transformation.

use super::{hypot, Matrix, RealMatrix, Scalar, Tolerances};
use crate::error::{Error, Result};

/// Ascending spectrum and, on request, a unit eigenvector for its minimum.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<f64>,
    pub min_vector: Option<Vec<T>>,
}

struct Tridiagonal<T> {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Unitary diagonal making the off-diagonal real and nonnegative.
    phases: Vec<T>,
    /// Householder vectors (v, τ) for steps k = 0.., acting on indices k+1..n.
    reflectors: Vec<Option<(Vec<T>, f64)>>,
}

fn check_hermitian<T: Scalar>(a: &Matrix<T>, tol: &Tolerances) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = a.hermitian_defect();
    if defect > tol.hermitian * (1.0 + a.max_abs()) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

fn tridiagonalize<T: Scalar>(mut a: Matrix<T>, keep_reflectors: bool) -> Tridiagonal<T> {
    let n = a.rows();
    let mut diag = vec![0.0; n];
    let mut off_c = vec![T::zero(); n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    let mut v: Vec<T> = Vec::with_capacity(n);
    let mut p: Vec<T> = vec![T::zero(); n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        v.clear();
        // column k below the diagonal, read from row k via Hermitian symmetry
        v.extend(a.row(k)[k + 1..].iter().map(|x| x.conj()));
        let tail: f64 = v[1..].iter().map(|x| x.abs2()).sum();
        diag[k] = a[(k, k)].re();
        if tail == 0.0 {
            off_c[k] = v[0];
            if keep_reflectors {
                reflectors.push(None);
            }
            continue;
        }
        let norm = (v[0].abs2() + tail).sqrt();
        let phase = if v[0].abs() > 0.0 {
            v[0].scale(1.0 / v[0].abs())
        } else {
            T::one()
        };
        let alpha = -(phase.scale(norm));
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x.abs2()).sum();
        let tau = 2.0 / vnorm2;

        // p = τ A22 v
        for i in 0..len {
            let row = &a.row(k + 1 + i)[k + 1..];
            let mut s = T::zero();
            for (x, &y) in row.iter().zip(v.iter()) {
                s += *x * y;
            }
            p[i] = s.scale(tau);
        }
        // K = τ/2 · vᴴp (real for Hermitian A22)
        let mut vp = T::zero();
        for i in 0..len {
            vp += v[i].conj() * p[i];
        }
        let kk = 0.5 * tau * vp.re();
        for i in 0..len {
            p[i] -= v[i].scale(kk);
        }
        // A22 -= v wᴴ + w vᴴ
        for i in 0..len {
            let vi = v[i];
            let wi = p[i];
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for j in 0..len {
                row[j] -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        off_c[k] = alpha;
        if keep_reflectors {
            reflectors.push(Some((v.clone(), tau)));
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2, n - 2)].re();
        off_c[n - 2] = a[(n - 1, n - 2)];
    }
    if n >= 1 {
        diag[n - 1] = a[(n - 1, n - 1)].re();
    }

    let mut phases = vec![T::one(); n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(1) {
        let e = off_c[k];
        let m = e.abs();
        off[k] = m;
        phases[k + 1] = if m > 0.0 {
            phases[k] * e.scale(1.0 / m)
        } else {
            phases[k]
        };
    }
    Tridiagonal {
        diag,
        off,
        phases,
        reflectors,
    }
}

/// Implicit QL iteration on a symmetric tridiagonal matrix (eigenvalues only).
fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(off);
    let max_iter = tol.sweeps_per_dim * n.max(1);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence(iter));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Solves `(T - λI) x = b` for tridiagonal `T` by LU with partial pivoting.
fn shifted_tridiagonal_solve(diag: &[f64], off: &[f64], lambda: f64, b: &mut [f64]) {
    let n = diag.len();
    let tiny = f64::EPSILON * (1.0 + diag.iter().chain(off).fold(0.0f64, |m, x| m.max(x.abs())));
    let mut d: Vec<f64> = diag.iter().map(|x| x - lambda).collect();
    if n == 1 {
        if d[0] == 0.0 {
            d[0] = tiny;
        }
        b[0] /= d[0];
        return;
    }
    let mut du = off.to_vec();
    let mut dl = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for i in 0..n - 1 {
        if swapped[i] {
            let temp = b[i];
            b[i] = b[i + 1];
            b[i + 1] = temp - dl[i] * b[i];
        } else {
            b[i + 1] -= dl[i] * b[i];
        }
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

fn min_eigenvector<T: Scalar>(tri: &Tridiagonal<T>, lambda: f64) -> Vec<T> {
    let n = tri.diag.len();
    let scale = tri.diag.iter().chain(&tri.off).fold(0.0f64, |m, x| m.max(x.abs()));
    let shift = lambda - 4.0 * f64::EPSILON * (1.0 + scale);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64).collect();
    for _ in 0..4 {
        shifted_tridiagonal_solve(&tri.diag, &tri.off, shift, &mut x);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx == 0.0 || !nx.is_finite() {
            break;
        }
        x.iter_mut().for_each(|v| *v /= nx);
    }
    // back to the Hermitian basis: y = Q D x
    let mut y: Vec<T> = x
        .iter()
        .zip(&tri.phases)
        .map(|(&xi, &ph)| ph.scale(xi))
        .collect();
    for (k, refl) in tri.reflectors.iter().enumerate().rev() {
        if let Some((v, tau)) = refl {
            let seg = &mut y[k + 1..];
            let mut s = T::zero();
            for (vi, yi) in v.iter().zip(seg.iter()) {
                s += vi.conj() * *yi;
            }
            let s = s.scale(*tau);
            for (vi, yi) in v.iter().zip(seg.iter_mut()) {
                *yi -= *vi * s;
            }
        }
    }
    let ny = y.iter().map(|v| v.abs2()).sum::<f64>().sqrt();
    if ny > 0.0 {
        y.iter_mut().for_each(|v| *v = v.scale(1.0 / ny));
    }
    y
}

/// Real spectrum of a Hermitian matrix, ascending.
pub fn hermitian_eigs<T: Scalar>(a: &Matrix<T>) -> Result<Vec<f64>> {
    let tol = Tolerances::default();
    check_hermitian(a, &tol)?;
    let tri = tridiagonalize(a.clone(), false);
    tridiagonal_eigenvalues(&tri.diag, &tri.off, &tol)
}

/// Spectrum plus a unit eigenvector of the minimum eigenvalue.
pub fn hermitian_min_eigpair<T: Scalar>(a: &Matrix<T>) -> Result<HermitianEigen<T>> {
    let tol = Tolerances::default();
    check_hermitian(a, &tol)?;
    if a.rows() == 0 {
        return Ok(HermitianEigen {
            values: vec![],
            min_vector: None,
        });
    }
    let tri = tridiagonalize(a.clone(), true);
    let values = tridiagonal_eigenvalues(&tri.diag, &tri.off, &tol)?;
    let v = min_eigenvector(&tri, values[0]);
    Ok(HermitianEigen {
        values,
        min_vector: Some(v),
    })
}

/// Eigenvalues of `(A + Aᵀ)/2`, ascending. No symmetry check; callers pass
/// matrices that are symmetric up to roundoff.
pub fn symmetric_eigenvalues(a: &RealMatrix) -> Result<Vec<f64>> {
    let mut s = a.clone();
    s.symmetrize();
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let tri = tridiagonalize(s, false);
    tridiagonal_eigenvalues(&tri.diag, &tri.off, &Tolerances::default())
}
