//! Upper bounds on `min_z λ_min(H(z))` from localizing matrices of the uniform
//! measure on the torus.
//!
//! The moments of the uniform measure are `y_α = δ_α`, so the moment matrix is
//! the identity and the generalized eigenproblem reduces to a Hermitian one:
//! `h̄_k = λ_min(L_k)` with `L_k[(β,i),(γ,j)] = H_{β−γ,ij}`. For any vector
//! `q`, `qᴴ L_k q = ∫ v(z)ᴴ H(z) v(z) dν ≥ min_z λ_min(H(z)) ∫ |v|² dν`, so
//! `h̄_k` is an upper bound and a negative `h̄_k` refutes positivity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chardet::grid_indices;
use crate::error::{Error, Result};
use crate::hermite::HermiteMatrix;
use crate::numerics::{hermitian_eigs, hermitian_min_eigpair, ComplexMatrix};
use crate::sosgram::MonomialBasis;
use crate::trigpoly::{TrigPoly, TrigPolyMatrix};

/// Refutation threshold on `h̄_k`.
pub const REFUTE_THRESHOLD: f64 = -1e-9;

/// Moments of the uniform probability measure on the `m`-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentSpec {
    pub nvars: usize,
}

impl MomentSpec {
    pub fn new(nvars: usize) -> Self {
        Self { nvars }
    }

    pub fn moment(&self, alpha: &[i32]) -> f64 {
        if alpha.iter().all(|&a| a == 0) {
            1.0
        } else {
            0.0
        }
    }

    /// `M_k(y)[β,γ] = y_{γ−β}`, the identity of size `(k+1)^m`.
    pub fn moment_matrix(&self, k: usize) -> ComplexMatrix {
        let basis = MonomialBasis::new(self.nvars, k);
        ComplexMatrix::from_fn(basis.len(), basis.len(), |p, q| {
            let d: Vec<i32> = basis
                .get(q)
                .as_slice()
                .iter()
                .zip(basis.get(p).as_slice())
                .map(|(g, b)| g - b)
                .collect();
            Complex64::new(self.moment(&d), 0.0)
        })
    }
}

#[derive(Debug, Clone)]
pub struct LocalizingMatrix {
    pub k: usize,
    pub basis: MonomialBasis,
    /// Block size `n` of the localized polynomial matrix.
    pub n: usize,
    pub matrix: ComplexMatrix,
}

impl LocalizingMatrix {
    pub fn new(h: &TrigPolyMatrix, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidOrder("localizing order must be at least 1".into()));
        }
        check_hermitian(h)?;
        let n = h.dim();
        let basis = MonomialBasis::new(h.nvars(), k);
        let s = basis.len() * n;
        let mut matrix = ComplexMatrix::zeros(s, s);
        for (pb, beta) in basis.monomials().iter().enumerate() {
            for (pg, gamma) in basis.monomials().iter().enumerate() {
                let c = h.coefficient(&beta.sub(gamma));
                for i in 0..n {
                    for j in 0..n {
                        matrix[(pb * n + i, pg * n + j)] = c[(i, j)];
                    }
                }
            }
        }
        Ok(Self { k, basis, n, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `v(θ) = Σ_β q_β e^{i β·θ}` for a coefficient vector `q` of length `dim`.
    pub fn probe_value(&self, q: &[Complex64], theta: &[f64]) -> Vec<Complex64> {
        let b = self.basis.eval(theta);
        let mut v = vec![Complex64::default(); self.n];
        for (pb, zb) in b.iter().enumerate() {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += zb * q[pb * self.n + i];
            }
        }
        v
    }
}

fn check_hermitian(h: &TrigPolyMatrix) -> Result<()> {
    if h.is_hermitian(1e-10) {
        return Ok(());
    }
    let defect = h
        .support()
        .iter()
        .map(|a| {
            let c = h.coefficient(a);
            let ct = h.coefficient(&a.neg()).adjoint();
            (&c - &ct).max_abs()
        })
        .fold(0.0, f64::max);
    Err(Error::NotHermitian(defect))
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    pub k: usize,
    /// `h̄_k`.
    pub value: f64,
    /// Unit eigenvector of `h̄_k`, indexed as `(β, i)`.
    #[serde(skip)]
    pub probe: Vec<Complex64>,
}

/// `h̄_k` for a Hermitian trigonometric matrix.
pub fn upper_bound(h: &TrigPolyMatrix, k: usize) -> Result<UpperBound> {
    let l = LocalizingMatrix::new(h, k)?;
    let e = hermitian_min_eigpair(&l.matrix)?;
    Ok(UpperBound {
        k,
        value: e.values[0],
        probe: e.min_vector.unwrap_or_default(),
    })
}

/// `h̄_k` for a real-valued scalar trigonometric polynomial.
pub fn upper_bound_scalar(h: &TrigPoly, k: usize) -> Result<UpperBound> {
    upper_bound(&TrigPolyMatrix::from_scalar(h.clone()), k)
}

/// `h̄_k` for `1 ≤ k ≤ k_max`; eigenvalues only, computed in parallel.
pub fn upper_bound_hierarchy(h: &TrigPolyMatrix, k_max: usize) -> Result<Vec<(usize, f64)>> {
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let l = LocalizingMatrix::new(h, k)?;
            Ok((k, hermitian_eigs(&l.matrix)?[0]))
        })
        .collect()
}

/// Explicit torus point where `H` has a negative eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// Angles of the Hermite variables `z = e^{iθ}`.
    pub z_angles: Vec<f64>,
    /// The same point in the grid-scan convention `θ_scan = −θ_z`.
    pub scan_angles: Vec<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Refutation {
    pub k: usize,
    pub bound: f64,
    #[serde(skip)]
    pub probe: Vec<Complex64>,
    /// Absent only if the local search failed to find a negative point.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub enum Disproof {
    Refuted(Refutation),
    /// Every `h̄_k` up to `k_max` was at least the threshold.
    Inconclusive { bounds: Vec<(usize, f64)> },
}

fn lambda_min(h: &TrigPolyMatrix, theta: &[f64]) -> f64 {
    hermitian_eigs(&h.eval_angles(theta)).map_or(f64::INFINITY, |v| v[0])
}

fn wrap(a: f64) -> f64 {
    a.rem_euclid(TAU)
}

/// Coordinate pattern search minimizing `λ_min(H(θ))`.
fn pattern_search(h: &TrigPolyMatrix, start: Vec<f64>, step: f64) -> (Vec<f64>, f64) {
    let mut best = start;
    let mut val = lambda_min(h, &best);
    let mut step = step;
    while step > 1e-7 {
        let mut improved = false;
        for d in 0..best.len() {
            for sign in [1.0, -1.0] {
                let mut t = best.clone();
                t[d] = wrap(t[d] + sign * step);
                let v = lambda_min(h, &t);
                if v < val {
                    best = t;
                    val = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, val)
}

/// Searches for a torus point with `λ_min(H) < 0`, seeded by the grid minima of
/// `λ_min(H(θ))` and of the probe's Rayleigh quotient.
pub fn find_witness(h: &TrigPolyMatrix, k: usize, probe: &[Complex64]) -> Result<Option<Witness>> {
    let m = h.nvars();
    let l = LocalizingMatrix::new(h, k)?;
    let per_dim = ((20_000f64).powf(1.0 / m.max(1) as f64).floor() as usize).clamp(8, 64);
    let points: Vec<Vec<usize>> = grid_indices(per_dim, m).collect();
    let angle = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| TAU * i as f64 / per_dim as f64).collect() };
    let evals: Vec<(f64, f64)> = points
        .par_iter()
        .map(|idx| {
            let t = angle(idx);
            let hm = h.eval_angles(&t);
            let lmin = hermitian_eigs(&hm).map_or(f64::INFINITY, |v| v[0]);
            let v = l.probe_value(probe, &t);
            let hv = hm.mat_vec(&v);
            let num: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
            let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            let rq = if den > 1e-300 { num.re / den } else { f64::INFINITY };
            (lmin, rq)
        })
        .collect();
    let argmin = |f: &dyn Fn(&(f64, f64)) -> f64| {
        (0..evals.len())
            .min_by(|&a, &b| f(&evals[a]).total_cmp(&f(&evals[b])))
            .unwrap_or(0)
    };
    let seeds = [argmin(&|e| e.0), argmin(&|e| e.1)];
    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in seeds {
        let (t, v) = pattern_search(h, angle(&points[s]), TAU / per_dim as f64);
        if best.as_ref().is_none_or(|b| v < b.1) {
            best = Some((t, v));
        }
    }
    Ok(best.filter(|b| b.1 < 0.0).map(|(t, v)| Witness {
        scan_angles: t.iter().map(|&a| wrap(-a)).collect(),
        z_angles: t,
        min_eigenvalue: v,
    }))
}

/// Runs the hierarchy up to `k_max` and stops at the first `h̄_k < −1e-9`.
pub fn disprove_positivity(h: &HermiteMatrix, k_max: usize) -> Result<Disproof> {
    disprove_matrix(&h.h, k_max)
}

pub fn disprove_matrix(h: &TrigPolyMatrix, k_max: usize) -> Result<Disproof> {
    if k_max == 0 {
        return Err(Error::InvalidOrder("k_max must be at least 1".into()));
    }
    let mut bounds = Vec::new();
    for k in 1..=k_max {
        let ub = upper_bound(h, k)?;
        if ub.value < REFUTE_THRESHOLD {
            let witness = find_witness(h, k, &ub.probe)?;
            return Ok(Disproof::Refuted(Refutation {
                k,
                bound: ub.value,
                probe: ub.probe,
                witness,
            }));
        }
        bounds.push((k, ub.value));
    }
    Ok(Disproof::Inconclusive { bounds })
}
