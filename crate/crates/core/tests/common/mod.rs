#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strongcert::numerics::{hermitian_eigs, spectral_radius, ComplexMatrix};
use strongcert::trigpoly::{MultiIndex, TrigPoly};
use strongcert::DelaySystem;

pub type Poly = BTreeMap<Vec<i32>, Complex64>;

pub fn load(name: &str) -> DelaySystem {
    DelaySystem::from_json_file(format!("{}/examples/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, complex: bool) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
        Complex64::new(rng.gen_range(-1.0..1.0), im)
    })
}

/// Random system; with `target`, scaled so that `r_σ(Σ Hₖ) = target`.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize, m: usize, target: Option<f64>, complex: bool) -> DelaySystem {
    let h: Vec<ComplexMatrix> = (0..m).map(|_| random_matrix(rng, n, complex)).collect();
    let sys = DelaySystem::new(h).unwrap();
    match target {
        Some(t) => {
            let r = spectral_radius(&sys.symbol(&vec![0.0; m])).unwrap().max(1e-3);
            sys.scaled(t / r)
        }
        None => sys,
    }
}

pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    let g = a.adjoint().matmul(a);
    hermitian_eigs(&g).unwrap().last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Random real system with `Σₖ ‖Hₖ‖₂ = total`.
pub fn contractive_system(rng: &mut ChaCha8Rng, n: usize, m: usize, total: f64) -> DelaySystem {
    let h: Vec<ComplexMatrix> = (0..m).map(|_| random_matrix(rng, n, false)).collect();
    let weights: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let h = h
        .iter()
        .zip(&weights)
        .map(|(a, w)| a.scaled(Complex64::new(total * w / wsum / spectral_norm(a), 0.0)))
        .collect();
    DelaySystem::new(h).unwrap()
}

/// Real-valued trigonometric polynomial with per-variable degree ≤ `deg`.
pub fn random_trig_poly(rng: &mut ChaCha8Rng, m: usize, deg: i32) -> TrigPoly {
    let side = (2 * deg + 1) as usize;
    let mut terms = Vec::new();
    for code in 0..side.pow(m as u32) {
        let mut c = code;
        let mut e = vec![0i32; m];
        for slot in e.iter_mut().rev() {
            *slot = (c % side) as i32 - deg;
            c /= side;
        }
        let alpha = MultiIndex::new(e);
        if alpha.is_zero() {
            terms.push((alpha, Complex64::new(rng.gen_range(-1.0..3.0), 0.0)));
        } else if alpha.is_canonical() && rng.gen_bool(0.6) {
            let v = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            terms.push((alpha.neg(), v.conj()));
            terms.push((alpha, v));
        }
    }
    TrigPoly::from_terms(m, terms).unwrap()
}

fn real_at(h: &TrigPoly, t: &[f64]) -> f64 {
    h.eval_angles(t).re
}

/// Dense-grid minimum (3600 points for one variable, 360² for two) polished
/// by a pattern search from the five best grid points.
pub fn torus_minimum(h: &TrigPoly) -> f64 {
    let m = h.nvars();
    let per: usize = if m == 1 { 3600 } else { 360 };
    let mut pts: Vec<(f64, Vec<f64>)> = (0..per.pow(m as u32))
        .map(|mut c| {
            let mut t = vec![0.0; m];
            for slot in t.iter_mut().rev() {
                *slot = TAU * (c % per) as f64 / per as f64;
                c /= per;
            }
            (real_at(h, &t), t)
        })
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = pts[0].0;
    for (v, t) in pts.into_iter().take(5) {
        let (mut t, mut v, mut step) = (t, v, TAU / per as f64);
        while step > 1e-10 {
            let mut moved = false;
            for d in 0..m {
                for s in [step, -step] {
                    let mut u = t.clone();
                    u[d] += s;
                    let w = real_at(h, &u);
                    if w < v {
                        v = w;
                        t = u;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.min(v);
    }
    best
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<i32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_default() += ca * cb;
        }
    }
    out
}

/// Laplace expansion along the first row.
pub fn poly_det(a: &[Vec<Poly>]) -> Poly {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut out = Poly::new();
    for j in 0..n {
        let minor: Vec<Vec<Poly>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect())
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        for (e, c) in poly_mul(&a[0][j], &poly_det(&minor)) {
            *out.entry(e).or_default() += c * sign;
        }
    }
    out
}

/// Permutation-sum determinant.
pub fn leibniz_det(a: &ComplexMatrix) -> Complex64 {
    fn perms(k: usize, used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                perms(k, used, cur, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let n = a.rows();
    let mut all = Vec::new();
    perms(n, &mut vec![false; n], &mut Vec::new(), &mut all);
    all.iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (0..n).fold(Complex64::new(sign, 0.0), |acc, i| acc * a[(i, p[i])])
        })
        .sum()
}
