//! Brute-force estimate of the strong-stability radius
//! `γ₀ = max_θ r_σ(Σₖ Hₖ e^{−iθₖ})` on a uniform torus grid.
//!
//! The simplified scan fixes `θ_m = 0`, which loses nothing by homogeneity of
//! the spectral radius, and evaluates `N^{m−1}` eigenproblems.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigs, EigenWorkspace};
use crate::system::DelaySystem;
use crate::trigpoly::TorusPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    /// Points per dimension.
    pub n_points: usize,
    /// Fix the last angle at zero.
    pub use_simplified: bool,
    /// Local refinement passes around the coarse argmax.
    pub refine: usize,
    /// Keep every grid value for export.
    pub keep_surface: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            n_points: 360,
            use_simplified: true,
            refine: 1,
            keep_surface: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    /// Maximum over the coarse grid.
    pub gamma0_estimate: f64,
    /// Coarse argmax as a full `m`-dimensional torus point.
    pub argmax: TorusPoint,
    /// Maximum after local refinement; never below the coarse value.
    pub refined_estimate: f64,
    pub refined_argmax: TorusPoint,
    pub n_points: usize,
    /// Number of angles varied on the grid.
    pub scanned_dims: usize,
    pub simplified: bool,
    /// Coarse eigenproblems solved, `N^{scanned_dims}`.
    pub eigenproblems: usize,
    pub refinement_eigenproblems: usize,
    /// Grid points whose eigenproblem failed (skipped, flat indices).
    pub failures: Vec<usize>,
    #[serde(skip)]
    pub surface: Option<Vec<f64>>,
}

/// `r_σ(Σₖ Hₖ e^{−iθₖ})` at a full torus point.
pub fn spectral_radius_at(sys: &DelaySystem, theta: &[f64]) -> Result<f64> {
    if theta.len() != sys.m() {
        return Err(Error::DimensionMismatch {
            expected: sys.m(),
            got: theta.len(),
        });
    }
    let mut ws = EigenWorkspace::new();
    radius(&mut ws, sys, theta)
}

fn radius(ws: &mut EigenWorkspace, sys: &DelaySystem, theta: &[f64]) -> Result<f64> {
    let a = sys.symbol(theta);
    Ok(ws
        .eigenvalues(&a)?
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm())))
}

struct Grid<'a> {
    sys: &'a DelaySystem,
    n_points: usize,
    dims: usize,
    phases: Vec<Complex64>,
}

impl Grid<'_> {
    fn angles(&self, mut flat: usize) -> Vec<f64> {
        let mut theta = vec![0.0; self.sys.m()];
        for d in (0..self.dims).rev() {
            theta[d] = TAU * (flat % self.n_points) as f64 / self.n_points as f64;
            flat /= self.n_points;
        }
        theta
    }

    fn eval(&self, ws: &mut EigenWorkspace, buf: &mut Vec<Complex64>, mut flat: usize) -> Option<f64> {
        let n = self.sys.n();
        let h = self.sys.matrices();
        buf.clear();
        buf.resize(n * n, Complex64::default());
        for d in (0..self.sys.m()).rev() {
            let ph = if d < self.dims {
                let i = flat % self.n_points;
                flat /= self.n_points;
                self.phases[i]
            } else {
                Complex64::new(1.0, 0.0)
            };
            for (b, &x) in buf.iter_mut().zip(h[d].as_slice()) {
                *b += x * ph;
            }
        }
        ws.eigenvalues_of(buf, n)
            .ok()
            .map(|ev| ev.iter().fold(0.0f64, |m, z| m.max(z.norm())))
    }
}

#[derive(Clone)]
struct Best {
    value: f64,
    index: usize,
    failures: Vec<usize>,
}

impl Best {
    fn empty() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            index: usize::MAX,
            failures: Vec::new(),
        }
    }

    fn offer(&mut self, index: usize, value: Option<f64>) {
        match value {
            Some(v) if v > self.value || (v == self.value && index < self.index) => {
                self.value = v;
                self.index = index;
            }
            Some(_) => {}
            None => self.failures.push(index),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if other.value > self.value || (other.value == self.value && other.index < self.index) {
            self.value = other.value;
            self.index = other.index;
        }
        self.failures.extend(other.failures);
        self
    }
}

pub fn scan(sys: &DelaySystem, cfg: &ScanConfig) -> Result<ScanResult> {
    if cfg.n_points < 2 {
        return Err(Error::InvalidField {
            field: "n_points".into(),
            reason: "at least 2 points per dimension are required".into(),
        });
    }
    let m = sys.m();
    let dims = if cfg.use_simplified { m - 1 } else { m };
    let grid = Grid {
        sys,
        n_points: cfg.n_points,
        dims,
        phases: (0..cfg.n_points)
            .map(|i| Complex64::cis(-TAU * i as f64 / cfg.n_points as f64))
            .collect(),
    };
    let total = cfg
        .n_points
        .checked_pow(dims as u32)
        .ok_or_else(|| Error::InvalidSystem("grid too large".into()))?;

    let init = || (EigenWorkspace::new(), Vec::new());
    let (best, surface) = if cfg.keep_surface {
        let values: Vec<Option<f64>> = (0..total)
            .into_par_iter()
            .map_init(init, |(ws, buf), i| grid.eval(ws, buf, i))
            .collect();
        let mut best = Best::empty();
        for (i, v) in values.iter().enumerate() {
            best.offer(i, *v);
        }
        (best, Some(values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()))
    } else {
        let best = (0..total)
            .into_par_iter()
            .map_init(init, |(ws, buf), i| (i, grid.eval(ws, buf, i)))
            .fold(Best::empty, |mut b, (i, v)| {
                b.offer(i, v);
                b
            })
            .reduce(Best::empty, Best::merge);
        (best, None)
    };
    let mut failures = best.failures.clone();
    failures.sort_unstable();
    if best.index == usize::MAX {
        return Err(Error::NonFinite);
    }

    let coarse_theta = grid.angles(best.index);
    let (refined_value, refined_theta, refine_count) =
        refine(sys, dims, cfg.n_points, cfg.refine, best.value, coarse_theta.clone());

    Ok(ScanResult {
        gamma0_estimate: best.value,
        argmax: TorusPoint::new(coarse_theta),
        refined_estimate: refined_value,
        refined_argmax: TorusPoint::new(refined_theta),
        n_points: cfg.n_points,
        scanned_dims: dims,
        simplified: cfg.use_simplified,
        eigenproblems: total,
        refinement_eigenproblems: refine_count,
        failures,
        surface,
    })
}

/// Each pass scans a `±h` box with spacing `h/10` around the current best,
/// starting from `h = 2π/N`; later passes shrink `h` tenfold.
fn refine(
    sys: &DelaySystem,
    dims: usize,
    n_points: usize,
    passes: usize,
    mut value: f64,
    mut theta: Vec<f64>,
) -> (f64, Vec<f64>, usize) {
    let per_dim = 21usize;
    let mut half = TAU / n_points as f64;
    let mut count = 0;
    if dims == 0 {
        return (value, theta, 0);
    }
    for _ in 0..passes {
        let total = per_dim.pow(dims as u32);
        let center = theta.clone();
        let step = half / 10.0;
        let point = |mut flat: usize| {
            let mut t = center.clone();
            for d in (0..dims).rev() {
                let off = (flat % per_dim) as f64 - 10.0;
                flat /= per_dim;
                t[d] = (center[d] + off * step).rem_euclid(TAU);
            }
            t
        };
        let best = (0..total)
            .into_par_iter()
            .map_init(EigenWorkspace::new, |ws, i| (i, radius(ws, sys, &point(i)).ok()))
            .fold(Best::empty, |mut b, (i, v)| {
                b.offer(i, v);
                b
            })
            .reduce(Best::empty, Best::merge);
        count += total;
        if best.index != usize::MAX && best.value > value {
            value = best.value;
            theta = point(best.index);
        }
        half /= 10.0;
    }
    (value, theta, count)
}

/// `Σₖ |Hₖ|` for a scalar equation, the exact `γ₀` in that case.
pub fn scalar_formula(sys: &DelaySystem) -> Result<f64> {
    if sys.n() != 1 {
        return Err(Error::NotScalar(sys.n()));
    }
    Ok(sys.matrices().iter().map(|h| h[(0, 0)].norm()).sum())
}

/// Conservative sufficient condition `Σₖ ‖Hₖ‖₂ < 1`.
pub fn norm_sufficient(sys: &DelaySystem) -> Result<bool> {
    let mut total = 0.0;
    for h in sys.matrices() {
        let gram = h.adjoint().matmul(h);
        let top = hermitian_eigs(&gram)?.last().copied().unwrap_or(0.0);
        total += top.max(0.0).sqrt();
    }
    Ok(total < 1.0)
}

/// One CSV row per grid point: scanned angles, then `r_sigma`.
pub fn export_surface(res: &ScanResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let surface = res.surface.as_ref().ok_or(Error::NoSurface)?;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        let mut header: Vec<String> = (1..=res.scanned_dims).map(|d| format!("theta{d}")).collect();
        header.push("r_sigma".into());
        writeln!(w, "{}", header.join(","))?;
        let np = res.n_points;
        for (flat, v) in surface.iter().enumerate() {
            let mut rest = flat;
            let mut idx = vec![0usize; res.scanned_dims];
            for slot in idx.iter_mut().rev() {
                *slot = rest % np;
                rest /= np;
            }
            for i in idx {
                write!(w, "{},", TAU * i as f64 / np as f64)?;
            }
            writeln!(w, "{v}")?;
        }
        w.flush()
    };
    emit().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RealMatrix;

    fn scalars(v: &[f64]) -> DelaySystem {
        DelaySystem::from_real(v.iter().map(|&x| RealMatrix::from_rows(&[vec![x]])).collect()).unwrap()
    }

    #[test]
    fn scalar_formula_examples() {
        assert!((scalar_formula(&scalars(&[0.3, -0.2, 0.1])).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(scalar_formula(&scalars(&[0.5])).unwrap(), 0.5);
        assert_eq!(scalar_formula(&scalars(&[0.0, 0.0])).unwrap(), 0.0);
        let two = DelaySystem::from_real(vec![RealMatrix::identity(2)]).unwrap();
        assert!(matches!(scalar_formula(&two), Err(Error::NotScalar(2))));
    }

    #[test]
    fn norm_condition_examples() {
        let ok = DelaySystem::from_real(vec![
            RealMatrix::identity(2).scaled(0.4),
            RealMatrix::identity(2).scaled(0.5),
        ])
        .unwrap();
        assert!(norm_sufficient(&ok).unwrap());
        let big = DelaySystem::from_real(vec![RealMatrix::diagonal(&[1.2, 0.1])]).unwrap();
        assert!(!norm_sufficient(&big).unwrap());
    }

    #[test]
    fn single_delay_is_grid_independent() {
        let sys = DelaySystem::from_real(vec![RealMatrix::from_rows(&[vec![0.2, 0.9], vec![-0.4, 0.1]])]).unwrap();
        let want = spectral_radius_at(&sys, &[0.0]).unwrap();
        for n in [2, 7, 360] {
            let cfg = ScanConfig { n_points: n, ..Default::default() };
            let r = scan(&sys, &cfg).unwrap();
            assert_eq!(r.gamma0_estimate, want);
            assert_eq!(r.eigenproblems, 1);
        }
    }

    #[test]
    fn toy_surface_has_deterministic_rows() {
        let sys = scalars(&[0.3, -0.2]);
        let cfg = ScanConfig { n_points: 4, keep_surface: true, ..Default::default() };
        let r = scan(&sys, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        export_surface(&r, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "theta1,r_sigma");
        assert!(lines[1].starts_with("0,"));
        assert_eq!(r.gamma0_estimate, r.surface.unwrap().iter().cloned().fold(f64::MIN, f64::max));
    }
}
