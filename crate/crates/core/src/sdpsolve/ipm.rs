use rayon::prelude::*;
use serde::Serialize;

use super::check::{check_solution, verify_primal_ray};
use super::problem::{SdpProblem, SparseSym};
use crate::error::{Error, Result};
use crate::numerics::{cholesky, symmetric_eigenvalues, Cholesky, LuFactor, RealMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Dual objective growth, relative to the data, at which a failed ray
    /// check stops the run.
    pub infeas_growth: f64,
    pub step_fraction: f64,
    /// Largest real PSD block attempted.
    pub max_block: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feas_tol: 1e-10,
            gap_tol: 1e-10,
            max_iter: 100,
            infeas_growth: 1e8,
            step_fraction: 0.98,
            max_block: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolverStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub status: SolverStatus,
    pub x: RealMatrix,
    /// Dual vector over all original rows (zero on removed rows).
    pub y: Vec<f64>,
    pub z: RealMatrix,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `⟨X, Z⟩ / block`.
    pub gap: f64,
    /// `‖A(X) − b‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖C − Σ yA − Z‖ / (1 + ‖C‖)`.
    pub dual_residual: f64,
    pub iterations: usize,
    /// Rows dropped as linearly dependent before solving.
    pub removed_rows: Vec<usize>,
    /// Normalized Farkas ray (`bᵀy = 1`, `Σ yA ⪯ 0`) on primal infeasibility.
    pub ray: Option<Vec<f64>>,
    pub message: String,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn frob(a: &RealMatrix, b: &RealMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

fn sym(a: &RealMatrix) -> RealMatrix {
    let mut s = a.clone();
    s.symmetrize();
    s
}

/// Indices of a maximal independent subset of rows, by greedy pivoted
/// Cholesky on the Gram matrix `⟨A_i, A_j⟩`.
fn independent_rows(a: &[SparseSym]) -> Vec<usize> {
    let m = a.len();
    let mut sorted: Vec<SparseSym> = a.to_vec();
    sorted.iter_mut().for_each(SparseSym::canonicalize);
    let gram: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| sorted[i].dot_sparse(&sorted[j])).collect())
        .collect();
    let scale = (0..m).fold(0.0f64, |s, i| s.max(gram[i][i]));
    let mut kept: Vec<usize> = Vec::new();
    let mut l: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        // column-by-column projection against the kept rows
        let mut row = Vec::with_capacity(kept.len());
        for r in 0..kept.len() {
            let s = gram[i][kept[r]] - dot(&row[..r], &l[r][..r]);
            row.push(s / l[r][r]);
        }
        let d = gram[i][i] - dot(&row, &row);
        if d > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            row.push(d.sqrt());
            l.push(row);
            kept.push(i);
        }
    }
    kept
}

struct Workspace<'a> {
    a: Vec<&'a SparseSym>,
    b: Vec<f64>,
    c: RealMatrix,
    nb: usize,
}

impl Workspace<'_> {
    fn apply(&self, x: &RealMatrix) -> Vec<f64> {
        self.a.iter().map(|ai| ai.dot(x)).collect()
    }

    fn adjoint(&self, y: &[f64]) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.nb, self.nb);
        for (ai, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                ai.add_to(&mut out, yi);
            }
        }
        out
    }

    /// `M_ij = ⟨A_i, X A_j Z⁻¹⟩`.
    fn schur(&self, x: &RealMatrix, zi: &RealMatrix) -> RealMatrix {
        let m = self.a.len();
        let nb = self.nb;
        let cols: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map_init(
                || RealMatrix::zeros(nb, nb),
                |w, j| {
                    w.as_mut_slice().iter_mut().for_each(|v| *v = 0.0);
                    for &(p, q, v) in self.a[j].entries() {
                        outer_add(w, x, zi, p, q, v);
                        if p != q {
                            outer_add(w, x, zi, q, p, v);
                        }
                    }
                    self.a.iter().map(|ai| ai.dot(w)).collect()
                },
            )
            .collect();
        RealMatrix::from_fn(m, m, |i, j| 0.5 * (cols[j][i] + cols[i][j]))
    }
}

/// `W += v · X[:, p] Z⁻¹[q, :]`.
fn outer_add(w: &mut RealMatrix, x: &RealMatrix, zi: &RealMatrix, p: usize, q: usize, v: f64) {
    let nb = x.rows();
    let zrow = zi.row(q);
    for r in 0..nb {
        let a = v * x[(r, p)];
        if a == 0.0 {
            continue;
        }
        for (o, &z) in w.row_mut(r).iter_mut().zip(zrow) {
            *o += a * z;
        }
    }
}

enum SchurSolver {
    Chol(Cholesky<f64>),
    Lu(LuFactor<f64>),
}

impl SchurSolver {
    fn new(m: &RealMatrix) -> Self {
        match cholesky(m) {
            Ok(c) => SchurSolver::Chol(c),
            Err(_) => SchurSolver::Lu(LuFactor::new(m)),
        }
    }

    fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match self {
            SchurSolver::Chol(c) => Ok(c.solve(rhs)),
            SchurSolver::Lu(l) => l.solve(rhs),
        }
    }
}

/// Largest `α` with `X + α dX ⪰ 0` (infinite if `dX ⪰ 0`).
fn max_step(chol: &Cholesky<f64>, dx: &RealMatrix) -> Result<f64> {
    let b = chol.solve_lower_matrix(dx);
    let w = chol.solve_lower_matrix(&b.transpose());
    let lmin = symmetric_eigenvalues(&w)?[0];
    Ok(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
}

/// Largest eigenvalue of a symmetric matrix.
fn lambda_max(a: &RealMatrix) -> Result<f64> {
    Ok(*symmetric_eigenvalues(a)?.last().unwrap_or(&0.0))
}

/// Primal-dual interior-point method (HKM direction, Mehrotra
/// predictor-corrector). Optimal results are re-verified by the independent
/// checker before being reported.
pub fn solve(p: &SdpProblem, cfg: &SolverConfig) -> Result<SolverResult> {
    let nb = p.block();
    if nb > cfg.max_block {
        return Err(Error::TooLarge {
            block: nb,
            limit: cfg.max_block,
        });
    }
    if !p.is_consistent() {
        return Err(Error::DimensionMismatch {
            expected: p.a.len(),
            got: p.b.len(),
        });
    }
    let keep = independent_rows(&p.a);
    let removed: Vec<usize> = (0..p.a.len()).filter(|i| keep.binary_search(i).is_err()).collect();
    let ws = Workspace {
        a: keep.iter().map(|&i| &p.a[i]).collect(),
        b: keep.iter().map(|&i| p.b[i]).collect(),
        c: p.c.to_dense(),
        nb,
    };
    let m = ws.a.len();
    let b_norm = norm2(&ws.b);
    let c_norm = ws.c.norm_fro();

    let tau = 1.0 + b_norm + c_norm;
    let mut x = RealMatrix::identity(nb).scaled(tau);
    let mut z = RealMatrix::identity(nb).scaled(tau);
    let mut y = vec![0.0; m];

    let expand = |y: &[f64]| {
        let mut full = vec![0.0; p.a.len()];
        for (&i, &v) in keep.iter().zip(y) {
            full[i] = v;
        }
        full
    };

    let mut status = SolverStatus::IterationLimit;
    let mut ray = None;
    let mut message = String::from("iteration limit reached");
    let mut iterations = 0;

    for it in 0..=cfg.max_iter {
        iterations = it;
        let ax = ws.apply(&x);
        let rp: Vec<f64> = ws.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut rd = &ws.c - &ws.adjoint(&y);
        rd = &rd - &z;
        let pobj = frob(&ws.c, &x);
        let dobj = dot(&ws.b, &y);
        let xz = frob(&x, &z);
        let mu = xz / nb as f64;
        let pres = norm2(&rp) / (1.0 + b_norm);
        let dres = rd.norm_fro() / (1.0 + c_norm);

        if pres <= cfg.feas_tol
            && dres <= cfg.feas_tol
            && xz <= cfg.gap_tol * (1.0 + pobj.abs() + dobj.abs())
        {
            status = SolverStatus::Optimal;
            message = "converged".into();
            break;
        }
        if dobj > 0.0 && pres > cfg.feas_tol {
            let ybar: Vec<f64> = y.iter().map(|v| v / dobj).collect();
            if lambda_max(&ws.adjoint(&ybar))? <= cfg.feas_tol {
                let full = expand(&ybar);
                if verify_primal_ray(p, &full, cfg.feas_tol) {
                    status = SolverStatus::PrimalInfeasible;
                    message = "primal infeasible: Farkas ray found".into();
                    ray = Some(full);
                    break;
                }
            }
        }
        if pobj < 0.0 && dres > cfg.feas_tol {
            let xbar = x.scaled(-1.0 / pobj);
            let r = norm2(&ws.apply(&xbar));
            if r <= cfg.feas_tol && frob(&ws.c, &xbar) < 0.0 {
                status = SolverStatus::DualInfeasible;
                message = "dual infeasible: improving primal ray found".into();
                break;
            }
        }
        if dobj.abs() > cfg.infeas_growth * (1.0 + c_norm + b_norm) * tau
            || pobj.abs() > cfg.infeas_growth * (1.0 + c_norm + b_norm) * tau
        {
            message = "iterates diverged without a valid ray".into();
            break;
        }
        if it == cfg.max_iter {
            break;
        }

        let (xc, zc) = match (cholesky(&x), cholesky(&z)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                message = "iterate left the cone numerically".into();
                break;
            }
        };
        let zi = sym(&zc.inverse());
        let schur = SchurSolver::new(&ws.schur(&x, &zi));
        let xrdzi = x.matmul(&rd).matmul(&zi);
        let a_xrdzi = ws.apply(&xrdzi);

        let direction = |t: &RealMatrix| -> Result<(RealMatrix, Vec<f64>, RealMatrix)> {
            let at = ws.apply(t);
            let rhs: Vec<f64> = (0..m).map(|i| rp[i] - at[i] + a_xrdzi[i]).collect();
            let dy = schur.solve(&rhs)?;
            let dz = &rd - &ws.adjoint(&dy);
            let dx = sym(&(t - &x.matmul(&dz).matmul(&zi)));
            Ok((dx, dy, dz))
        };

        // predictor
        let t_aff = x.scaled(-1.0);
        let (dxa, _dya, dza) = direction(&t_aff)?;
        let ap = (cfg.step_fraction * max_step(&xc, &dxa)?).min(1.0);
        let ad = (cfg.step_fraction * max_step(&zc, &dza)?).min(1.0);
        let mut xa = x.clone();
        xa.add_scaled(&dxa, ap);
        let mut za = z.clone();
        za.add_scaled(&dza, ad);
        let mu_aff = frob(&xa, &za) / nb as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let mut t = zi.scaled(sigma * mu);
        t = &t - &x;
        t = &t - &dxa.matmul(&dza).matmul(&zi);
        let (dx, dy, dz) = direction(&t)?;
        let ap = (cfg.step_fraction * max_step(&xc, &dx)?).min(1.0);
        let ad = (cfg.step_fraction * max_step(&zc, &dz)?).min(1.0);
        x.add_scaled(&dx, ap);
        x.symmetrize();
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
        z.add_scaled(&dz, ad);
        z.symmetrize();
    }

    let y_full = expand(&y);
    let mut result = SolverResult {
        status,
        primal_objective: frob(&ws.c, &x),
        dual_objective: dot(&ws.b, &y),
        gap: frob(&x, &z) / nb as f64,
        primal_residual: 0.0,
        dual_residual: 0.0,
        x,
        y: y_full,
        z,
        iterations,
        removed_rows: removed,
        ray,
        message,
    };
    let report = check_solution(p, &result.x, &result.y, &result.z, cfg);
    result.primal_residual = report.primal_residual;
    result.dual_residual = report.dual_residual;
    if result.status == SolverStatus::Optimal && !report.passed {
        result.status = SolverStatus::IterationLimit;
        result.message = format!("post-hoc check failed: {}", report.reason);
    }
    Ok(result)
}
