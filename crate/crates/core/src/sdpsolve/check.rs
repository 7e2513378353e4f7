use serde::Serialize;

use super::ipm::SolverConfig;
use super::problem::SdpProblem;
use crate::numerics::{cholesky, symmetric_eigenvalues, RealMatrix};

/// Outcome of the independent post-hoc verification of a primal-dual pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub x_psd: bool,
    pub z_psd: bool,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub reason: String,
}

/// Cholesky of `A + δI` with `δ = tol·(1 + max|A|)`.
fn psd_to_tolerance(a: &RealMatrix, tol: f64) -> bool {
    let mut shifted = a.clone();
    let delta = tol * (1.0 + a.max_abs());
    for i in 0..a.rows() {
        shifted[(i, i)] += delta;
    }
    a.is_finite() && cholesky(&shifted).is_ok()
}

/// Recomputes residuals from the original data and tests both cones.
pub fn check_solution(
    p: &SdpProblem,
    x: &RealMatrix,
    y: &[f64],
    z: &RealMatrix,
    cfg: &SolverConfig,
) -> CheckReport {
    let nb = p.block();
    let b_norm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c = p.c.to_dense();
    let primal: f64 = p
        .a
        .iter()
        .zip(&p.b)
        .map(|(ai, bi)| (ai.dot(x) - bi).powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + b_norm);
    let mut rd = &c - &p.adjoint(y);
    rd = &rd - z;
    let dual = rd.norm_fro() / (1.0 + c.norm_fro());
    let xz: f64 = x.as_slice().iter().zip(z.as_slice()).map(|(a, b)| a * b).sum();
    let pobj: f64 = p.c.dot(x);
    let dobj: f64 = p.b.iter().zip(y).map(|(a, b)| a * b).sum();
    let gap = xz / nb.max(1) as f64;
    let x_psd = psd_to_tolerance(x, cfg.feas_tol);
    let z_psd = psd_to_tolerance(z, cfg.feas_tol);

    let mut reasons = Vec::new();
    if !x_psd {
        reasons.push("X is not PSD".to_string());
    }
    if !z_psd {
        reasons.push("Z is not PSD".to_string());
    }
    if !(primal <= cfg.feas_tol) {
        reasons.push(format!("primal residual {primal:e}"));
    }
    if !(dual <= cfg.feas_tol) {
        reasons.push(format!("dual residual {dual:e}"));
    }
    if !(gap <= cfg.gap_tol * (1.0 + pobj.abs() + dobj.abs())) {
        reasons.push(format!("complementarity gap {gap:e}"));
    }
    CheckReport {
        passed: reasons.is_empty(),
        x_psd,
        z_psd,
        primal_residual: primal,
        dual_residual: dual,
        gap,
        reason: reasons.join("; "),
    }
}

/// `bᵀy > 0` and `λ_max(Σ y_i A_i) ≤ tol · bᵀy`: no PSD `X` can satisfy `A(X) = b`.
pub fn verify_primal_ray(p: &SdpProblem, y: &[f64], tol: f64) -> bool {
    let by: f64 = p.b.iter().zip(y).map(|(a, b)| a * b).sum();
    if !(by > 0.0) || y.len() != p.a.len() {
        return false;
    }
    match symmetric_eigenvalues(&p.adjoint(y)) {
        Ok(ev) => ev.last().is_none_or(|&l| l <= tol * by),
        Err(_) => false,
    }
}
