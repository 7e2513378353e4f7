use num_complex::Complex64;
use serde::Serialize;

use super::basis::MonomialBasis;
use super::relaxation::{alpha_box, build_relaxation, Relaxation, RelaxationDims, RelaxationMode};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigs, ComplexMatrix, RealMatrix};
use crate::sdpsolve::{solve, verify_primal_ray, SolverConfig, SolverResult, SolverStatus};
use crate::trigpoly::{MultiIndex, TrigPolyMatrix};

/// Certified strict positivity threshold for `h̲`.
pub const CERTIFY_THRESHOLD: f64 = 1e-7;

/// Gram matrix `X ⪰ 0` with `H(z) − shift·I ≈ (b_k(z) ⊗ I)ᴴ X (b_k(z) ⊗ I)`.
#[derive(Debug, Clone)]
pub struct GramCertificate {
    pub x: ComplexMatrix,
    pub basis: MonomialBasis,
    /// Matrix size `n` of the certified polynomial matrix.
    pub n: usize,
    /// The `h̲` in the identity, as returned by the solver.
    pub shift: f64,
    /// `shift` minus rigorous allowances for `λ_min(X) < 0` and the
    /// coefficient residual: a lower bound on `min_z λ_min(H(z))`.
    pub lower_bound: f64,
    /// Largest coefficient mismatch of the identity.
    pub residual: f64,
    pub min_eigenvalue: f64,
}

impl GramCertificate {
    /// `(b_k(θ) ⊗ I)ᴴ X (b_k(θ) ⊗ I) + shift · I`.
    pub fn reconstruct(&self, theta: &[f64]) -> ComplexMatrix {
        let b = self.basis.eval(theta);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n, n);
        for (pb, &zb) in b.iter().enumerate() {
            for (pg, &zg) in b.iter().enumerate() {
                let w = zb.conj() * zg;
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] += w * self.x[(pb * n + i, pg * n + j)];
                    }
                }
            }
        }
        for i in 0..n {
            out[(i, i)] += self.shift;
        }
        out
    }
}

/// Dual improving ray of the feasibility problem: `bᵀy = 1` and
/// `Σ y_r A_r ⪯ 0` up to `cone_residual`.
#[derive(Debug, Clone, Serialize)]
pub struct FarkasRay {
    pub y: Vec<f64>,
    /// `bᵀy` before normalization.
    pub violation: f64,
    /// `λ_max(Σ y_r A_r)` after normalization.
    pub cone_residual: f64,
}

#[derive(Debug, Clone)]
pub enum SosOutcome {
    Certified(GramCertificate),
    Infeasible(FarkasRay),
    Indeterminate { reason: String },
}

#[derive(Debug, Clone)]
pub struct SosSolve {
    pub outcome: SosOutcome,
    /// Certified lower bound whenever the solver converged.
    pub lower_bound: Option<f64>,
    /// Optimal `h̲` reported by the solver.
    pub raw_bound: Option<f64>,
    pub dims: RelaxationDims,
    pub solver_status: SolverStatus,
    pub iterations: usize,
    pub removed_rows: usize,
}

impl SosSolve {
    pub fn is_certified(&self) -> bool {
        matches!(self.outcome, SosOutcome::Certified(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.outcome, SosOutcome::Infeasible(_))
    }
}

/// Hermitian Gram matrix from the realified block.
fn complex_gram(y: &RealMatrix, s: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::from_fn(s, s, |p, q| {
        Complex64::new(
            0.5 * (y[(p, q)] + y[(s + p, s + q)]),
            0.5 * (y[(s + p, q)] - y[(p, s + q)]),
        )
    });
    x.symmetrize();
    x
}

/// `Σ_α ‖R_α‖_F` and `max |R_α,ij|` for `R = H − shift·I − BᴴXB`.
fn residuals(h: &TrigPolyMatrix, x: &ComplexMatrix, basis: &MonomialBasis, shift: f64) -> (f64, f64) {
    let n = h.dim();
    let m = h.nvars();
    let zero = MultiIndex::zero(m);
    let mut sum = 0.0;
    let mut worst = 0.0f64;
    for alpha in alpha_box(m, basis.order()) {
        let mut r = h.coefficient(&alpha);
        if alpha == zero {
            for i in 0..n {
                r[(i, i)] -= shift;
            }
        }
        for (pb, beta) in basis.monomials().iter().enumerate() {
            let gamma = beta.add(&alpha);
            if let Some(pg) = basis.position(gamma.as_slice()) {
                for i in 0..n {
                    for j in 0..n {
                        r[(i, j)] -= x[(pb * n + i, pg * n + j)];
                    }
                }
            }
        }
        sum += r.norm_fro();
        worst = worst.max(r.max_abs());
    }
    (sum, worst)
}

/// Farkas ray of the feasibility problem assembled from the bound problem's
/// dual: `Σ w A = −Z ⪯ 0` and `bᵀw = −h̲`.
fn farkas_from_bound(bound: &Relaxation, feas: &Relaxation, y: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; feas.rows.len()];
    let mut pos = 0;
    let zero = MultiIndex::zero(feas.target.nvars());
    let mut diag_sum = 0.0;
    let mut d0 = None;
    for (r, key) in feas.rows.iter().enumerate() {
        let is_d0 = key.alpha == zero && key.i == 0 && key.j == 0 && key.part == super::relaxation::Part::Re;
        if is_d0 {
            d0 = Some(r);
            continue;
        }
        debug_assert_eq!(&bound.rows[pos], key);
        w[r] = y[pos];
        if key.alpha == zero && key.i == key.j && key.part == super::relaxation::Part::Re {
            diag_sum += y[pos];
        }
        pos += 1;
    }
    if let Some(d0) = d0 {
        w[d0] = -(1.0 + diag_sum);
    }
    w
}

fn interpret(
    bound: &Relaxation,
    res: &SolverResult,
    feasibility: impl FnOnce() -> Result<Relaxation>,
    cfg: &SolverConfig,
) -> Result<SosSolve> {
    let mut out = SosSolve {
        outcome: SosOutcome::Indeterminate {
            reason: format!("solver status {:?}: {}", res.status, res.message),
        },
        lower_bound: None,
        raw_bound: None,
        dims: bound.dims,
        solver_status: res.status,
        iterations: res.iterations,
        removed_rows: res.removed_rows.len(),
    };
    if res.status != SolverStatus::Optimal {
        return Ok(out);
    }
    let s = bound.dims.s;
    let shift = bound.offset - bound.problem.c.dot(&res.x);
    let x = complex_gram(&res.x, s);
    let min_eig = hermitian_eigs(&x)?[0];
    let (res_sum, res_max) = residuals(&bound.target, &x, &bound.basis, shift);
    let certified = shift + min_eig.min(0.0) * bound.basis.len() as f64 - res_sum;
    out.raw_bound = Some(shift);
    out.lower_bound = Some(certified);

    if certified > CERTIFY_THRESHOLD && res_max <= 1e-6 {
        out.outcome = SosOutcome::Certified(GramCertificate {
            x,
            basis: bound.basis.clone(),
            n: bound.target.dim(),
            shift,
            lower_bound: certified,
            residual: res_max,
            min_eigenvalue: min_eig,
        });
    } else if shift < -CERTIFY_THRESHOLD {
        let feas = feasibility()?;
        let w = farkas_from_bound(bound, &feas, &res.y);
        let by: f64 = feas.problem.b.iter().zip(&w).map(|(a, b)| a * b).sum();
        let reason;
        if by > 0.0 {
            let yn: Vec<f64> = w.iter().map(|v| v / by).collect();
            let lmax = crate::numerics::symmetric_eigenvalues(&feas.problem.adjoint(&yn))?
                .last()
                .copied()
                .unwrap_or(0.0);
            if verify_primal_ray(&feas.problem, &yn, cfg.feas_tol) {
                out.outcome = SosOutcome::Infeasible(FarkasRay {
                    y: yn,
                    violation: by,
                    cone_residual: lmax,
                });
                return Ok(out);
            }
            reason = format!("dual ray failed verification (λ_max = {lmax:e})");
        } else {
            reason = "dual ray has no positive violation".into();
        }
        out.outcome = SosOutcome::Indeterminate { reason };
    } else {
        out.outcome = SosOutcome::Indeterminate {
            reason: format!("lower bound {shift:e} is within {CERTIFY_THRESHOLD:e} of zero"),
        };
    }
    Ok(out)
}

/// Solves a relaxation. Both modes go through the bound-maximization problem;
/// feasibility is decided by `h̲ > 1e-7` (certificate) or `h̲ < −1e-7` (ray).
pub fn solve_relaxation(r: &Relaxation, cfg: &SolverConfig) -> Result<SosSolve> {
    if r.dims.block > cfg.max_block {
        return Err(Error::TooLarge {
            block: r.dims.block,
            limit: cfg.max_block,
        });
    }
    match r.mode {
        RelaxationMode::MaximizeLowerBound => {
            let res = solve(&r.problem, cfg)?;
            interpret(r, &res, || build_relaxation(&r.target, r.dims.k, RelaxationMode::Feasibility), cfg)
        }
        RelaxationMode::Feasibility => {
            let bound = build_relaxation(&r.target, r.dims.k, RelaxationMode::MaximizeLowerBound)?;
            let res = solve(&bound.problem, cfg)?;
            interpret(&bound, &res, || Ok(r.clone()), cfg)
        }
    }
}

/// Builds and solves the bound problem at order `k`, refusing oversized
/// problems before any allocation.
pub fn sos_lower_bound(h: &TrigPolyMatrix, k: usize, cfg: &SolverConfig) -> Result<SosSolve> {
    let dims = super::relaxation::relaxation_dims(h.dim(), h.nvars(), k, RelaxationMode::MaximizeLowerBound);
    if dims.block > cfg.max_block {
        return Err(Error::TooLarge {
            block: dims.block,
            limit: cfg.max_block,
        });
    }
    let r = build_relaxation(h, k, RelaxationMode::MaximizeLowerBound)?;
    solve_relaxation(&r, cfg)
}

/// One order of the lower-bound hierarchy.
#[derive(Debug, Clone, Serialize)]
pub struct HierarchyEntry {
    pub k: usize,
    /// Certified bound at this order, absent on solver failure.
    pub bound: Option<f64>,
    /// Best certified bound up to this order.
    pub best: Option<f64>,
    pub status: SolverStatus,
}

/// Certified lower bounds `h̲_k` for `k_min ≤ k ≤ k_max`. Orders whose solve
/// fails are recorded as gaps.
pub fn lower_bound_hierarchy(
    h: &TrigPolyMatrix,
    k_min: usize,
    k_max: usize,
    cfg: &SolverConfig,
) -> Result<Vec<HierarchyEntry>> {
    if k_min > k_max {
        return Err(Error::InvalidOrder(format!("k_min {k_min} exceeds k_max {k_max}")));
    }
    let mut best: Option<f64> = None;
    let mut out = Vec::new();
    for k in k_min..=k_max {
        let s = sos_lower_bound(h, k, cfg)?;
        if let Some(b) = s.lower_bound {
            best = Some(best.map_or(b, |x: f64| x.max(b)));
        }
        out.push(HierarchyEntry {
            k,
            bound: s.lower_bound,
            best,
            status: s.solver_status,
        });
    }
    Ok(out)
}
