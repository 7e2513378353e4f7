//! Verdicts on strong stability and certified brackets of `γ₀`.
//!
//! Upper sides are certified by a Gram certificate of `H_γ ≻ 0`. Lower sides
//! are certified by an upper-bound refutation or by a torus point whose
//! spectral radius exceeds the trial `γ`. An infeasible relaxation alone never
//! certifies anything.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evp::{disprove_matrix, Disproof};
use crate::gridscan::{scan, spectral_radius_at, ScanConfig};
use crate::hermite::hermite_of_system;
use crate::sdpsolve::{SolverConfig, SolverStatus};
use crate::sosgram::{relaxation_dims, sos_lower_bound, RelaxationMode, SosOutcome};
use crate::system::DelaySystem;

/// Largest localizing matrix assembled by the refutation stage.
pub const EVP_MAX_DIM: usize = 1200;

/// Relative margin by which a witness radius must exceed a trial `γ`.
const WITNESS_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    StronglyStable,
    Unstable,
    StronglyStableUncertified,
    UnstableUncertified,
    Undetermined,
}

impl Verdict {
    pub fn is_certified(self) -> bool {
        matches!(self, Verdict::StronglyStable | Verdict::Unstable)
    }

    /// CLI exit code: 0 for a certified verdict, 2 otherwise.
    pub fn exit_code(self) -> i32 {
        if self.is_certified() {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TestConfig {
    pub gamma: f64,
    /// Initial relaxation order; defaults to `n`.
    pub order: Option<usize>,
    /// Extra orders tried after an inconclusive solve.
    pub escalations: usize,
    pub evp_k_max: usize,
    pub solver: SolverConfig,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            order: None,
            escalations: 2,
            evp_k_max: 8,
            solver: SolverConfig::default(),
        }
    }
}

/// One relaxation solve.
#[derive(Debug, Clone, Serialize)]
pub struct SosTrial {
    pub gamma: f64,
    pub k: usize,
    /// Hermitian Gram size `S`.
    pub s: usize,
    /// Realified block `2S`.
    pub block: usize,
    /// Primal vector length `(2S)²`.
    pub n_vec: usize,
    pub constraints: usize,
    pub outcome: String,
    pub solver_status: Option<SolverStatus>,
    pub raw_bound: Option<f64>,
    pub certified_bound: Option<f64>,
    /// Largest coefficient mismatch of a returned certificate.
    pub residual: Option<f64>,
    pub iterations: usize,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub scan_angles: Vec<f64>,
    /// `r_σ` at `scan_angles`.
    pub spectral_radius: f64,
    pub min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvpReport {
    pub gamma: f64,
    /// `(k, h̄_k)` for every order evaluated.
    pub bounds: Vec<(usize, f64)>,
    pub refuted_at: Option<usize>,
    pub witness: Option<WitnessReport>,
}

/// Evidence carried by a bracket end.
#[derive(Debug, Clone, Serialize)]
pub enum Evidence {
    GramCertificate { k: usize, lower_bound: f64, residual: f64 },
    Refutation { k: usize, bound: f64 },
    Witness(WitnessReport),
    ScanOnly,
}

impl Evidence {
    pub fn is_certified(&self) -> bool {
        !matches!(self, Evidence::ScanOnly)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub lo_evidence: Evidence,
    pub hi_evidence: Evidence,
    /// Largest trial in `(lo, hi)` at which neither side could be certified.
    pub inconclusive_up_to: Option<f64>,
}

impl Bracket {
    pub fn lo_certified(&self) -> bool {
        self.lo_evidence.is_certified()
    }

    pub fn hi_certified(&self) -> bool {
        self.hi_evidence.is_certified()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub scan_ms: f64,
    pub sos_ms: f64,
    pub evp_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub n: usize,
    pub m: usize,
    /// Trial `γ` of a single test; absent for bisection.
    pub gamma: Option<f64>,
    pub gamma0_scan: Option<f64>,
    pub certified_bracket: Option<Bracket>,
    pub orders_used: Vec<usize>,
    pub sos: Vec<SosTrial>,
    pub evp: Option<EvpReport>,
    pub timings: Option<Timings>,
}

impl StabilityReport {
    pub fn to_json(&self, with_timing: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report is serializable");
        if !with_timing {
            if let Some(o) = v.as_object_mut() {
                o.remove("timings");
            }
        }
        v
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

struct Stage {
    trials: Vec<SosTrial>,
    sos_ms: f64,
    evp_ms: f64,
}

/// Relaxations at `k₀, k₀+1, …` until one certifies, a size refusal, or the
/// escalation cap. Returns the certifying trial, if any.
fn sos_stage(sys: &DelaySystem, gamma: f64, cfg: &TestConfig, stage: &mut Stage) -> Option<SosTrial> {
    let t = Instant::now();
    let h = match hermite_of_system(sys, gamma) {
        Ok(h) => h,
        Err(e) => {
            stage.trials.push(SosTrial::failed(gamma, e));
            return None;
        }
    };
    let k0 = cfg.order.unwrap_or(sys.n()).max(h.h.max_degree() as usize).max(1);
    let mut found = None;
    for k in k0..=k0 + cfg.escalations {
        let dims = relaxation_dims(sys.n(), sys.m(), k, RelaxationMode::MaximizeLowerBound);
        let mut trial = SosTrial {
            gamma,
            k,
            s: dims.s,
            block: dims.block,
            n_vec: dims.n_vec,
            constraints: dims.constraints,
            outcome: String::new(),
            solver_status: None,
            raw_bound: None,
            certified_bound: None,
            residual: None,
            iterations: 0,
            detail: None,
        };
        match sos_lower_bound(&h.h, k, &cfg.solver) {
            Ok(s) => {
                trial.solver_status = Some(s.solver_status);
                trial.raw_bound = s.raw_bound;
                trial.certified_bound = s.lower_bound;
                trial.iterations = s.iterations;
                let done = match &s.outcome {
                    SosOutcome::Certified(c) => {
                        trial.outcome = "certified".into();
                        trial.residual = Some(c.residual);
                        true
                    }
                    SosOutcome::Infeasible(r) => {
                        trial.outcome = "infeasible".into();
                        trial.detail = Some(format!("Farkas ray, cone residual {:e}", r.cone_residual));
                        false
                    }
                    SosOutcome::Indeterminate { reason } => {
                        trial.outcome = "indeterminate".into();
                        trial.detail = Some(reason.clone());
                        false
                    }
                };
                stage.trials.push(trial.clone());
                if done {
                    found = Some(trial);
                    break;
                }
            }
            Err(e) => {
                let refused = matches!(e, Error::TooLarge { .. });
                trial.outcome = if refused { "refused" } else { "error" }.into();
                trial.detail = Some(e.to_string());
                stage.trials.push(trial);
                break;
            }
        }
    }
    stage.sos_ms += ms(t);
    found
}

impl SosTrial {
    fn failed(gamma: f64, e: Error) -> Self {
        Self {
            gamma,
            k: 0,
            s: 0,
            block: 0,
            n_vec: 0,
            constraints: 0,
            outcome: "error".into(),
            solver_status: None,
            raw_bound: None,
            certified_bound: None,
            residual: None,
            iterations: 0,
            detail: Some(e.to_string()),
        }
    }
}

/// Upper-bound hierarchy at `γ`, capped by [`EVP_MAX_DIM`].
fn evp_stage(sys: &DelaySystem, gamma: f64, k_max: usize, stage: &mut Stage) -> EvpReport {
    let t = Instant::now();
    let mut report = EvpReport {
        gamma,
        bounds: Vec::new(),
        refuted_at: None,
        witness: None,
    };
    let Ok(h) = hermite_of_system(sys, gamma) else {
        stage.evp_ms += ms(t);
        return report;
    };
    let cap = (1..=k_max)
        .take_while(|&k| (k + 1).pow(sys.m() as u32) * sys.n() <= EVP_MAX_DIM)
        .last()
        .unwrap_or(0);
    if cap > 0 {
        match disprove_matrix(&h.h, cap) {
            Ok(Disproof::Refuted(r)) => {
                report.bounds.push((r.k, r.bound));
                report.refuted_at = Some(r.k);
                report.witness = r.witness.map(|w| WitnessReport {
                    spectral_radius: spectral_radius_at(sys, &w.scan_angles).unwrap_or(f64::NAN),
                    scan_angles: w.scan_angles,
                    min_eigenvalue: Some(w.min_eigenvalue),
                });
            }
            Ok(Disproof::Inconclusive { bounds }) => report.bounds = bounds,
            Err(_) => {}
        }
    }
    stage.evp_ms += ms(t);
    report
}

/// Decides `γ₀ < γ` (certificate) or `γ₀ > γ` (refutation) at one `γ`.
pub fn strong_stability_test(sys: &DelaySystem, cfg: &TestConfig) -> Result<StabilityReport> {
    if !(cfg.gamma > 0.0 && cfg.gamma.is_finite()) {
        return Err(Error::NonPositiveGamma(cfg.gamma));
    }
    let t = Instant::now();
    let mut stage = Stage {
        trials: Vec::new(),
        sos_ms: 0.0,
        evp_ms: 0.0,
    };
    let cert = sos_stage(sys, cfg.gamma, cfg, &mut stage);
    let (verdict, evp) = if cert.is_some() {
        (Verdict::StronglyStable, None)
    } else {
        let e = evp_stage(sys, cfg.gamma, cfg.evp_k_max, &mut stage);
        let v = if e.refuted_at.is_some() {
            Verdict::Unstable
        } else {
            Verdict::Undetermined
        };
        (v, Some(e))
    };
    let orders_used = stage.trials.iter().map(|t| t.k).collect();
    Ok(StabilityReport {
        verdict,
        n: sys.n(),
        m: sys.m(),
        gamma: Some(cfg.gamma),
        gamma0_scan: None,
        certified_bracket: None,
        orders_used,
        sos: stage.trials,
        evp,
        timings: Some(Timings {
            scan_ms: 0.0,
            sos_ms: stage.sos_ms,
            evp_ms: stage.evp_ms,
            total_ms: ms(t),
        }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BisectConfig {
    /// Stop once `γ_hi − γ_lo` is at most this.
    pub tol: f64,
    /// Initial bracket `[(1−margin)·γ_scan, (1+margin)·γ_scan]`.
    pub margin: f64,
    pub max_steps: usize,
    pub scan: ScanConfig,
    pub test: TestConfig,
}

impl Default for BisectConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            margin: 0.1,
            max_steps: 60,
            scan: ScanConfig::default(),
            test: TestConfig::default(),
        }
    }
}

/// Side of a bisection probe.
enum Probe {
    Upper(Evidence),
    Lower(Evidence),
}

fn probe(sys: &DelaySystem, gamma: f64, scan_estimate: f64, cfg: &BisectConfig, stage: &mut Stage) -> Probe {
    if let Some(t) = sos_stage(sys, gamma, &cfg.test, stage) {
        return Probe::Upper(Evidence::GramCertificate {
            k: t.k,
            lower_bound: t.certified_bound.unwrap_or(f64::NAN),
            residual: t.residual.unwrap_or(f64::NAN),
        });
    }
    let e = evp_stage(sys, gamma, cfg.test.evp_k_max, stage);
    if let Some(k) = e.refuted_at {
        let bound = e.bounds.last().map_or(f64::NAN, |b| b.1);
        return Probe::Lower(Evidence::Refutation { k, bound });
    }
    if gamma > scan_estimate {
        Probe::Upper(Evidence::ScanOnly)
    } else {
        Probe::Lower(Evidence::ScanOnly)
    }
}

/// Certified bisection of `γ₀` starting from the grid-scan estimate.
///
/// The scan argmax certifies every `γ` below its spectral radius (less a
/// relative `1e-9`), so the lower end starts there. The upper end starts at
/// the scan estimate plus the margin and moves down on each Gram certificate.
/// Trials that neither certify nor refute raise an inconclusive floor and the
/// search continues between that floor and the upper end.
pub fn bisect_radius(sys: &DelaySystem, cfg: &BisectConfig) -> Result<StabilityReport> {
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidField {
            field: "tol".into(),
            reason: "must be positive".into(),
        });
    }
    let t0 = Instant::now();
    let mut stage = Stage {
        trials: Vec::new(),
        sos_ms: 0.0,
        evp_ms: 0.0,
    };
    let ts = Instant::now();
    let sr = scan(sys, &cfg.scan)?;
    let scan_ms = ms(ts);
    let estimate = sr.refined_estimate;
    let witness = WitnessReport {
        scan_angles: sr.refined_argmax.angles().to_vec(),
        spectral_radius: estimate,
        min_eigenvalue: None,
    };

    let (mut lo, mut lo_ev) = if estimate > 0.0 {
        (estimate * (1.0 - WITNESS_MARGIN), Evidence::Witness(witness))
    } else {
        (0.0, Evidence::ScanOnly)
    };
    let mut hi = (estimate * (1.0 + cfg.margin)).max(estimate + cfg.tol);
    let mut hi_ev = Evidence::ScanOnly;
    let mut floor = lo;

    // establish the upper end, doubling while refutations push it up
    for _ in 0..cfg.max_steps {
        match probe(sys, hi, estimate, cfg, &mut stage) {
            Probe::Upper(ev) => {
                hi_ev = ev;
                break;
            }
            Probe::Lower(ev) => {
                if ev.is_certified() {
                    lo = hi;
                    lo_ev = ev;
                }
                floor = hi;
                hi *= 2.0;
            }
        }
    }
    if hi_ev.is_certified() {
        for _ in 0..cfg.max_steps {
            let base = floor.max(lo);
            if hi - base <= cfg.tol {
                break;
            }
            let trial = 0.5 * (base + hi);
            match probe(sys, trial, estimate, cfg, &mut stage) {
                Probe::Upper(ev) if ev.is_certified() => {
                    hi = trial;
                    hi_ev = ev;
                }
                Probe::Lower(ev) if ev.is_certified() => {
                    lo = trial;
                    lo_ev = ev;
                }
                _ => floor = trial,
            }
        }
    }

    let bracket = Bracket {
        lo,
        hi,
        lo_evidence: lo_ev,
        hi_evidence: hi_ev,
        inconclusive_up_to: (floor > lo).then_some(floor),
    };
    let verdict = bracket_verdict(&bracket);
    let mut orders_used: Vec<usize> = stage.trials.iter().map(|t| t.k).collect();
    orders_used.sort_unstable();
    orders_used.dedup();
    Ok(StabilityReport {
        verdict,
        n: sys.n(),
        m: sys.m(),
        gamma: None,
        gamma0_scan: Some(estimate),
        certified_bracket: Some(bracket),
        orders_used,
        sos: stage.trials,
        evp: None,
        timings: Some(Timings {
            scan_ms,
            sos_ms: stage.sos_ms,
            evp_ms: stage.evp_ms,
            total_ms: ms(t0),
        }),
    })
}

/// Certified ends decide first; scan-only ends give the uncertified verdicts.
fn bracket_verdict(b: &Bracket) -> Verdict {
    if b.hi <= 1.0 && b.hi_certified() {
        Verdict::StronglyStable
    } else if b.lo >= 1.0 && b.lo_certified() {
        Verdict::Unstable
    } else if b.hi <= 1.0 {
        Verdict::StronglyStableUncertified
    } else if b.lo >= 1.0 {
        Verdict::UnstableUncertified
    } else {
        Verdict::Undetermined
    }
}
