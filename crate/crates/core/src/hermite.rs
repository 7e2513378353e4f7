//! Discrete-time (Schur–Cohn) Hermite matrix of the homogenized
//! characteristic polynomial, as a Hermitian trigonometric matrix in `z₁..z_m`.
//!
//! With `p̃_j = p_j / γ^{n−j}`, `S₁` is upper-triangular Toeplitz with first row
//! `[p̃_n … p̃_1]` and `S₂` with first row `[p̃_0 … p̃_{n−1}]`. The entries are
//! `H_ij = Σ_l conj(S₁[l,i]) S₁[l,j] − S₂[l,i] conj(S₂[l,j])`, where `conj` is
//! trig-conjugation. For real data this is `S₁ᵀS₁ − S₂ᵀS₂`; for complex data it
//! is the form that stays equivalent to the root-location criterion.

use num_complex::Complex64;

use crate::chardet::{homogenize, sampledet};
use crate::error::{Error, Result};
use crate::numerics::roots_via_companion;
use crate::system::DelaySystem;
use crate::trigpoly::{MultiIndex, TorusPoint, TrigPoly, TrigPolyMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteMatrix {
    pub h: TrigPolyMatrix,
    pub gamma: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveGamma(gamma))
    }
}

/// `p_j / γ^{n−j}` after validating `p_n = 1` and `γ > 0`.
fn scaled_coeffs(p: &[TrigPoly], gamma: f64) -> Result<Vec<TrigPoly>> {
    check_gamma(gamma)?;
    let n = p.len().checked_sub(1).ok_or(Error::LeadingCoefficient)?;
    let m = p[n].nvars();
    let one = TrigPoly::constant(m, Complex64::new(1.0, 0.0));
    let defect = p[n].sub(&one)?;
    if defect.l1_norm() > 1e-12 {
        return Err(Error::LeadingCoefficient);
    }
    p.iter()
        .enumerate()
        .map(|(j, pj)| {
            if pj.nvars() != m {
                return Err(Error::VariableMismatch {
                    left: m,
                    right: pj.nvars(),
                });
            }
            Ok(pj.scale(Complex64::new(gamma.powi(-((n - j) as i32)), 0.0)))
        })
        .collect()
}

pub fn build_hermite(p: &[TrigPoly], gamma: f64) -> Result<HermiteMatrix> {
    let pt = scaled_coeffs(p, gamma)?;
    let n = pt.len() - 1;
    let m = pt[n].nvars();
    let zero = TrigPoly::zero(m);
    let s1 = |l: usize, i: usize| if i >= l { &pt[n - (i - l)] } else { &zero };
    let s2 = |l: usize, i: usize| if i >= l { &pt[i - l] } else { &zero };

    let mut entries = vec![TrigPoly::zero(m); n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = TrigPoly::zero(m);
            for l in 0..=i.min(j) {
                acc = acc.add(&s1(l, i).conj().mul(s1(l, j))?)?;
                acc = acc.sub(&s2(l, i).mul(&s2(l, j).conj())?)?;
            }
            if i == j {
                acc = real_part(&acc);
            }
            entries[j * n + i] = acc.conj();
            entries[i * n + j] = acc;
        }
    }
    Ok(HermiteMatrix {
        h: TrigPolyMatrix::from_entries(n, m, entries)?,
        gamma,
    })
}

/// `(h + conj(h)) / 2`, making a diagonal entry exactly real-valued.
fn real_part(h: &TrigPoly) -> TrigPoly {
    h.add(&h.conj())
        .expect("same variable count")
        .scale(Complex64::new(0.5, 0.0))
}

/// Full pipeline: `sampledet`, homogenization, Hermite matrix at radius `gamma`.
pub fn hermite_of_system(sys: &DelaySystem, gamma: f64) -> Result<HermiteMatrix> {
    check_gamma(gamma)?;
    build_hermite(&homogenize(&sampledet(sys)?), gamma)
}

/// Largest root modulus of `z₀ ↦ Σ_j p̃_j(e^{iθ}) z₀^j`.
pub fn max_root_modulus(p: &[TrigPoly], theta: &TorusPoint, gamma: f64) -> Result<f64> {
    let pt = scaled_coeffs(p, gamma)?;
    let coeffs = pt
        .iter()
        .map(|pj| pj.eval(theta))
        .collect::<Result<Vec<_>>>()?;
    Ok(roots_via_companion(&coeffs)?
        .iter()
        .fold(0.0, |m, r| m.max(r.norm())))
}

/// True iff every root of the scaled univariate polynomial at `θ` lies in the
/// open unit disk.
pub fn pointwise_stability_oracle(p: &[TrigPoly], theta: &TorusPoint, gamma: f64) -> Result<bool> {
    Ok(max_root_modulus(p, theta, gamma)? < 1.0)
}

impl HermiteMatrix {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn nvars(&self) -> usize {
        self.h.nvars()
    }

    /// Constant coefficient `H_0`.
    pub fn constant_term(&self) -> crate::numerics::ComplexMatrix {
        self.h.coefficient(&MultiIndex::zero(self.nvars()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hermitian_eigs;

    fn cst(v: f64) -> TrigPoly {
        TrigPoly::constant(1, Complex64::new(v, 0.0))
    }

    #[test]
    fn one_by_one() {
        let h = build_hermite(&[cst(-0.5), cst(1.0)], 1.0).unwrap();
        let v = h.constant_term();
        assert!((v[(0, 0)] - 0.75).norm() < 1e-15);
        assert_eq!(h.h.support().len(), 1);
    }

    #[test]
    fn two_by_two_hand_value() {
        let h = build_hermite(&[cst(-0.25), cst(0.0), cst(1.0)], 1.0).unwrap();
        let v = h.constant_term();
        assert!((v[(0, 0)] - 0.9375).norm() < 1e-15);
        assert!((v[(1, 1)] - 0.9375).norm() < 1e-15);
        assert!(v[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn oracle_examples() {
        let p = [cst(-0.5), cst(1.0)];
        let t = TorusPoint::new(vec![1.3]);
        assert!(pointwise_stability_oracle(&p, &t, 1.0).unwrap());
        assert!(!pointwise_stability_oracle(&p, &t, 0.4).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            build_hermite(&[cst(-0.5), cst(2.0)], 1.0),
            Err(Error::LeadingCoefficient)
        ));
        assert!(matches!(
            build_hermite(&[cst(-0.5), cst(1.0)], 0.0),
            Err(Error::NonPositiveGamma(_))
        ));
    }

    #[test]
    fn gamma_scaling_matches_scaled_system() {
        let sys = DelaySystem::from_real(vec![
            crate::numerics::RealMatrix::from_rows(&[vec![0.2, -0.4], vec![0.3, 0.1]]),
            crate::numerics::RealMatrix::from_rows(&[vec![-0.1, 0.0], vec![0.5, 0.25]]),
        ])
        .unwrap();
        let a = hermite_of_system(&sys, 0.8).unwrap();
        let b = hermite_of_system(&sys.scaled(1.0 / 0.8), 1.0).unwrap();
        let t = [0.4, 2.2];
        let d = &a.h.eval_angles(&t) - &b.h.eval_angles(&t);
        assert!(d.max_abs() < 1e-12);
        assert!(hermitian_eigs(&a.h.eval_angles(&t)).is_ok());
    }
}
