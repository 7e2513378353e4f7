//! Multivariate trigonometric (Laurent) polynomials on the torus.
//!
//! A [`TrigPoly`] is a sparse map from integer exponents to complex
//! coefficients, `h(z) = Σ h_α z^α` with `z_i = e^{iθ_i}`. Coefficients whose
//! modulus falls below [`PRUNE_THRESHOLD`] are dropped after every operation.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Coefficients with modulus below this value are not stored.
pub const PRUNE_THRESHOLD: f64 = 1e-8;

/// Integer exponent vector `α`, entries may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<i32>);

impl MultiIndex {
    pub fn new(exponents: Vec<i32>) -> Self {
        Self(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    /// `e_i` in `nvars` variables.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn total_degree(&self) -> i32 {
        self.0.iter().sum()
    }

    /// `max_i |α_i|`.
    pub fn max_abs(&self) -> u32 {
        self.0.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0)
    }

    /// `θ·α`.
    pub fn phase(&self, theta: &[f64]) -> f64 {
        self.0.iter().zip(theta).map(|(&a, &t)| a as f64 * t).sum()
    }

    /// True for the representative of `{α, −α}` that is kept: zero, or the
    /// first nonzero component positive.
    pub fn is_canonical(&self) -> bool {
        match self.0.iter().find(|&&a| a != 0) {
            None => true,
            Some(&a) => a > 0,
        }
    }
}

impl From<Vec<i32>> for MultiIndex {
    fn from(v: Vec<i32>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Point `θ ∈ [0, 2π)^m` on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    /// Wraps every angle into `[0, 2π)`.
    pub fn new(angles: Vec<f64>) -> Self {
        Self(
            angles
                .into_iter()
                .map(|t| {
                    let w = t.rem_euclid(TAU);
                    if w >= TAU {
                        0.0
                    } else {
                        w
                    }
                })
                .collect(),
        )
    }

    pub fn zero(nvars: usize) -> Self {
        Self(vec![0.0; nvars])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }
}

/// Sparse trigonometric polynomial in `nvars` variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    nvars: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

fn check_vars(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::VariableMismatch { left, right })
    }
}

impl TrigPoly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self::monomial(MultiIndex::zero(nvars), c)
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let mut p = Self::zero(alpha.len());
        p.insert(alpha, c);
        p
    }

    /// Sums the given terms; repeated exponents accumulate.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, c) in terms {
            check_vars(nvars, alpha.len())?;
            *acc.entry(alpha).or_default() += c;
        }
        let mut p = Self::zero(nvars);
        for (alpha, c) in acc {
            p.insert(alpha, c);
        }
        Ok(p)
    }

    fn insert(&mut self, alpha: MultiIndex, c: Complex64) {
        if c.norm() >= PRUNE_THRESHOLD {
            self.coeffs.insert(alpha, c);
        } else {
            self.coeffs.remove(&alpha);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_vars(self.nvars, other.nvars)?;
        let mut out = self.clone();
        for (alpha, &c) in &other.coeffs {
            let v = out.coeff(alpha) + c;
            out.insert(alpha.clone(), v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Convolution of the coefficient maps.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_vars(self.nvars, other.nvars)?;
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, &ca) in &self.coeffs {
            for (b, &cb) in &other.coeffs {
                *acc.entry(a.add(b)).or_default() += ca * cb;
            }
        }
        let mut out = Self::zero(self.nvars);
        for (alpha, c) in acc {
            out.insert(alpha, c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (alpha, &c) in &self.coeffs {
            out.insert(alpha.clone(), c * s);
        }
        out
    }

    /// `coeff'(α) = conj(coeff(−α))`: pointwise complex conjugation on the torus.
    pub fn conj(&self) -> Self {
        Self {
            nvars: self.nvars,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.neg(), c.conj())).collect(),
        }
    }

    pub fn eval(&self, theta: &TorusPoint) -> Result<Complex64> {
        check_vars(self.nvars, theta.dim())?;
        Ok(self.eval_angles(theta.angles()))
    }

    /// Evaluation at raw angles; the caller guarantees the length.
    pub fn eval_angles(&self, theta: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(alpha, &c)| c * Complex64::cis(alpha.phase(theta)))
            .sum()
    }

    /// `coeff(−α) = conj(coeff(α))` for every stored `α`, up to `tol`.
    pub fn is_real_valued(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .all(|(a, c)| (self.coeff(&a.neg()) - c.conj()).norm() <= tol)
    }

    /// Sum of coefficient moduli.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Largest `|α_i|` over stored exponents and variables.
    pub fn max_degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::max_abs).max().unwrap_or(0)
    }

    /// Largest total degree among stored exponents (for nonnegative exponents).
    pub fn total_degree(&self) -> Option<i32> {
        self.coeffs.keys().map(MultiIndex::total_degree).max()
    }
}

/// `dim × dim` matrix of trigonometric polynomials, Hermitian on the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolyMatrix {
    dim: usize,
    nvars: usize,
    entries: Vec<TrigPoly>,
}

impl TrigPolyMatrix {
    /// Row-major entries; checks shape and variable counts, not symmetry.
    pub fn from_entries(dim: usize, nvars: usize, entries: Vec<TrigPoly>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        for e in &entries {
            check_vars(nvars, e.nvars())?;
        }
        Ok(Self {
            dim,
            nvars,
            entries,
        })
    }

    pub fn from_scalar(h: TrigPoly) -> Self {
        Self {
            dim: 1,
            nvars: h.nvars(),
            entries: vec![h],
        }
    }

    /// Constant matrix function.
    pub fn constant(nvars: usize, m: &ComplexMatrix) -> Self {
        let dim = m.rows();
        let entries = (0..dim * dim)
            .map(|k| TrigPoly::constant(nvars, m[(k / dim, k % dim)]))
            .collect();
        Self {
            dim,
            nvars,
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn get(&self, i: usize, j: usize) -> &TrigPoly {
        &self.entries[i * self.dim + j]
    }

    /// Entry `(j,i)` equals the trig-conjugate of entry `(i,j)` at coefficient level.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| {
            (i..self.dim).all(|j| {
                let a = self.get(i, j).conj();
                let b = self.get(j, i);
                a.coeffs.keys().chain(b.coeffs.keys()).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol)
            })
        })
    }

    pub fn eval(&self, theta: &TorusPoint) -> Result<ComplexMatrix> {
        check_vars(self.nvars, theta.dim())?;
        Ok(self.eval_angles(theta.angles()))
    }

    pub fn eval_angles(&self, theta: &[f64]) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d, d, |i, j| self.entries[i * d + j].eval_angles(theta))
    }

    /// Matrix coefficient `H_α`.
    pub fn coefficient(&self, alpha: &MultiIndex) -> ComplexMatrix {
        let d = self.dim;
        ComplexMatrix::from_fn(d, d, |i, j| self.entries[i * d + j].coeff(alpha))
    }

    /// Union of the supports of all entries.
    pub fn support(&self) -> BTreeSet<MultiIndex> {
        self.entries
            .iter()
            .flat_map(|e| e.coeffs.keys().cloned())
            .collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.iter().map(TrigPoly::max_degree).max().unwrap_or(0)
    }

    /// Subtracts `s·I`.
    pub fn shift_diagonal(&self, s: f64) -> Self {
        let mut out = self.clone();
        let zero = MultiIndex::zero(self.nvars);
        for i in 0..self.dim {
            let e = &mut out.entries[i * self.dim + i];
            let c = e.coeff(&zero) - s;
            e.insert(zero.clone(), c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(e: &[i32], v: Complex64) -> TrigPoly {
        TrigPoly::monomial(MultiIndex::new(e.to_vec()), v)
    }

    fn cos_poly() -> TrigPoly {
        mono(&[0], c(2., 0.))
            .add(&mono(&[1], c(1., 0.)))
            .unwrap()
            .add(&mono(&[-1], c(1., 0.)))
            .unwrap()
    }

    #[test]
    fn add_examples() {
        let p = mono(&[1], c(1., 0.)).add(&mono(&[-1], c(1., 0.))).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.add(&TrigPoly::zero(1)).unwrap(), p);
        let q = TrigPoly::constant(1, c(1., 0.)).add(&mono(&[1], c(1., 0.))).unwrap();
        assert!(q.add(&q.scale(c(-1., 0.))).unwrap().is_zero());
    }

    #[test]
    fn mismatched_variables() {
        let err = mono(&[1], c(1., 0.)).add(&mono(&[1, 0], c(1., 0.))).unwrap_err();
        assert!(matches!(err, Error::VariableMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn mul_examples() {
        let a = TrigPoly::constant(1, c(1., 0.)).add(&mono(&[1], c(1., 0.))).unwrap();
        assert_eq!(a.mul(&a.conj()).unwrap(), cos_poly());
        assert_eq!(a.mul(&TrigPoly::constant(1, c(1., 0.))).unwrap(), a);
        assert_eq!(
            mono(&[1], c(1., 0.)).mul(&mono(&[-1], c(1., 0.))).unwrap(),
            TrigPoly::constant(1, c(1., 0.))
        );
    }

    #[test]
    fn conj_examples() {
        let p = TrigPoly::constant(1, c(0., 1.)).add(&mono(&[1], c(1., 0.))).unwrap();
        let q = TrigPoly::constant(1, c(0., -1.)).add(&mono(&[-1], c(1., 0.))).unwrap();
        assert_eq!(p.conj(), q);
        assert_eq!(cos_poly().conj(), cos_poly());
    }

    #[test]
    fn eval_examples() {
        let h = cos_poly();
        assert!((h.eval(&TorusPoint::new(vec![0.0])).unwrap() - 4.0).norm() < 1e-15);
        assert!(h.eval(&TorusPoint::new(vec![PI])).unwrap().norm() < 1e-15);
        let z = mono(&[1, 1], c(1., 0.));
        let v = z.eval(&TorusPoint::new(vec![PI / 2.0, PI / 2.0])).unwrap();
        assert!((v + 1.0).norm() < 1e-15);
        assert!(z.eval(&TorusPoint::zero(1)).is_err());
    }

    #[test]
    fn pruning_drops_small_terms() {
        let p = TrigPoly::from_terms(1, [(MultiIndex::new(vec![2]), c(5e-9, 0.))]).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn matrix_eval_examples() {
        let id = TrigPolyMatrix::constant(2, &ComplexMatrix::identity(2));
        let e = id.eval(&TorusPoint::new(vec![0.3, 1.2])).unwrap();
        assert_eq!(e, ComplexMatrix::identity(2));
        let h = TrigPolyMatrix::from_scalar(cos_poly());
        let v = h.eval(&TorusPoint::new(vec![PI / 2.0])).unwrap();
        assert!((v[(0, 0)] - 2.0).norm() < 1e-15);
    }

    #[test]
    fn torus_point_wraps() {
        let t = TorusPoint::new(vec![-0.5, 2.0 * PI, 7.0]);
        assert!(t.angles().iter().all(|&a| (0.0..TAU).contains(&a)));
        assert_eq!(t.angles()[1], 0.0);
    }

    #[test]
    fn canonical_representatives() {
        assert!(MultiIndex::new(vec![0, 0]).is_canonical());
        assert!(MultiIndex::new(vec![0, 2]).is_canonical());
        assert!(!MultiIndex::new(vec![0, -2]).is_canonical());
        assert!(MultiIndex::new(vec![1, -3]).is_canonical());
    }
}
