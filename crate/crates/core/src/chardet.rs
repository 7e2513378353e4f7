//! Characteristic determinant `q(z) = det(I + Σₖ Hₖ zₖ)` by sampling and
//! interpolation on a roots-of-unity grid.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{lu_determinant, ComplexMatrix};
use crate::system::DelaySystem;
use crate::trigpoly::{MultiIndex, TrigPoly};

/// Dehomogenized characteristic polynomial: nonnegative exponents, total
/// degree at most `n`, constant term 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub q: TrigPoly,
    pub n: usize,
}

/// Odometer over `{0..base}^m`, last index fastest.
pub(crate) fn grid_indices(base: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.pow(m as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; m];
        for slot in idx.iter_mut().rev() {
            *slot = flat % base;
            flat /= base;
        }
        idx
    })
}

/// Interpolates `q` from its values at `(n+1)^m` roots-of-unity samples.
pub fn sampledet(sys: &DelaySystem) -> Result<CharPoly> {
    let n = sys.n();
    let m = sys.m();
    let base = n + 1;
    let roots: Vec<Complex64> = (0..base)
        .map(|k| Complex64::cis(TAU * k as f64 / base as f64))
        .collect();

    let mut values: Vec<Complex64> = grid_indices(base, m)
        .map(|idx| {
            let mut a = ComplexMatrix::identity(n);
            for (hk, &i) in sys.matrices().iter().zip(&idx) {
                a.add_scaled(hk, roots[i]);
            }
            lu_determinant(&a)
        })
        .collect();

    // coefficient of z^α is (1/base^m) Σ_idx v[idx] ω^{−α·idx}; one axis at a time
    let mut stride = 1;
    for _axis in (0..m).rev() {
        let block = stride * base;
        let mut line = vec![Complex64::default(); base];
        for start in (0..values.len()).step_by(block) {
            for offset in 0..stride {
                for (a, slot) in line.iter_mut().enumerate() {
                    *slot = (0..base)
                        .map(|i| values[start + offset + i * stride] * roots[(base - (a * i) % base) % base])
                        .sum::<Complex64>()
                        / base as f64;
                }
                for (a, &v) in line.iter().enumerate() {
                    values[start + offset + a * stride] = v;
                }
            }
        }
        stride = block;
    }

    let terms = grid_indices(base, m)
        .zip(values)
        .filter(|(idx, _)| idx.iter().sum::<usize>() <= n)
        .map(|(idx, v)| (MultiIndex::new(idx.iter().map(|&a| a as i32).collect()), v));
    let q = TrigPoly::from_terms(m, terms)?;
    Ok(CharPoly { q, n })
}

/// Splits `q` by total degree: `p_j` holds the monomials of degree `n − j`,
/// so `Σ_j p_j(z) z₀^j = det(z₀ I + Σ Hₖ zₖ)` and `p_n = 1`.
pub fn homogenize(cp: &CharPoly) -> Vec<TrigPoly> {
    let m = cp.q.nvars();
    let mut parts: Vec<Vec<(MultiIndex, Complex64)>> = vec![Vec::new(); cp.n + 1];
    for (alpha, &c) in cp.q.terms() {
        let d = alpha.total_degree() as usize;
        parts[cp.n - d].push((alpha.clone(), c));
    }
    parts
        .into_iter()
        .map(|t| TrigPoly::from_terms(m, t).expect("consistent variable count"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RealMatrix;
    use crate::trigpoly::TorusPoint;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn scalar_single_delay() {
        let sys = DelaySystem::from_real(vec![RealMatrix::from_rows(&[vec![0.5]])]).unwrap();
        let cp = sampledet(&sys).unwrap();
        let want = TrigPoly::from_terms(1, [(MultiIndex::new(vec![0]), c(1.0)), (MultiIndex::new(vec![1]), c(0.5))]).unwrap();
        assert!(cp.q.sub(&want).unwrap().is_zero());
        let p = homogenize(&cp);
        assert_eq!(p.len(), 2);
        assert!((p[0].coeff(&MultiIndex::new(vec![1])) - 0.5).norm() < 1e-12);
        assert!((p[1].coeff(&MultiIndex::new(vec![0])) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn diagonal_gives_product_of_linear_factors() {
        let (a, b) = (0.3, -0.7);
        let sys = DelaySystem::from_real(vec![RealMatrix::diagonal(&[a, b])]).unwrap();
        let cp = sampledet(&sys).unwrap();
        let co = |e| cp.q.coeff(&MultiIndex::new(vec![e]));
        assert!((co(0) - 1.0).norm() < 1e-12);
        assert!((co(1) - (a + b)).norm() < 1e-12);
        assert!((co(2) - a * b).norm() < 1e-12);
        let p = homogenize(&cp);
        assert!((p[0].coeff(&MultiIndex::new(vec![2])) - a * b).norm() < 1e-12);
        assert!((p[1].coeff(&MultiIndex::new(vec![1])) - (a + b)).norm() < 1e-12);
    }

    #[test]
    fn evaluation_matches_direct_determinant() {
        let sys = DelaySystem::from_real(vec![
            RealMatrix::from_rows(&[vec![0.1, 0.4], vec![-0.2, 0.3]]),
            RealMatrix::from_rows(&[vec![0.5, 0.0], vec![0.7, -0.1]]),
        ])
        .unwrap();
        let cp = sampledet(&sys).unwrap();
        for &(t1, t2) in &[(0.3, 1.1), (2.0, 5.5), (4.4, 0.1)] {
            let direct = lu_determinant(&sys.symbol(&[-t1, -t2]).clone().add_identity());
            let got = cp.q.eval(&TorusPoint::new(vec![t1, t2])).unwrap();
            assert!((direct - got).norm() < 1e-12);
        }
    }

    trait AddIdentity {
        fn add_identity(self) -> Self;
    }

    impl AddIdentity for ComplexMatrix {
        fn add_identity(mut self) -> Self {
            for i in 0..self.rows() {
                self[(i, i)] += 1.0;
            }
            self
        }
    }
}
