use super::{Matrix, Scalar};
use crate::error::{Error, Result};

/// Cholesky failure: the pivot at `pivot` (0-based) was not strictly positive.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("matrix is not positive definite (pivot {} has value {value:e})", pivot + 1)]
pub struct NotPositiveDefinite {
    pub pivot: usize,
    pub value: f64,
}

/// Lower-triangular factor `L` with `A = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

/// Factors a Hermitian matrix, reading only its lower triangle.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> std::result::Result<Cholesky<T>, NotPositiveDefinite> {
    assert!(a.is_square(), "cholesky of a non-square matrix");
    let n = a.rows();
    let mut l: Matrix<T> = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            {
                let li = &l.row(i)[..j];
                let lj = &l.row(j)[..j];
                for (x, y) in li.iter().zip(lj) {
                    s -= *x * y.conj();
                }
            }
            if i == j {
                let d = s.re();
                if !(d > 0.0) || !d.is_finite() {
                    return Err(NotPositiveDefinite { pivot: i, value: d });
                }
                l[(i, i)] = T::from_real(d.sqrt());
            } else {
                let ljj = l[(j, j)].re();
                l[(i, j)] = s.scale(1.0 / ljj);
            }
        }
    }
    Ok(Cholesky { l })
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// `L⁻¹ B`, by forward substitution on rows.
    pub fn solve_lower_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.dim();
        assert_eq!(b.rows(), n);
        let mut x = b.clone();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[(i, k)];
                if lik == T::zero() {
                    continue;
                }
                let (head, tail) = x.as_mut_slice().split_at_mut(i * b.cols());
                let xk = &head[k * b.cols()..(k + 1) * b.cols()];
                let xi = &mut tail[..b.cols()];
                for (a, &c) in xi.iter_mut().zip(xk) {
                    *a -= lik * c;
                }
            }
            let inv = 1.0 / self.l[(i, i)].re();
            for v in x.row_mut(i) {
                *v = v.scale(inv);
            }
        }
        x
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s.scale(1.0 / self.l[(i, i)].re());
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * y[k];
            }
            y[i] = s.scale(1.0 / self.l[(i, i)].re());
        }
        y
    }

    /// `A⁻¹ = L⁻ᴴ L⁻¹`.
    pub fn inverse(&self) -> Matrix<T> {
        let n = self.dim();
        let linv = self.solve_lower_matrix(&Matrix::identity(n));
        let mut out = Matrix::zeros(n, n);
        // (L⁻ᴴ L⁻¹)_ij = Σ_k conj(Linv_ki) Linv_kj
        for k in 0..n {
            let row = linv.row(k);
            for i in 0..=k {
                let a = row[i].conj();
                if a == T::zero() {
                    continue;
                }
                let out_row = out.row_mut(i);
                for j in 0..=k {
                    out_row[j] += a * row[j];
                }
            }
        }
        out
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactor<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl<T: Scalar> LuFactor<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        assert!(a.is_square());
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn determinant(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let n = self.lu.rows();
        (0..n).fold(T::from_real(self.sign), |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if self.singular {
            return Err(Error::Singular);
        }
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let f = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= f * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        Ok(x)
    }
}

pub fn lu_determinant<T: Scalar>(a: &Matrix<T>) -> T {
    LuFactor::new(a).determinant()
}

pub fn lu_solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    LuFactor::new(a).solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermitian_eigs, ComplexMatrix, RealMatrix};
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn identity_factor() {
        let c = cholesky(&RealMatrix::identity(3)).unwrap();
        assert_eq!(c.factor(), &RealMatrix::identity(3));
    }

    #[test]
    fn hand_factorization() {
        let a = RealMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 2.0]]);
        let c = cholesky(&a).unwrap();
        assert_eq!(c.factor(), &RealMatrix::from_rows(&[vec![2.0, 0.0], vec![1.0, 1.0]]));
    }

    #[test]
    fn indefinite_reports_second_pivot() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let err = cholesky(&a).unwrap_err();
        assert_eq!(err.pivot, 1);
        assert!(err.to_string().contains("pivot 2"));
    }

    #[test]
    fn inverse_and_solve() {
        let a = ComplexMatrix::from_rows(&[
            vec![Complex64::new(4.0, 0.0), Complex64::new(1.0, 1.0)],
            vec![Complex64::new(1.0, -1.0), Complex64::new(3.0, 0.0)],
        ]);
        let c = cholesky(&a).unwrap();
        let prod = a.matmul(&c.inverse());
        assert!((&prod - &ComplexMatrix::identity(2)).max_abs() < 1e-14);
        let b = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)];
        let x = c.solve(&b);
        let ax = a.mat_vec(&x);
        assert!((ax[0] - b[0]).norm() < 1e-14 && (ax[1] - b[1]).norm() < 1e-14);
    }

    #[test]
    fn lu_determinant_matches_hand_value() {
        let a = RealMatrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]);
        assert!((lu_determinant(&a) + 6.0).abs() < 1e-15);
        assert_eq!(lu_determinant(&RealMatrix::zeros(2, 2)), 0.0);
    }

    proptest! {
        #[test]
        fn cholesky_iff_positive_spectrum(
            entries in proptest::collection::vec(-1.0f64..1.0, 16),
            shift in -1.5f64..1.5,
        ) {
            let mut a = RealMatrix::from_row_major(4, 4, entries);
            a.symmetrize();
            for i in 0..4 { a[(i, i)] += shift; }
            let ev = hermitian_eigs(&a).unwrap();
            prop_assume!(ev[0].abs() > 1e-6);
            let ok = cholesky(&a).is_ok();
            prop_assert_eq!(ok, ev[0] > 0.0);
            if let Ok(c) = cholesky(&a) {
                let l = c.factor();
                let rec = l.matmul(&l.adjoint());
                prop_assert!((&rec - &a).max_abs() <= 1e-10 * (1.0 + a.max_abs()));
            }
        }
    }
}
