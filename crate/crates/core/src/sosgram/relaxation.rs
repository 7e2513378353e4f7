use num_complex::Complex64;
use serde::Serialize;

use super::basis::MonomialBasis;
use crate::error::{Error, Result};
use crate::sdpsolve::{ProblemDims, SdpProblem, SparseSym};
use crate::trigpoly::{MultiIndex, TrigPolyMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelaxationMode {
    /// `H(z) = Bᴴ X B`, `X ⪰ 0`, constant objective.
    Feasibility,
    /// Maximize `h̲` subject to `H(z) − h̲ I = Bᴴ X B`, `X ⪰ 0`.
    MaximizeLowerBound,
}

/// Size bookkeeping of the order-`k` relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelaxationDims {
    /// Matrix size of the polynomial matrix.
    pub n: usize,
    /// Number of variables.
    pub m: usize,
    pub k: usize,
    /// `(k+1)^m`.
    pub basis_size: usize,
    /// Hermitian Gram size `S = (k+1)^m · n`.
    pub s: usize,
    /// Real PSD block size `2S`.
    pub block: usize,
    /// Primal vector length `block²`.
    pub n_vec: usize,
    /// Equality constraints `M`.
    pub constraints: usize,
}

/// Dimensions without building the problem.
pub fn relaxation_dims(n: usize, m: usize, k: usize, mode: RelaxationMode) -> RelaxationDims {
    let basis_size = (k + 1).pow(m as u32);
    let s = basis_size * n;
    let full = n * n * (2 * k + 1).pow(m as u32);
    RelaxationDims {
        n,
        m,
        k,
        basis_size,
        s,
        block: 2 * s,
        n_vec: 4 * s * s,
        constraints: match mode {
            RelaxationMode::Feasibility => full,
            RelaxationMode::MaximizeLowerBound => full - 1,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Part {
    Re,
    Im,
}

/// Which coefficient an equality constraint matches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowKey {
    pub alpha: MultiIndex,
    pub i: usize,
    pub j: usize,
    pub part: Part,
}

#[derive(Debug, Clone)]
pub struct Relaxation {
    pub problem: SdpProblem,
    pub mode: RelaxationMode,
    pub dims: RelaxationDims,
    pub basis: MonomialBasis,
    pub target: TrigPolyMatrix,
    /// Row keys of `problem`, in order.
    pub rows: Vec<RowKey>,
    /// In bound mode `h̲ = offset − ⟨C, Y⟩`; zero otherwise.
    pub offset: f64,
}

/// Every `α ∈ [−k, k]^m` in lexicographic order.
pub(crate) fn alpha_box(m: usize, k: usize) -> Vec<MultiIndex> {
    let side = 2 * k + 1;
    (0..side.pow(m as u32))
        .map(|mut code| {
            let mut e = vec![0i32; m];
            for slot in e.iter_mut().rev() {
                *slot = (code % side) as i32 - k as i32;
                code /= side;
            }
            MultiIndex::new(e)
        })
        .collect()
}

fn row_keys(n: usize, m: usize, k: usize) -> Vec<RowKey> {
    let mut rows = Vec::new();
    for alpha in alpha_box(m, k) {
        for i in 0..n {
            for j in i..n {
                if i == j && !alpha.is_canonical() {
                    continue;
                }
                rows.push(RowKey {
                    alpha: alpha.clone(),
                    i,
                    j,
                    part: Part::Re,
                });
                if i != j || !alpha.is_zero() {
                    rows.push(RowKey {
                        alpha: alpha.clone(),
                        i,
                        j,
                        part: Part::Im,
                    });
                }
            }
        }
    }
    rows
}

/// Realified constraint matrix for `Re/Im Σ_{γ−β=α} X_{(β,i),(γ,j)}`, with
/// `X = (Y₁₁ + Y₂₂)/2 + i (Y₂₁ − Y₁₂)/2`.
fn row_matrix(basis: &MonomialBasis, n: usize, key: &RowKey) -> SparseSym {
    let s = basis.len() * n;
    let mut a = SparseSym::new(2 * s);
    for (pb, beta) in basis.monomials().iter().enumerate() {
        let gamma = beta.add(&key.alpha);
        let Some(pg) = basis.position(gamma.as_slice()) else {
            continue;
        };
        let p = pb * n + key.i;
        let q = pg * n + key.j;
        match key.part {
            Part::Re if p == q => {
                a.push(p, p, 0.5);
                a.push(s + p, s + p, 0.5);
            }
            Part::Re => {
                a.push(p, q, 0.25);
                a.push(s + p, s + q, 0.25);
            }
            Part::Im => {
                a.push(s + p, q, 0.25);
                a.push(p, s + q, -0.25);
            }
        }
    }
    a.canonicalize();
    a
}

fn rhs(h: &TrigPolyMatrix, key: &RowKey) -> f64 {
    let c: Complex64 = h.get(key.i, key.j).coeff(&key.alpha);
    match key.part {
        Part::Re => c.re,
        Part::Im => c.im,
    }
}

/// Order-`k` Gram relaxation of `H(z) ⪰ h̲ I` over the torus.
pub fn build_relaxation(h: &TrigPolyMatrix, k: usize, mode: RelaxationMode) -> Result<Relaxation> {
    if k == 0 {
        return Err(Error::InvalidOrder("relaxation order must be at least 1".into()));
    }
    let degree = h.max_degree() as usize;
    if degree > k {
        return Err(Error::BasisTooSmall { k, degree });
    }
    if !h.is_hermitian(1e-10) {
        return Err(Error::NotHermitian(f64::NAN));
    }
    let n = h.dim();
    let m = h.nvars();
    let basis = MonomialBasis::new(m, k);
    let dims = relaxation_dims(n, m, k, mode);
    let keys = row_keys(n, m, k);
    let mut a: Vec<SparseSym> = keys.iter().map(|key| row_matrix(&basis, n, key)).collect();
    let mut b: Vec<f64> = keys.iter().map(|key| rhs(h, key)).collect();

    let (c, rows, offset) = match mode {
        RelaxationMode::Feasibility => (SparseSym::new(dims.block), keys, 0.0),
        RelaxationMode::MaximizeLowerBound => {
            let zero = MultiIndex::zero(m);
            let diag: Vec<usize> = (0..n)
                .map(|i| {
                    keys.iter()
                        .position(|r| r.alpha == zero && r.i == i && r.j == i && r.part == Part::Re)
                        .expect("diagonal constant row present")
                })
                .collect();
            let d0 = diag[0];
            let c = a[d0].clone();
            for &d in &diag[1..] {
                for &(p, q, v) in c.entries() {
                    a[d].push(p, q, -v);
                }
                a[d].canonicalize();
                b[d] -= b[d0];
            }
            let offset = b[d0];
            a.remove(d0);
            b.remove(d0);
            let mut rows = keys;
            rows.remove(d0);
            (c, rows, offset)
        }
    };
    debug_assert_eq!(a.len(), dims.constraints);
    let problem = SdpProblem {
        c,
        a,
        b,
        dims: ProblemDims {
            n: dims.n_vec,
            m: dims.constraints,
            s: dims.s,
            block: dims.block,
        },
    };
    Ok(Relaxation {
        problem,
        mode,
        dims,
        basis,
        target: h.clone(),
        rows,
        offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::TrigPoly;

    fn cos_poly() -> TrigPoly {
        TrigPoly::from_terms(
            1,
            [
                (MultiIndex::new(vec![0]), Complex64::new(2.0, 0.0)),
                (MultiIndex::new(vec![1]), Complex64::new(1.0, 0.0)),
                (MultiIndex::new(vec![-1]), Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn dims_of_reference_sizes() {
        use RelaxationMode::Feasibility as F;
        assert_eq!(relaxation_dims(3, 2, 3, F).s, 48);
        assert_eq!(relaxation_dims(3, 2, 3, F).constraints, 441);
        assert_eq!(relaxation_dims(4, 3, 4, F).s, 500);
        assert_eq!(relaxation_dims(4, 4, 4, F).s, 2500);
    }

    #[test]
    fn explicit_square_satisfies_constraints() {
        let h = TrigPolyMatrix::from_scalar(cos_poly());
        let r = build_relaxation(&h, 1, RelaxationMode::Feasibility).unwrap();
        assert_eq!(r.problem.dims.block, 4);
        assert_eq!(r.problem.a.len(), 3);
        // X = [[1,1],[1,1]] realified as diag(X, X)
        let mut y = crate::numerics::RealMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            y[(i, j)] = 1.0;
            y[(i + 2, j + 2)] = 1.0;
        }
        let ax = r.problem.apply(&y);
        for (v, b) in ax.iter().zip(&r.problem.b) {
            assert!((v - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_small_basis() {
        let h = TrigPolyMatrix::from_scalar(cos_poly());
        assert!(matches!(
            build_relaxation(&h, 0, RelaxationMode::Feasibility),
            Err(Error::InvalidOrder(_))
        ));
        let sq = cos_poly().mul(&cos_poly()).unwrap();
        assert!(matches!(
            build_relaxation(&TrigPolyMatrix::from_scalar(sq), 1, RelaxationMode::Feasibility),
            Err(Error::BasisTooSmall { k: 1, degree: 2 })
        ));
    }
}
