use serde::Serialize;

use crate::numerics::RealMatrix;

/// Real symmetric matrix stored as its upper-triangle nonzeros `(i, j, v)`,
/// `i ≤ j`, each off-diagonal entry standing for both `(i,j)` and `(j,i)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSym {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Appends an entry; the position is normalized to the upper triangle.
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.dim && j < self.dim, "entry outside the block");
        if v != 0.0 {
            self.entries.push((i.min(j), i.max(j), v));
        }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sorts by position and merges repeated positions.
    pub fn canonicalize(&mut self) {
        self.entries.sort_by_key(|a| (a.0, a.1));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out.retain(|e| e.2 != 0.0);
        self.entries = out;
    }

    /// `⟨A, W⟩ = Σ_pq A_pq W_pq`; `W` need not be symmetric.
    pub fn dot(&self, w: &RealMatrix) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                if i == j {
                    v * w[(i, i)]
                } else {
                    v * (w[(i, j)] + w[(j, i)])
                }
            })
            .sum()
    }

    /// `target += s · A`.
    pub fn add_to(&self, target: &mut RealMatrix, s: f64) {
        for &(i, j, v) in &self.entries {
            target[(i, j)] += s * v;
            if i != j {
                target[(j, i)] += s * v;
            }
        }
    }

    pub fn to_dense(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.dim, self.dim);
        self.add_to(&mut m, 1.0);
        m
    }

    pub fn norm_fro(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨A, B⟩` for two sparse symmetric matrices in canonical order.
    pub fn dot_sparse(&self, other: &Self) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut s = 0.0;
        while a < self.entries.len() && b < other.entries.len() {
            let (i, j, v) = self.entries[a];
            let (p, q, w) = other.entries[b];
            match (i, j).cmp(&(p, q)) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    s += if i == j { v * w } else { 2.0 * v * w };
                    a += 1;
                    b += 1;
                }
            }
        }
        s
    }
}

/// Problem dimensions: `N` primal vector length, `M` constraints, `S` Gram size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProblemDims {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    /// Size of the real PSD block actually solved.
    pub block: usize,
}

/// `min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0` over one real symmetric block.
/// Dual: `max bᵀy  s.t.  Z = C − Σ y_i A_i ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub c: SparseSym,
    pub a: Vec<SparseSym>,
    pub b: Vec<f64>,
    pub dims: ProblemDims,
}

impl SdpProblem {
    /// Plain problem whose Gram size is the block size.
    pub fn new(c: SparseSym, a: Vec<SparseSym>, b: Vec<f64>) -> Self {
        let block = c.dim();
        let dims = ProblemDims {
            n: block * block,
            m: a.len(),
            s: block,
            block,
        };
        Self { c, a, b, dims }
    }

    pub fn block(&self) -> usize {
        self.dims.block
    }

    /// `A(X)`.
    pub fn apply(&self, x: &RealMatrix) -> Vec<f64> {
        self.a.iter().map(|ai| ai.dot(x)).collect()
    }

    /// `Σ y_i A_i` as a dense matrix.
    pub fn adjoint(&self, y: &[f64]) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.block(), self.block());
        for (ai, &yi) in self.a.iter().zip(y) {
            if yi != 0.0 {
                ai.add_to(&mut out, yi);
            }
        }
        out
    }

    /// Checks that every matrix lives in the block and `b` matches `A`.
    pub fn is_consistent(&self) -> bool {
        let s = self.block();
        self.c.dim() == s
            && self.a.len() == self.b.len()
            && self.a.iter().all(|ai| ai.dim() == s)
            && self.b.iter().all(|v| v.is_finite())
    }
}
