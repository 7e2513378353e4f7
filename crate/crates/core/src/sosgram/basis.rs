use crate::trigpoly::MultiIndex;

/// Monomials `z^β` with `0 ≤ β_i ≤ k`, in graded-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    m: usize,
    k: usize,
    monomials: Vec<MultiIndex>,
    /// Mixed-radix code of `β` to position in `monomials`.
    lookup: Vec<usize>,
}

impl MonomialBasis {
    pub fn new(m: usize, k: usize) -> Self {
        let radix = k + 1;
        let total = radix.pow(m as u32);
        let mut monomials: Vec<MultiIndex> = (0..total)
            .map(|mut code| {
                let mut e = vec![0i32; m];
                for slot in e.iter_mut().rev() {
                    *slot = (code % radix) as i32;
                    code /= radix;
                }
                MultiIndex::new(e)
            })
            .collect();
        monomials.sort_by(|a, b| {
            a.total_degree()
                .cmp(&b.total_degree())
                .then_with(|| a.as_slice().cmp(b.as_slice()))
        });
        let mut lookup = vec![0; total];
        for (pos, beta) in monomials.iter().enumerate() {
            lookup[Self::code(radix, beta.as_slice())] = pos;
        }
        Self {
            m,
            k,
            monomials,
            lookup,
        }
    }

    fn code(radix: usize, e: &[i32]) -> usize {
        e.iter().fold(0, |acc, &a| acc * radix + a as usize)
    }

    pub fn nvars(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn get(&self, pos: usize) -> &MultiIndex {
        &self.monomials[pos]
    }

    /// Position of `β`, if it belongs to the basis.
    pub fn position(&self, e: &[i32]) -> Option<usize> {
        if e.len() != self.m || e.iter().any(|&a| a < 0 || a as usize > self.k) {
            return None;
        }
        Some(self.lookup[Self::code(self.k + 1, e)])
    }

    /// `b_k(θ)`: the basis monomials evaluated at `z = e^{iθ}`.
    pub fn eval(&self, theta: &[f64]) -> Vec<num_complex::Complex64> {
        self.monomials
            .iter()
            .map(|b| num_complex::Complex64::cis(b.phase(theta)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_and_order() {
        let b = MonomialBasis::new(2, 2);
        assert_eq!(b.len(), 9);
        let got: Vec<&[i32]> = b.monomials().iter().map(|m| m.as_slice()).collect();
        assert_eq!(
            got,
            vec![&[0, 0][..], &[0, 1], &[1, 0], &[0, 2], &[1, 1], &[2, 0], &[1, 2], &[2, 1], &[2, 2]]
        );
        for (i, m) in b.monomials().iter().enumerate() {
            assert_eq!(b.position(m.as_slice()), Some(i));
        }
        assert_eq!(b.position(&[3, 0]), None);
        assert_eq!(b.position(&[-1, 0]), None);
    }
}
