use num_complex::Complex64;

use super::{eigenvalues, ComplexMatrix};
use crate::error::{Error, Result};

/// Roots of `Σ coeffs[j] zʲ` (ascending powers) as companion-matrix eigenvalues.
pub fn roots_via_companion(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let lead = *coeffs.last().ok_or(Error::ZeroLeadingCoefficient)?;
    if lead.norm() == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(vec![]);
    }
    // first row -c_{deg-1}/c_deg, ..., -c_0/c_deg; ones on the subdiagonal
    let companion = ComplexMatrix::from_fn(deg, deg, |i, j| {
        if i == 0 {
            -coeffs[deg - 1 - j] / lead
        } else if j + 1 == i {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    eigenvalues(&companion)
}
