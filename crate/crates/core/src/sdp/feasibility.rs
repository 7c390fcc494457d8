use nalgebra::{DMatrix, SymmetricEigen};

use crate::scalar::Real;

/// Independent feasibility check of a dense candidate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    /// `maxᵢ |Xᵢᵢ − 1|`.
    pub diagonal: f64,
    /// Smallest eigenvalue of the symmetric part.
    pub min_eigenvalue: f64,
    /// `maxᵢⱼ |Xᵢⱼ − Xⱼᵢ|`.
    pub asymmetry: f64,
    /// `Σᵢⱼ Xᵢⱼ`, accumulated in `f64` with compensated summation.
    pub total_sum: f64,
    /// `minᵢⱼ Xᵢⱼ`.
    pub min_entry: f64,
}

impl FeasibilityReport {
    /// Membership in the elliptope within `tol`.
    pub fn in_elliptope(&self, tol: f64) -> bool {
        self.diagonal <= tol && self.min_eigenvalue >= -tol && self.asymmetry <= tol
    }
}

/// Eigendecomposition-based check of `X ⪰ 0, Xᵢᵢ = 1`.
pub fn check_elliptope<T: Real>(x: &DMatrix<T>) -> FeasibilityReport {
    let n = x.nrows();
    let xf = x.map(|v| v.as_f64());
    let mut diagonal = 0.0f64;
    let mut asymmetry = 0.0f64;
    let mut min_entry = f64::INFINITY;
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for j in 0..n {
        for i in 0..n {
            let v = xf[(i, j)];
            if i == j {
                diagonal = diagonal.max((v - 1.0).abs());
            }
            asymmetry = asymmetry.max((v - xf[(j, i)]).abs());
            min_entry = min_entry.min(v);
            let y = v - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
    }
    let sym = (&xf + xf.transpose()) * 0.5;
    let min_eigenvalue = if n == 0 { 0.0 } else { SymmetricEigen::new(sym).eigenvalues.min() };
    FeasibilityReport { diagonal, min_eigenvalue, asymmetry, total_sum: sum, min_entry }
}
