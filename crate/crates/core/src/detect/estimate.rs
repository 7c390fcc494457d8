use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::scalar::Real;
use crate::sdp::{sdp_balanced, sdp_membership, SdpSolution, SolverOptions};

/// Two-community estimate from the balanced relaxation.
#[derive(Debug, Clone)]
pub struct TwoCommunityEstimate<T: Real> {
    /// Leading eigenvector of the solution, scaled to `‖v̂‖² = n`.
    pub v_hat: Vec<T>,
    /// Entrywise signs of `v̂`, with `sign(0) = +1`.
    pub signs: Vec<f64>,
    /// `1 − λ₁(X̂)/n`. Computable without the truth, and a lower bound on
    /// the optimality gap `1 − ⟨x₀, X̂x₀⟩/n²`.
    pub xi_proxy: f64,
    pub solution: SdpSolution<T>,
}

/// Membership estimate from the relaxation over `C`.
#[derive(Debug, Clone)]
pub struct MembershipEstimate<T: Real> {
    pub z_hat: DMatrix<T>,
    /// `1` where `Ẑᵢⱼ > 1/2`, else `0`.
    pub z_rounded: SymmetricMatrix<f64>,
    pub solution: SdpSolution<T>,
}

pub fn estimate_two<T: Real>(w: &SymmetricMatrix<T>, opts: &SolverOptions) -> Result<TwoCommunityEstimate<T>> {
    let n = w.n();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {n}")));
    }
    let solution = sdp_balanced(w, opts)?;
    let x = solution.point.to_matrix();
    let eig = SymmetricEigen::new(x);
    let top = eig.eigenvalues.imax();
    let lambda = eig.eigenvalues[top];
    let mut v = eig.eigenvectors.column(top).into_owned();
    let norm = v.norm();
    if norm > T::zero() {
        v *= T::lit(n as f64).sqrt() / norm;
    }
    let signs = v.iter().map(|&vi| if vi < T::zero() { -1.0 } else { 1.0 }).collect();
    Ok(TwoCommunityEstimate {
        v_hat: v.iter().copied().collect(),
        signs,
        xi_proxy: 1.0 - lambda.as_f64() / n as f64,
        solution,
    })
}

/// Solves the membership relaxation with total mass `n²/k` and rounds at 1/2.
pub fn estimate_membership<T: Real>(
    w: &SymmetricMatrix<T>,
    k: usize,
    opts: &SolverOptions,
) -> Result<MembershipEstimate<T>> {
    let n = w.n();
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::Unbalanced { n, k });
    }
    let lambda = (n * n / k) as f64;
    let solution = sdp_membership(w, lambda, opts)?;
    let z_hat = solution.point.to_matrix();
    let half = T::lit(0.5);
    let z_rounded = SymmetricMatrix::from_upper_fn(n, |i, j| if z_hat[(i, j)] > half { 1.0 } else { 0.0 })?;
    Ok(MembershipEstimate { z_hat, z_rounded, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{membership_error, overlap_error};
    use crate::model::{mean_matrix, CommunityAssignment, LabelLayout};

    #[test]
    fn mean_matrix_two_communities_is_recovered() {
        let a = CommunityAssignment::balanced(24, 2, LabelLayout::Random { seed: 4 }).unwrap();
        let m = mean_matrix(2.0, 0.5, &a);
        let est = estimate_two(&m, &SolverOptions::default()).unwrap();
        let x0 = a.sign_vector().unwrap();
        assert_eq!(overlap_error(&est.signs, &x0).unwrap(), 0.0);
        let norm2: f64 = est.v_hat.iter().map(|v| v * v).sum();
        assert!((norm2 - 24.0).abs() < 1e-8);
        assert!(est.xi_proxy.abs() < 1e-4);
    }

    #[test]
    fn mean_matrix_membership_is_recovered() {
        let a = CommunityAssignment::balanced(18, 3, LabelLayout::Random { seed: 2 }).unwrap();
        let m = mean_matrix(3.0, 1.0, &a);
        let est = estimate_membership(&m, 3, &SolverOptions::default()).unwrap();
        assert_eq!(membership_error(&est.z_rounded, &a.membership_matrix()).unwrap(), 0);
    }

    #[test]
    fn small_perturbation_still_rounds_to_truth() {
        let a = CommunityAssignment::canonical(12, 3).unwrap();
        let m = mean_matrix(3.0, 1.0, &a);
        let raw = SymmetricMatrix::from_upper_fn(12, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0).unwrap();
        let noise = raw.scaled(1e-3 / raw.frobenius_norm());
        let est = estimate_membership(&(&m + &noise), 3, &SolverOptions::default()).unwrap();
        assert_eq!(membership_error(&est.z_rounded, &a.membership_matrix()).unwrap(), 0);
    }

    #[test]
    fn zero_input_is_handled() {
        let w = SymmetricMatrix::<f64>::zeros(6);
        let est = estimate_two(&w, &SolverOptions::default()).unwrap();
        assert_eq!(est.signs.len(), 6);
        let m = estimate_membership(&w, 2, &SolverOptions::default()).unwrap();
        assert!(membership_error(&m.z_rounded, &CommunityAssignment::canonical(6, 2).unwrap().membership_matrix()).unwrap() <= 36);
        assert!(estimate_membership(&w, 4, &SolverOptions::default()).is_err());
    }
}
