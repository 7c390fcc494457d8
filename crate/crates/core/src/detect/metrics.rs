use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix as Weights;

use crate::error::{Error, Result};
use crate::model::{CommunityAssignment, SymmetricMatrix};

fn check_signs(v: &[f64]) -> Result<()> {
    match v.iter().position(|&s| s != 1.0 && s != -1.0) {
        Some(i) => Err(Error::InvalidParameter(format!("entry {i} is not ±1"))),
        None => Ok(()),
    }
}

/// `n − |⟨s, x₀⟩|`, invariant under a global sign flip.
pub fn overlap_error(signs: &[f64], x0: &[f64]) -> Result<f64> {
    if signs.len() != x0.len() {
        return Err(Error::DimensionMismatch { expected: x0.len(), found: signs.len() });
    }
    check_signs(signs)?;
    check_signs(x0)?;
    let dot: f64 = signs.iter().zip(x0).map(|(a, b)| a * b).sum();
    Ok(x0.len() as f64 - dot.abs())
}

/// `1 − ⟨x₀, X x₀⟩/n²`, the optimality gap of `X` measured against the truth.
pub fn xi_against_truth(x: &nalgebra::DMatrix<f64>, x0: &[f64]) -> Result<f64> {
    let n = x0.len();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.nrows() });
    }
    let v = nalgebra::DVector::from_column_slice(x0);
    Ok(1.0 - v.dot(&(x * &v)) / (n * n) as f64)
}

/// Entrywise L1 distance between two binary matrices.
pub fn membership_error(z_rounded: &SymmetricMatrix<f64>, z0: &SymmetricMatrix<f64>) -> Result<u64> {
    if z_rounded.n() != z0.n() {
        return Err(Error::DimensionMismatch { expected: z0.n(), found: z_rounded.n() });
    }
    let mut count = 0;
    for (a, b) in z_rounded.as_matrix().iter().zip(z0.as_matrix().iter()) {
        if !(*a == 0.0 || *a == 1.0) || !(*b == 0.0 || *b == 1.0) {
            return Err(Error::InvalidParameter("membership matrices must be binary".into()));
        }
        if a != b {
            count += 1;
        }
    }
    Ok(count)
}

/// Best matching of estimated labels onto true labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Estimated label `l` corresponds to true label `permutation[l]`.
    pub permutation: Vec<usize>,
    pub mismatches: usize,
}

/// Hungarian assignment on the `K × K` confusion matrix.
pub fn align_labels(est: &CommunityAssignment, truth: &CommunityAssignment) -> Result<Alignment> {
    if est.k() != truth.k() {
        return Err(Error::DimensionMismatch { expected: truth.k(), found: est.k() });
    }
    if est.n() != truth.n() {
        return Err(Error::DimensionMismatch { expected: truth.n(), found: est.n() });
    }
    let k = truth.k();
    let mut confusion = Weights::new(k, k, 0i64);
    for (&a, &b) in est.labels().iter().zip(truth.labels()) {
        confusion[(a, b)] += 1;
    }
    let (matched, permutation) = kuhn_munkres(&confusion);
    Ok(Alignment { permutation, mismatches: truth.n() - matched as usize })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_examples() {
        let x0 = vec![1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        assert_eq!(overlap_error(&x0, &x0).unwrap(), 0.0);
        let flipped: Vec<f64> = x0.iter().map(|v| -v).collect();
        assert_eq!(overlap_error(&flipped, &x0).unwrap(), 0.0);
        let mut two_off = x0.clone();
        two_off[0] = -1.0;
        two_off[3] = 1.0;
        assert_eq!(overlap_error(&two_off, &x0).unwrap(), 4.0);
        assert!(overlap_error(&[1.0], &x0).is_err());
        assert!(overlap_error(&[0.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn membership_error_examples() {
        let a = CommunityAssignment::canonical(12, 3).unwrap();
        let z0 = a.membership_matrix();
        assert_eq!(membership_error(&z0, &z0).unwrap(), 0);
        assert_eq!(membership_error(&SymmetricMatrix::ones(12), &z0).unwrap(), 144 - 3 * 16);
        let mut flipped = z0.clone().into_inner();
        flipped[(0, 5)] = 1.0;
        flipped[(5, 0)] = 1.0;
        let flipped = SymmetricMatrix::new(flipped).unwrap();
        assert_eq!(membership_error(&flipped, &z0).unwrap(), 2);
    }

    #[test]
    fn alignment_examples() {
        let t = CommunityAssignment::new(vec![0, 0, 1, 1, 2, 2], 3).unwrap();
        let same = align_labels(&t, &t).unwrap();
        assert_eq!(same, Alignment { permutation: vec![0, 1, 2], mismatches: 0 });
        let t2 = CommunityAssignment::canonical(6, 2).unwrap();
        let swapped = t2.relabel(&[1, 0]).unwrap();
        assert_eq!(align_labels(&swapped, &t2).unwrap(), Alignment { permutation: vec![1, 0], mismatches: 0 });
        let one_off = CommunityAssignment::new(vec![0, 0, 1, 1, 2, 0], 3).unwrap();
        assert_eq!(align_labels(&one_off, &t).unwrap().mismatches, 1);
        assert!(align_labels(&t2, &t).is_err());
    }
}
