use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::rng::SeedStream;

/// How [`balanced_assignment`] lays out labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelLayout {
    /// Consecutive blocks of size n/K, community `c` holding nodes `c·n/K ..`.
    Canonical,
    /// Uniformly random balanced labelling.
    Random { seed: u64 },
}

/// Community labels for `n` nodes, stored zero-based in `0..k`.
///
/// Estimators may produce unbalanced labellings; generative code only uses
/// the balanced constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl CommunityAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("community count must be at least 1".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidParameter(format!("label {bad} outside 0..{k}")));
        }
        Ok(Self { labels, k })
    }

    /// Balanced labelling; errors when `k` does not divide `n`.
    pub fn balanced(n: usize, k: usize, layout: LabelLayout) -> Result<Self> {
        if k == 0 || n == 0 || !n.is_multiple_of(k) {
            return Err(Error::Unbalanced { n, k });
        }
        let size = n / k;
        let mut labels: Vec<usize> = (0..n).map(|i| i / size).collect();
        if let LabelLayout::Random { seed } = layout {
            labels.shuffle(&mut SeedStream::new(seed).rng());
        }
        Ok(Self { labels, k })
    }

    pub fn canonical(n: usize, k: usize) -> Result<Self> {
        Self::balanced(n, k, LabelLayout::Canonical)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn same(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn is_balanced(&self) -> bool {
        let n = self.n();
        n.is_multiple_of(self.k) && self.sizes().iter().all(|&s| s == n / self.k)
    }

    /// Membership matrix `Z₀` with `Z₀ᵢⱼ = 1` iff `i` and `j` share a label.
    pub fn membership_matrix(&self) -> SymmetricMatrix<f64> {
        SymmetricMatrix::from_upper_fn(self.n(), |i, j| if self.same(i, j) { 1.0 } else { 0.0 })
            .expect("0/1 entries are finite")
    }

    /// `±1` community vector for two communities: label 0 maps to `+1`.
    pub fn sign_vector(&self) -> Result<Vec<f64>> {
        if self.k != 2 {
            return Err(Error::InvalidParameter(format!(
                "sign vector needs exactly 2 communities, got {}",
                self.k
            )));
        }
        Ok(self.labels.iter().map(|&l| if l == 0 { 1.0 } else { -1.0 }).collect())
    }

    /// Renames labels: node with label `l` receives `perm[l]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: perm.len() });
        }
        let mut seen = vec![false; self.k];
        for &p in perm {
            if p >= self.k || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("relabeling is not a permutation".into()));
            }
        }
        Ok(Self { labels: self.labels.iter().map(|&l| perm[l]).collect(), k: self.k })
    }
}

/// Balanced community assignment in the requested layout.
pub fn balanced_assignment(n: usize, k: usize, layout: LabelLayout) -> Result<CommunityAssignment> {
    CommunityAssignment::balanced(n, k, layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_blocks() {
        let a = CommunityAssignment::canonical(6, 2).unwrap();
        assert_eq!(a.labels(), &[0, 0, 0, 1, 1, 1]);
        let b = CommunityAssignment::canonical(6, 3).unwrap();
        assert_eq!(b.labels(), &[0, 0, 1, 1, 2, 2]);
    }

    #[test]
    fn random_is_balanced_and_deterministic() {
        let a = balanced_assignment(30, 3, LabelLayout::Random { seed: 9 }).unwrap();
        let b = balanced_assignment(30, 3, LabelLayout::Random { seed: 9 }).unwrap();
        assert_eq!(a, b);
        assert!(a.is_balanced());
        assert_ne!(a, CommunityAssignment::canonical(30, 3).unwrap());
    }

    #[test]
    fn indivisible_is_rejected() {
        assert_eq!(CommunityAssignment::canonical(7, 2), Err(Error::Unbalanced { n: 7, k: 2 }));
    }

    #[test]
    fn membership_matrix_properties() {
        let a = balanced_assignment(12, 3, LabelLayout::Random { seed: 1 }).unwrap();
        let z = a.membership_matrix();
        for i in 0..12 {
            assert_eq!(z.get(i, i), 1.0);
            let row: f64 = (0..12).map(|j| z.get(i, j)).sum();
            assert_eq!(row, 4.0);
        }
    }

    #[test]
    fn sign_vector_matches_labels() {
        let a = CommunityAssignment::canonical(4, 2).unwrap();
        let x = a.sign_vector().unwrap();
        assert_eq!(x, vec![1.0, 1.0, -1.0, -1.0]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(x[i] == x[j], a.same(i, j));
            }
        }
        assert!(CommunityAssignment::canonical(6, 3).unwrap().sign_vector().is_err());
    }
}
