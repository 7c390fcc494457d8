use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::rng::SeedStream;

/// Gaussian orthogonal ensemble draw: independent entries above the diagonal
/// with variance `1/n`, diagonal variance `2/n`.
pub fn sample_goe(n: usize, seed: u64) -> Result<SymmetricMatrix<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("GOE dimension must be at least 1".into()));
    }
    let mut rng = SeedStream::new(seed).rng();
    let off = (1.0 / n as f64).sqrt();
    let diag = (2.0 / n as f64).sqrt();
    SymmetricMatrix::from_upper_fn(n, |i, j| {
        let z: f64 = rng.sample(StandardNormal);
        if i == j {
            diag * z
        } else {
            off * z
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    #[test]
    fn entries_are_centred() {
        let n = 4;
        let reps = 10_000;
        let mut sum = 0.0;
        for s in 0..reps {
            sum += sample_goe(n, s).unwrap().total_sum();
        }
        // Var(Σᵢⱼ Bᵢⱼ) = n·2/n + n(n−1)·4/(2n) = 2 + 2(n−1).
        let se = ((2.0 + 2.0 * (n as f64 - 1.0)) / reps as f64).sqrt();
        let mean = sum / reps as f64;
        assert!(mean.abs() <= 4.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn off_diagonal_variance() {
        let n = 10;
        let reps = 100_000u64;
        let mut sq = 0.0;
        for s in 0..reps {
            let b = sample_goe(n, s).unwrap();
            sq += b.get(0, 1) * b.get(0, 1);
        }
        let var = sq / reps as f64;
        assert!((var - 0.1).abs() <= 0.01, "variance {var}");
    }

    #[test]
    fn semicircle_edge() {
        let n = 500;
        let b = sample_goe(n, 77).unwrap();
        let eig = SymmetricEigen::new(b.into_inner());
        let top = eig.eigenvalues.max();
        // Entries have variance 1/n, so the spectrum edge sits at 2.
        assert!((1.8..=2.1).contains(&top), "top eigenvalue {top}");
    }
}
