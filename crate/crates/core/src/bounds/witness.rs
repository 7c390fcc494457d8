use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::scalar::Real;

fn check(r: usize, s: usize, m: usize) -> Result<()> {
    if s < 2 || r <= s || m == 0 {
        return Err(Error::InvalidParameter(format!("need r > s ≥ 2 and m ≥ 1, got ({r}, {s}, {m})")));
    }
    Ok(())
}

/// Block-diagonal all-ones matrix with `r` blocks of size `sm`, one per fine
/// community of the canonical labelling. A sum of `r` rank-one 0/1 outer
/// products, so it lies in the elliptope.
pub fn witness_block_z<T: Real>(r: usize, s: usize, m: usize) -> Result<SymmetricMatrix<T>> {
    check(r, s, m)?;
    let size = s * m;
    SymmetricMatrix::from_upper_fn(r * size, |i, j| if i / size == j / size { T::one() } else { T::zero() })
}

/// `s` diagonal blocks of size `rm`, each tiled by `sm × sm` sub-blocks of
/// alternating sign. Each block is `uuᵀ` with `u` alternating `±𝟙` per
/// sub-block. Requires `s | r`.
pub fn witness_alternating_ztilde<T: Real>(r: usize, s: usize, m: usize) -> Result<SymmetricMatrix<T>> {
    check(r, s, m)?;
    if !r.is_multiple_of(s) {
        return Err(Error::InvalidParameter(format!("alternating witness needs s | r, got r = {r}, s = {s}")));
    }
    let (sub, big) = (s * m, r * m);
    SymmetricMatrix::from_upper_fn(r * s * m, |i, j| {
        if i / big != j / big {
            T::zero()
        } else if (i / sub + j / sub) % 2 == 0 {
            T::one()
        } else {
            -T::one()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mean_matrix, CommunityAssignment};
    use crate::sdp::check_elliptope;

    #[test]
    fn block_witness_shape() {
        let z = witness_block_z::<f64>(3, 2, 2).unwrap();
        assert_eq!(z.n(), 12);
        assert_eq!(z.get(0, 3), 1.0);
        assert_eq!(z.get(3, 4), 0.0);
        assert_eq!(z.total_sum(), 3.0 * 16.0);
    }

    #[test]
    fn witnesses_are_feasible() {
        for (r, s, m) in [(3, 2, 2), (4, 2, 2), (6, 2, 2), (6, 3, 2), (5, 3, 3)] {
            let z = witness_block_z::<f64>(r, s, m).unwrap();
            let rep = check_elliptope(z.as_matrix());
            assert!(rep.diagonal == 0.0 && rep.min_eigenvalue >= -1e-10);
            if r % s == 0 {
                let zt = witness_alternating_ztilde::<f64>(r, s, m).unwrap();
                let rep = check_elliptope(zt.as_matrix());
                assert!(rep.diagonal == 0.0 && rep.min_eigenvalue >= -1e-10);
            }
        }
        assert!(witness_alternating_ztilde::<f64>(3, 2, 2).is_err());
    }

    #[test]
    fn alternating_witness_layout() {
        // r = 6, s = 2, m = 2: two 12 × 12 blocks of 4 × 4 tiles.
        let z = witness_alternating_ztilde::<f64>(6, 2, 2).unwrap();
        assert_eq!(z.n(), 24);
        assert_eq!(z.get(0, 3), 1.0);
        assert_eq!(z.get(0, 4), -1.0);
        assert_eq!(z.get(0, 8), 1.0);
        assert_eq!(z.get(0, 12), 0.0);
        assert_eq!(z.get(12, 16), -1.0);
    }

    #[test]
    fn alternating_inner_product_under_containment() {
        // Fine communities nested in coarse ones: 2s³·Σ(r/s − i)(−1)^{i+1}·m².
        for (r, s, m) in [(4, 2, 2), (6, 2, 2), (6, 3, 2), (8, 2, 1)] {
            let n = r * s * m;
            let fine = CommunityAssignment::canonical(n, r).unwrap();
            let coarse = CommunityAssignment::canonical(n, s).unwrap();
            let diff = &mean_matrix(1.0, 0.0, &fine) - &mean_matrix(1.0, 0.0, &coarse);
            let zt = witness_alternating_ztilde::<f64>(r, s, m).unwrap();
            let q = r / s;
            let alt: i64 = (1..q).map(|i| (q - i) as i64 * if i % 2 == 1 { 1 } else { -1 }).sum();
            let expected = 2.0 * (s * s * s) as f64 * alt as f64 * (m * m) as f64;
            assert_eq!(diff.inner(zt.as_matrix()), expected, "r={r} s={s} m={m}");
        }
    }
}
