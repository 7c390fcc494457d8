use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{mean_matrix, CommunityAssignment};
use crate::sdp::{sdp_psd1, SolverOptions};

/// Largest `n = rsm` the brute-force oracle accepts.
pub const ENUMERATION_LIMIT: usize = 16;

/// Upper bound on the diagonal's contribution to `⟨M, X⟩` for a mean matrix
/// with zero diagonal: `n(M_in − M_out)/2`. Differences of two mean
/// matrices carry no diagonal at all, so this is pure slack for them.
pub fn diagonal_correction(n: usize, m_in: f64, m_out: f64) -> f64 {
    n as f64 * (m_in - m_out) / 2.0
}

/// All partitions of `0..n` into `k` labelled groups of size `n/k`, one per
/// relabelling orbit: labels appear in order of first occurrence.
pub fn balanced_partitions(n: usize, k: usize) -> Result<Vec<CommunityAssignment>> {
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(Error::Unbalanced { n, k });
    }
    let size = n / k;
    let mut out = Vec::new();
    let mut labels = vec![0; n];
    let mut counts = vec![0; k];
    fn grow(
        pos: usize,
        used: usize,
        size: usize,
        labels: &mut Vec<usize>,
        counts: &mut Vec<usize>,
        out: &mut Vec<CommunityAssignment>,
    ) {
        let (n, k) = (labels.len(), counts.len());
        if pos == n {
            out.push(CommunityAssignment::new(labels.clone(), k).expect("labels below k"));
            return;
        }
        for g in 0..(used + 1).min(k) {
            if counts[g] == size {
                continue;
            }
            labels[pos] = g;
            counts[g] += 1;
            grow(pos + 1, used.max(g + 1), size, labels, counts, out);
            counts[g] -= 1;
        }
    }
    grow(0, 0, size, &mut labels, &mut counts, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    /// `min SDP(M_r − M_s)` per unit of `M_in − M_out`.
    pub min_value: f64,
    pub argmin: CommunityAssignment,
    pub partitions: usize,
}

/// Minimum of `SDP(M_r − M_s)/(M_in − M_out)` over every coarse balanced
/// partition, with `M_r` in canonical block layout.
pub fn enumerate_min_sdp_diff(r: usize, s: usize, m: usize, opts: &SolverOptions) -> Result<Enumeration> {
    if s < 2 || r <= s || m == 0 {
        return Err(Error::InvalidParameter(format!("need r > s ≥ 2 and m ≥ 1, got ({r}, {s}, {m})")));
    }
    let n = r * s * m;
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    let fine = mean_matrix(1.0, 0.0, &CommunityAssignment::canonical(n, r)?);
    let partitions = balanced_partitions(n, s)?;
    let values = partitions
        .par_iter()
        .map(|p| Ok(sdp_psd1(&(&fine - &mean_matrix(1.0, 0.0, p)), opts)?.objective))
        .collect::<Result<Vec<f64>>>()?;
    let (best, &min_value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one partition");
    Ok(Enumeration { min_value, argmin: partitions[best].clone(), partitions: partitions.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::witness_block_z;

    #[test]
    fn partition_counts() {
        assert_eq!(balanced_partitions(12, 2).unwrap().len(), 462);
        assert_eq!(balanced_partitions(6, 3).unwrap().len(), 15);
        let all = balanced_partitions(6, 2).unwrap();
        assert!(all.iter().all(|p| p.is_balanced() && p.labels()[0] == 0));
    }

    #[test]
    fn block_witness_counting_matches_case_one() {
        // Over every coarse partition, ⟨M_r − M_s, Z⟩ ≥ (s²t − st²)m², with equality attained.
        let (r, s, m) = (3, 2, 2);
        let fine = mean_matrix(1.0, 0.0, &CommunityAssignment::canonical(12, r).unwrap());
        let z = witness_block_z::<f64>(r, s, m).unwrap();
        let min = balanced_partitions(12, s)
            .unwrap()
            .iter()
            .map(|p| (&fine - &mean_matrix(1.0, 0.0, p)).inner(z.as_matrix()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 8.0);
    }

    #[test]
    fn relabelled_partition_has_same_value() {
        let fine = mean_matrix(1.0, 0.0, &CommunityAssignment::canonical(12, 3).unwrap());
        let p = &balanced_partitions(12, 2).unwrap()[17];
        let q = p.relabel(&[1, 0]).unwrap();
        let o = SolverOptions::default();
        let a: f64 = sdp_psd1(&(&fine - &mean_matrix(1.0, 0.0, p)), &o).unwrap().objective;
        let b = sdp_psd1(&(&fine - &mean_matrix(1.0, 0.0, &q)), &o).unwrap().objective;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn over_budget_is_rejected() {
        assert!(matches!(
            enumerate_min_sdp_diff(3, 2, 3, &SolverOptions::default()),
            Err(Error::TooLarge { n: 18, .. })
        ));
    }
}
