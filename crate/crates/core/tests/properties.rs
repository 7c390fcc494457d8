use nalgebra::DMatrix;
use proptest::prelude::*;

use sbm_sdp::detect::{membership_error, overlap_error};
use sbm_sdp::hypo::{estimate_means, threshold};
use sbm_sdp::model::CommunityAssignment;
use sbm_sdp::sdp::{norm_inf_to_one, sdp_psd1, GROTHENDIECK_BOUND};
use sbm_sdp::{Matrix, SolverOptions};

fn tight() -> SolverOptions {
    SolverOptions { tol_obj: 1e-12, max_sweeps: 20_000, ..SolverOptions::default() }
}

fn symmetric(max_n: usize) -> impl Strategy<Value = Matrix> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| {
            let a = DMatrix::from_vec(n, n, v);
            Matrix::symmetrize(&a).unwrap()
        })
    })
}

fn signs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(any::<bool>().prop_map(|b| if b { 1.0 } else { -1.0 }), n)
}

fn best_sign_vector(m: &Matrix) -> f64 {
    let n = m.n();
    (0u32..1 << n)
        .map(|mask| {
            let x: Vec<f64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.get(i, j) * x[i] * x[j]).sum()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich(m in symmetric(8)) {
        let sdp = sdp_psd1(&m, &tight()).unwrap().objective;
        prop_assert!(best_sign_vector(&m) <= sdp + 1e-7);
        prop_assert!(sdp <= GROTHENDIECK_BOUND * norm_inf_to_one(&m).unwrap() + 1e-6);
    }

    #[test]
    fn positive_scaling(m in symmetric(10), c in 0.01f64..100.0) {
        let a = sdp_psd1(&m, &tight()).unwrap().objective;
        let b = sdp_psd1(&m.scaled(c), &tight()).unwrap().objective;
        prop_assert!(rel_close(c * a, b, 1e-6), "{} vs {}", c * a, b);
    }

    #[test]
    fn diagonal_shift(m in symmetric(10), shift in proptest::collection::vec(-3.0f64..3.0, 10)) {
        let d = &shift[..m.n()];
        let a = sdp_psd1(&m, &tight()).unwrap().objective;
        let b = sdp_psd1(&m.add_diagonal(d).unwrap(), &tight()).unwrap().objective;
        prop_assert!(rel_close(a + d.iter().sum::<f64>(), b, 1e-6));
    }

    #[test]
    fn two_by_two_is_exact(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        let m = Matrix::new(DMatrix::from_row_slice(2, 2, &[a, b, b, c])).unwrap();
        let got = sdp_psd1(&m, &SolverOptions::default()).unwrap().objective;
        prop_assert!((got - (a + c + 2.0 * b.abs())).abs() <= 1e-9);
    }

    #[test]
    fn relabelling_nodes_keeps_value(m in symmetric(10), seed in any::<u64>()) {
        let n = m.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = Matrix::from_upper_fn(n, |i, j| m.get(perm[i], perm[j])).unwrap();
        let a = sdp_psd1(&m, &tight()).unwrap().objective;
        let b = sdp_psd1(&p, &tight()).unwrap().objective;
        prop_assert!(rel_close(a, b, 1e-6));
    }

    #[test]
    fn overlap_sign_flip(pair in (1usize..40).prop_flat_map(|n| (signs(n), signs(n)))) {
        let (s, x) = pair;
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let e = overlap_error(&s, &x).unwrap();
        prop_assert_eq!(e, overlap_error(&neg, &x).unwrap());
        prop_assert!((0.0..=s.len() as f64).contains(&e));
    }

    #[test]
    fn membership_error_symmetric(
        labels in (2usize..30).prop_flat_map(|n| (proptest::collection::vec(0usize..3, n), proptest::collection::vec(0usize..3, n)))
    ) {
        let a = CommunityAssignment::new(labels.0, 3).unwrap().membership_matrix();
        let b = CommunityAssignment::new(labels.1, 3).unwrap().membership_matrix();
        let ab = membership_error(&a, &b).unwrap();
        prop_assert_eq!(ab, membership_error(&b, &a).unwrap());
        // Unit diagonals on both sides: only off-diagonal pairs count, twice each.
        let n = a.n();
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| a.get(i, j) != b.get(i, j)).count();
        prop_assert_eq!(ab, 2 * pairs as u64);
    }

    #[test]
    fn means_ignore_label_names(m in symmetric(12), labels in proptest::collection::vec(0usize..3, 12)) {
        let n = m.n();
        let w = m.with_zero_diagonal();
        let a = CommunityAssignment::new(labels[..n].to_vec(), 3).unwrap();
        let b = a.relabel(&[2, 0, 1]).unwrap();
        match (estimate_means(&w, &a), estimate_means(&w, &b)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(x), Err(y)) => prop_assert_eq!(x, y),
            _ => prop_assert!(false, "outcomes differ"),
        }
    }

    #[test]
    fn rejection_monotone_in_delta(stat in 0.0f64..1e4, w in 0.1f64..100.0, d1 in 0.01f64..2.0, d2 in 0.01f64..2.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let reject = |d: f64| stat > threshold(50, w, d);
        prop_assert!(reject(hi) <= reject(lo));
    }
}
