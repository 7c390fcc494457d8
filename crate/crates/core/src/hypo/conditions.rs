//! Sufficient separation conditions under which the tests have vanishing
//! error. Each returns `false` for non-positive or non-finite inputs.

fn valid(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

/// Two communities against one: `(n²/2)(M_in − M_out) > 4n(1+δ)√w₊`.
pub fn check_theorem2(n: usize, m_in: f64, m_out: f64, w_plus: f64, delta: f64) -> bool {
    if !valid(&[m_in, m_out, w_plus, delta]) || w_plus <= 0.0 || delta <= 0.0 {
        return false;
    }
    let n = n as f64;
    n * n / 2.0 * (m_in - m_out) > 4.0 * n * (1.0 + delta) * w_plus.sqrt()
}

/// `r` against `s` communities: `2n²/(r²s²)(M_in − M_out) > 4n(1+δ)√w₊`.
pub fn check_theorem4(n: usize, r: usize, s: usize, m_in: f64, m_out: f64, w_plus: f64, delta: f64) -> bool {
    if !valid(&[m_in, m_out, w_plus, delta]) || w_plus <= 0.0 || delta <= 0.0 || r == 0 || s == 0 {
        return false;
    }
    let (n, rs) = (n as f64, (r * s) as f64);
    2.0 * n * n / (rs * rs) * (m_in - m_out) > 4.0 * n * (1.0 + delta) * w_plus.sqrt()
}

/// Consistency of the sequential estimator for `K ≥ 2`:
/// `M_in − M_out > min{2K⁴(K+1)²(1+ε)√w₊/n, K(K−1)log(2(K−1))√w₊/n}`.
pub fn check_theorem7(n: usize, k: usize, m_in: f64, m_out: f64, w_plus: f64, epsilon: f64) -> bool {
    if !valid(&[m_in, m_out, w_plus, epsilon]) || w_plus <= 0.0 || epsilon <= 0.0 || k < 2 || n == 0 {
        return false;
    }
    let (n, k) = (n as f64, k as f64);
    let root = w_plus.sqrt();
    let first = 2.0 * k.powi(4) * (k + 1.0).powi(2) * (1.0 + epsilon) * root / n;
    let second = k * (k - 1.0) * (2.0 * (k - 1.0)).ln() * root / n;
    m_in - m_out > first.min(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SbmModel;

    #[test]
    fn theorem2_on_zig_example() {
        let model = SbmModel::zero_inflated_gaussian(2000, 2, 0.7, 5.0, 2.0, 1.0).unwrap();
        let w = model.subgamma().w_plus;
        assert!(check_theorem2(2000, model.mean_in(), model.mean_out(), w, 0.1));
    }

    #[test]
    fn no_separation_fails_everything() {
        assert!(!check_theorem2(100, 1.0, 1.0, 4.0, 0.1));
        assert!(!check_theorem4(100, 3, 2, 1.0, 1.0, 4.0, 0.1));
        assert!(!check_theorem7(100, 3, 1.0, 1.0, 4.0, 0.1));
    }

    #[test]
    fn theorem4_matches_direct_form() {
        for &gap in &[0.01, 0.1, 1.0, 10.0] {
            let lhs = 2.0 * 144.0 * 144.0 / 36.0 * gap;
            let rhs = 4.0 * 144.0 * 1.1 * 3.0;
            assert_eq!(check_theorem4(144, 3, 2, gap, 0.0, 9.0, 0.1), lhs > rhs);
        }
    }

    #[test]
    fn theorem7_uses_smaller_requirement() {
        // K = 2: log(2)·2·√w₊/n is far below the polynomial form.
        let need = 2.0 * 2f64.ln() * 2.0 / 100.0;
        assert!(check_theorem7(100, 2, need * 1.01, 0.0, 4.0, 0.1));
        assert!(!check_theorem7(100, 2, need * 0.99, 0.0, 4.0, 0.1));
        assert!(!check_theorem7(100, 1, 10.0, 0.0, 4.0, 0.1));
    }
}
