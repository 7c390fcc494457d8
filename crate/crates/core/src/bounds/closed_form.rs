use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// `s ∤ r`.
    SNotDivides,
    /// `s | r`, `r/s` odd, configurations near full containment.
    DivOddRatio,
    /// `s | r`, `r/s` even, configurations near full containment.
    DivEvenRatio,
    /// `s | r`, configurations far from full containment.
    DivFar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseCoefficient {
    pub case: CaseId,
    /// Multiplier of `M_in − M_out`.
    pub coeff: f64,
}

/// Applicable cases for `(r, s, m)` and the weakest of their bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCase {
    pub r: usize,
    pub s: usize,
    pub m: usize,
    /// `r mod s`.
    pub t: usize,
    pub cases: Vec<CaseCoefficient>,
    /// Case attaining `bound_coeff`.
    pub case_id: CaseId,
    /// Minimum coefficient over the applicable cases.
    pub bound_coeff: f64,
    /// `m = 1` lies outside the proven range; the numbers are informative only.
    pub exploratory: bool,
}

/// `2m²`, the bound valid across all cases (equal to `2n²/(r²s²)`).
pub fn overall_bound_coeff(m: usize) -> f64 {
    2.0 * (m * m) as f64
}

/// Closed-form coefficients. `m = 1` is accepted only with `exploratory`.
pub fn closed_form_bound(r: usize, s: usize, m: usize, exploratory: bool) -> Result<BoundCase> {
    if s < 2 || r <= s {
        return Err(Error::InvalidParameter(format!("need r > s ≥ 2, got r = {r}, s = {s}")));
    }
    if m == 0 || (m == 1 && !exploratory) {
        return Err(Error::InvalidParameter(format!("need m ≥ 2 (m = 1 only when exploratory), got {m}")));
    }
    let t = r % s;
    let (rf, sf, tf, mf) = (r as f64, s as f64, t as f64, m as f64);
    let m2 = mf * mf;
    let cases = if t != 0 {
        vec![CaseCoefficient { case: CaseId::SNotDivides, coeff: (sf * sf * tf - sf * tf * tf) * m2 }]
    } else {
        let near = if (r / s) % 2 == 1 {
            CaseCoefficient {
                case: CaseId::DivOddRatio,
                coeff: rf * sf * sf * m2 - sf.powi(3) * m2 + 4.0 * sf * mf - 4.0,
            }
        } else {
            CaseCoefficient { case: CaseId::DivEvenRatio, coeff: rf * sf * sf * m2 - 4.0 * m2 }
        };
        vec![near, CaseCoefficient { case: CaseId::DivFar, coeff: 4.0 * (sf - 1.0) * m2 }]
    };
    let weakest = *cases.iter().min_by(|a, b| a.coeff.total_cmp(&b.coeff)).expect("non-empty");
    Ok(BoundCase {
        r,
        s,
        m,
        t,
        cases,
        case_id: weakest.case,
        bound_coeff: weakest.coeff,
        exploratory: m == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff(b: &BoundCase, case: CaseId) -> f64 {
        b.cases.iter().find(|c| c.case == case).unwrap().coeff
    }

    #[test]
    fn table_examples() {
        let b = closed_form_bound(3, 2, 2, false).unwrap();
        assert_eq!((b.t, b.case_id, b.bound_coeff), (1, CaseId::SNotDivides, 8.0));
        let b = closed_form_bound(4, 2, 3, false).unwrap();
        assert_eq!(coeff(&b, CaseId::DivEvenRatio), 12.0 * 9.0);
        let b = closed_form_bound(6, 2, 2, false).unwrap();
        assert_eq!(coeff(&b, CaseId::DivOddRatio), 16.0 * 4.0 + 8.0 * 2.0 - 4.0);
        assert_eq!(b.bound_coeff, 16.0);
    }

    #[test]
    fn never_below_overall_bound() {
        for r in 3..=10 {
            for s in 2..r {
                for m in 2..=5 {
                    let b = closed_form_bound(r, s, m, false).unwrap();
                    assert!(b.bound_coeff >= overall_bound_coeff(m), "r={r} s={s} m={m}");
                }
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(closed_form_bound(2, 2, 2, false).is_err());
        assert!(closed_form_bound(3, 1, 2, false).is_err());
        assert!(closed_form_bound(3, 2, 1, false).is_err());
        assert!(closed_form_bound(3, 2, 1, true).unwrap().exploratory);
    }
}
