//! Lower bounds on `SDP(M_r − M_s)` for balanced mean matrices with `r > s`
//! communities: the per-case closed forms, the explicit feasible witnesses
//! behind them, and a brute-force oracle over all coarse partitions.

mod closed_form;
mod enumerate;
mod witness;

pub use closed_form::{closed_form_bound, overall_bound_coeff, BoundCase, CaseId, CaseCoefficient};
pub use enumerate::{
    balanced_partitions, diagonal_correction, enumerate_min_sdp_diff, Enumeration, ENUMERATION_LIMIT,
};
pub use witness::{witness_alternating_ztilde, witness_block_z};
