//! Community estimators built on the constrained solvers, a spectral
//! clustering baseline, and the error metrics used to score them.

mod estimate;
mod metrics;
mod spectral;

pub use estimate::{estimate_membership, estimate_two, MembershipEstimate, TwoCommunityEstimate};
pub use metrics::{align_labels, membership_error, overlap_error, xi_against_truth, Alignment};
pub use spectral::{spectral_clustering, KMEANS_INITS, KMEANS_MAX_ITER};
