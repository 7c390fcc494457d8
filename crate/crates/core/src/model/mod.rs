//! Generative models: weighted balanced SBMs, the GOE, mean matrices, and
//! sub-gamma variance bookkeeping.

mod assignment;
mod goe;
mod matrix;
mod sbm;

pub use assignment::{balanced_assignment, CommunityAssignment, LabelLayout};
pub use goe::sample_goe;
pub use matrix::SymmetricMatrix;
pub use sbm::{
    mean_matrix, null_mean_matrix, sample_sbm, zig_subgamma, SbmModel, SubGammaParams, WeightLaw,
};
