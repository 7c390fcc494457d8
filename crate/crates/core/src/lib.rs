//! SDP-based hypothesis testing and community estimation for weighted,
//! balanced stochastic block models.
//!
//! The numerical core ([`SymmetricMatrix`], the solvers in [`sdp`], and the
//! witness matrices in [`bounds`]) is generic over [`Real`] scalars; the
//! statistical layers work in `f64` through the aliases below.

pub mod bounds;
pub mod detect;
pub mod error;
pub mod hypo;
pub mod io;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sdp;

pub use error::{Error, Result};
pub use model::{CommunityAssignment, SbmModel, SubGammaParams, SymmetricMatrix, WeightLaw};
pub use scalar::Real;
pub use sdp::{SdpSolution, SolverOptions};

/// Double-precision symmetric matrix, the currency of the statistical layers.
pub type Matrix = SymmetricMatrix<f64>;
/// Double-precision solver output.
pub type Solution = SdpSolution<f64>;
