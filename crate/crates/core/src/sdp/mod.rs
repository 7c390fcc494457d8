//! Solvers for `SDP(M) = max ⟨M, X⟩` over the elliptope `{X ⪰ 0, Xᵢᵢ = 1}`
//! and its two constrained variants, the rank-restricted `OPT_k`, and the
//! independent oracles used to check them.

mod admm;
mod feasibility;
mod low_rank;
mod norm;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use admm::{sdp_balanced, sdp_membership};
pub use feasibility::{check_elliptope, FeasibilityReport};
pub use low_rank::{opt_k, opt_k_path, sdp_psd1};
pub use norm::{norm_inf_to_one, EXHAUSTIVE_LIMIT};

/// Upper bound on Grothendieck's constant used by the norm sandwich.
pub const GROTHENDIECK_BOUND: f64 = 1.7823;

/// Solver configuration shared by the low-rank and splitting solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Factor rank for the low-rank solver; `None` selects `⌈√(2n)⌉ + 1`.
    pub rank: Option<usize>,
    /// Sweep cap (low-rank) or iteration cap (splitting).
    pub max_sweeps: usize,
    /// Relative objective stall tolerance over `stall_window` sweeps.
    pub tol_obj: f64,
    /// Constraint violation tolerance.
    pub tol_feas: f64,
    pub stall_window: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rank: None,
            max_sweeps: 2000,
            tol_obj: 1e-7,
            tol_feas: 1e-6,
            stall_window: 10,
            restarts: 3,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.rank = Some(rank);
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.rank {
            if k < 2 {
                return Err(Error::InvalidParameter(format!("rank must be at least 2, got {k}")));
            }
        }
        if !(self.tol_obj > 0.0 && self.tol_feas > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.max_sweeps == 0 || self.restarts == 0 || self.stall_window == 0 {
            return Err(Error::InvalidParameter(
                "max_sweeps, restarts and stall_window must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Rank used for an `n`-dimensional problem.
    pub fn rank_for(&self, n: usize) -> usize {
        self.rank.unwrap_or_else(|| default_rank(n))
    }
}

/// `⌈√(2n)⌉ + 1`, above the rank at which generic low-rank local maxima of
/// the elliptope problem are global.
pub fn default_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize) + 1
}

/// A feasible point returned by a solver.
#[derive(Debug, Clone, PartialEq)]
pub enum SdpPoint<T: Real> {
    /// `n × k` factor `V` with unit rows; the point is `X = V Vᵀ`.
    LowRank(DMatrix<T>),
    /// Full `n × n` matrix.
    Full(DMatrix<T>),
}

impl<T: Real> SdpPoint<T> {
    /// The point as a dense matrix.
    pub fn to_matrix(&self) -> DMatrix<T> {
        match self {
            SdpPoint::LowRank(v) => v * v.transpose(),
            SdpPoint::Full(x) => x.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SdpPoint::LowRank(v) => v.nrows(),
            SdpPoint::Full(x) => x.nrows(),
        }
    }
}

/// Constraint violations of the returned point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Residuals {
    /// `maxᵢ |Xᵢᵢ − 1|`.
    pub diagonal: f64,
    /// `|Σᵢⱼ Xᵢⱼ − target|` for the sum-constrained sets, zero otherwise.
    pub total_sum: f64,
    /// `max(0, −λ_min(X))`.
    pub psd: f64,
    /// `max(0, −minᵢⱼ Xᵢⱼ)` for the non-negative set, zero otherwise.
    pub negativity: f64,
    /// Final splitting residuals (zero for the low-rank solver).
    pub primal: f64,
    pub dual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution<T: Real> {
    /// `⟨M, X⟩` recomputed from the returned point.
    pub objective: T,
    pub point: SdpPoint<T>,
    pub iterations: usize,
    pub residuals: Residuals,
    pub converged: bool,
    /// Objective after each sweep of the winning restart (low-rank solver)
    /// or after each iteration (splitting solver).
    pub trace: Vec<T>,
}

impl<T: Real> SdpSolution<T> {
    pub fn objective_f64(&self) -> f64 {
        self.objective.as_f64()
    }
}
