use super::means::{estimate_means, w_plus_plugin, PluginEstimate};
use super::test::{test_statistic, TestOutcome};
use crate::detect::{estimate_membership, spectral_clustering};
use crate::error::{Error, Result};
use crate::model::{CommunityAssignment, SymmetricMatrix};
use crate::rng::split_seed;
use crate::sdp::SolverOptions;

pub const DEFAULT_K_MAX: usize = 8;

/// Source of the variance factor in the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WPlusMode {
    Known(f64),
    /// Zero-inflated Gaussian plug-in from the stage's estimated labels.
    Plugin,
}

/// Community estimate feeding the mean matrix at each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelSource {
    #[default]
    Spectral,
    /// Spectral clustering of the rounded-membership relaxation's solution.
    /// Stages with `K₀ ∤ n` fall back to spectral labels.
    SdpMembership,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialOptions {
    pub epsilon: f64,
    pub k_max: usize,
    pub w_plus: WPlusMode,
    pub labels: LabelSource,
    pub solver: SolverOptions,
    pub seed: u64,
}

impl Default for SequentialOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            k_max: DEFAULT_K_MAX,
            w_plus: WPlusMode::Plugin,
            labels: LabelSource::Spectral,
            solver: SolverOptions::default(),
            seed: 0,
        }
    }
}

/// One candidate `K₀` of the sequential procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub k0: usize,
    pub labels: Option<CommunityAssignment>,
    pub plugin: Option<PluginEstimate>,
    pub outcome: Option<TestOutcome>,
    /// Failure that prevented this stage from producing an outcome.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KHat {
    Found(usize),
    ExceededMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialTrace {
    pub stages: Vec<Stage>,
    pub k_hat: KHat,
}

impl SequentialTrace {
    pub fn outcomes(&self) -> impl Iterator<Item = &TestOutcome> {
        self.stages.iter().filter_map(|s| s.outcome.as_ref())
    }

    /// `K̂` as a number, with `K_max + 1` standing for "exceeded".
    pub fn k_hat_or_overflow(&self) -> usize {
        match self.k_hat {
            KHat::Found(k) => k,
            KHat::ExceededMax => self.stages.len() + 1,
        }
    }
}

/// `K̂ = min{K₀ ≥ 1 : the plug-in test at K₀ does not reject}`.
pub fn sequential_estimate_k(w: &SymmetricMatrix<f64>, opts: &SequentialOptions) -> Result<SequentialTrace> {
    if opts.k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if !(opts.epsilon.is_finite() && opts.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    if let WPlusMode::Known(v) = opts.w_plus {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("w_plus must be positive, got {v}")));
        }
    }
    opts.solver.validate()?;
    let mut stages = Vec::new();
    for k0 in 1..=opts.k_max.min(w.n()) {
        let stage = plugin_test(w, k0, opts);
        let accepted = stage.outcome.as_ref().is_some_and(|o| !o.reject);
        stages.push(stage);
        if accepted {
            return Ok(SequentialTrace { stages, k_hat: KHat::Found(k0) });
        }
    }
    Ok(SequentialTrace { stages, k_hat: KHat::ExceededMax })
}

/// One plug-in test `T̂_{n,K₀}(W; ε)`: estimate labels, means and (optionally)
/// `w₊`, then test `W` against the estimated mean. Failures are recorded in
/// the returned stage.
pub fn plugin_test(w: &SymmetricMatrix<f64>, k0: usize, opts: &SequentialOptions) -> Stage {
    let mut stage = Stage { k0, labels: None, plugin: None, outcome: None, error: None };
    if let Err(e) = run_stage(w, k0, opts, &mut stage) {
        stage.error = Some(e.to_string());
    }
    stage
}

fn run_stage(w: &SymmetricMatrix<f64>, k0: usize, opts: &SequentialOptions, stage: &mut Stage) -> Result<()> {
    if k0 == 0 || k0 > w.n() {
        return Err(Error::InvalidParameter(format!("K₀ = {k0} outside 1..={}", w.n())));
    }
    let seed = split_seed(opts.seed, k0 as u64);
    let labels = match opts.labels {
        LabelSource::SdpMembership if k0 > 1 && w.n().is_multiple_of(k0) => {
            let est = estimate_membership(w, k0, &opts.solver.clone().with_seed(seed))?;
            spectral_clustering(&SymmetricMatrix::symmetrize(&est.z_hat)?, k0, seed)?
        }
        _ => spectral_clustering(w, k0, seed)?,
    };
    stage.labels = Some(labels.clone());
    let w_plus = match opts.w_plus {
        WPlusMode::Known(v) => v,
        WPlusMode::Plugin => {
            let p = w_plus_plugin(w, &labels)?;
            let v = p.w_plus;
            stage.plugin = Some(p);
            v
        }
    };
    let means = estimate_means(w, &labels)?;
    let solver = opts.solver.clone().with_seed(seed);
    stage.outcome = Some(test_statistic(w, &means.m_hat, k0, w_plus, opts.epsilon, &solver)?);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::mean_matrix;

    #[test]
    fn noiseless_three_communities() {
        let a = CommunityAssignment::canonical(60, 3).unwrap();
        let m = mean_matrix(3.0, 1.0, &a);
        let opts = SequentialOptions { w_plus: WPlusMode::Known(1.0), ..Default::default() };
        let trace = sequential_estimate_k(&m, &opts).unwrap();
        assert_eq!(trace.k_hat, KHat::Found(3));
        assert!(trace.stages[..2].iter().all(|s| s.outcome.as_ref().unwrap().reject));
    }

    #[test]
    fn k_max_one_can_be_exceeded() {
        let a = CommunityAssignment::canonical(40, 2).unwrap();
        let m = mean_matrix(3.0, 1.0, &a);
        let opts = SequentialOptions { w_plus: WPlusMode::Known(1.0), k_max: 1, ..Default::default() };
        let trace = sequential_estimate_k(&m, &opts).unwrap();
        assert_eq!(trace.k_hat, KHat::ExceededMax);
        assert_eq!(trace.k_hat_or_overflow(), 2);
    }

    #[test]
    fn rejects_bad_options() {
        let m = SymmetricMatrix::<f64>::zeros(4);
        let bad = SequentialOptions { k_max: 0, ..Default::default() };
        assert!(sequential_estimate_k(&m, &bad).is_err());
        let bad = SequentialOptions { w_plus: WPlusMode::Known(-1.0), ..Default::default() };
        assert!(sequential_estimate_k(&m, &bad).is_err());
    }

    #[test]
    fn stage_failures_are_recorded() {
        // Plug-in on an all-zero matrix fails at every stage.
        let m = SymmetricMatrix::<f64>::zeros(6);
        let trace = sequential_estimate_k(&m, &SequentialOptions { k_max: 2, ..Default::default() }).unwrap();
        assert_eq!(trace.k_hat, KHat::ExceededMax);
        assert!(trace.stages.iter().all(|s| s.error.is_some()));
    }
}
