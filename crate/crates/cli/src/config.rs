//! JSON experiment configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use sbm_sdp::hypo::WPlusMode;
use sbm_sdp::{SbmModel, SolverOptions};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SdpEval,
    GoeCalibrate,
    TestPower,
    EstimateCommunities,
    EstimateK,
    BoundsCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SdpEval => "sdp-eval",
            ExperimentKind::GoeCalibrate => "goe-calibrate",
            ExperimentKind::TestPower => "test-power",
            ExperimentKind::EstimateCommunities => "estimate-communities",
            ExperimentKind::EstimateK => "estimate-k",
            ExperimentKind::BoundsCheck => "bounds-check",
        }
    }
}

/// Zero-inflated Gaussian model parameters, with `ρ = a_n/n = b_n/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub mu_in: f64,
    pub mu_out: f64,
    #[serde(default = "one")]
    pub tau: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { n: 100, k: 2, rho: 0.8, mu_in: 5.0, mu_out: 2.0, tau: 1.0 }
    }
}

impl ModelConfig {
    pub fn build(&self) -> sbm_sdp::Result<SbmModel> {
        SbmModel::zero_inflated_gaussian(self.n, self.k, self.rho, self.mu_in, self.mu_out, self.tau)
    }

    fn set(&mut self, axis: &str, value: f64) {
        match axis {
            "n" => self.n = value as usize,
            "k" => self.k = value as usize,
            "rho" => self.rho = value,
            "mu_in" => self.mu_in = value,
            "mu_out" => self.mu_out = value,
            "mu_gap" => self.mu_in = self.mu_out + value,
            "tau" => self.tau = value,
            _ => unreachable!("axes are validated"),
        }
    }
}

/// Optional overrides of the solver defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub rank: Option<usize>,
    pub max_sweeps: Option<usize>,
    pub tol_obj: Option<f64>,
    pub tol_feas: Option<f64>,
    pub stall_window: Option<usize>,
    pub restarts: Option<usize>,
}

impl SolverConfig {
    pub fn options(&self, seed: u64) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            rank: self.rank.or(d.rank),
            max_sweeps: self.max_sweeps.unwrap_or(d.max_sweeps),
            tol_obj: self.tol_obj.unwrap_or(d.tol_obj),
            tol_feas: self.tol_feas.unwrap_or(d.tol_feas),
            stall_window: self.stall_window.unwrap_or(d.stall_window),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WPlusConfig {
    Known(f64),
    Named(WPlusName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WPlusName {
    /// Zero-inflated Gaussian plug-in from the data.
    Plugin,
    /// The generating model's exact value.
    Model,
}

impl Default for WPlusConfig {
    fn default() -> Self {
        WPlusConfig::Named(WPlusName::Plugin)
    }
}

impl WPlusConfig {
    pub fn mode(&self, model: Option<&SbmModel>) -> WPlusMode {
        match (self, model) {
            (WPlusConfig::Known(v), _) => WPlusMode::Known(*v),
            (WPlusConfig::Named(WPlusName::Model), Some(m)) => WPlusMode::Known(m.subgamma().w_plus),
            _ => WPlusMode::Plugin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub r: usize,
    pub s: usize,
    pub m: usize,
    #[serde(default)]
    pub enumerate: bool,
    #[serde(default)]
    pub exploratory: bool,
}

/// Grid axes that may be swept.
pub const AXES: [&str; 7] = ["n", "k", "rho", "mu_in", "mu_out", "mu_gap", "tau"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub model: ModelConfig,
    /// Axis name to values; the run covers the Cartesian product.
    #[serde(default)]
    pub grid: BTreeMap<String, Vec<f64>>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Test slack `δ` (also `ε` for the sequential estimator).
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub w_plus: WPlusConfig,
    pub bounds: Option<BoundsConfig>,
    pub output: Option<PathBuf>,
}

fn default_replicates() -> usize {
    20
}

fn default_delta() -> f64 {
    0.1
}

fn default_k_max() -> usize {
    sbm_sdp::hypo::DEFAULT_K_MAX
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        for (axis, values) in &self.grid {
            if !AXES.contains(&axis.as_str()) {
                return bad(format!("unknown grid axis {axis:?}; expected one of {AXES:?}"));
            }
            if values.is_empty() {
                return bad(format!("grid axis {axis:?} is empty"));
            }
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad("delta must be positive".into());
        }
        if self.k_max == 0 {
            return bad("k_max must be at least 1".into());
        }
        if self.kind == ExperimentKind::BoundsCheck && self.bounds.is_none() {
            return bad("bounds-check needs a \"bounds\" section".into());
        }
        if self.kind != ExperimentKind::BoundsCheck && self.kind != ExperimentKind::GoeCalibrate {
            for point in self.grid_points() {
                point.build().map_err(|e| CliError::Config(format!("invalid model at grid point: {e}")))?;
            }
        }
        self.solver.options(0).validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// Model parameters at every grid point, in a fixed order.
    pub fn grid_points(&self) -> Vec<ModelConfig> {
        let mut points = vec![self.model];
        // `mu_gap` is relative to `mu_out`, so it is applied last.
        let mut axes: Vec<(&String, &Vec<f64>)> = self.grid.iter().collect();
        axes.sort_by_key(|(name, _)| name.as_str() == "mu_gap");
        for (axis, values) in axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p;
                        q.set(axis, v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}
