//! Command-line front end for the SBM semidefinite toolkit.

mod config;
mod experiment;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use sbm_sdp::bounds::{closed_form_bound, enumerate_min_sdp_diff, overall_bound_coeff};
use sbm_sdp::hypo::{plugin_test, sequential_estimate_k, KHat, SequentialOptions, WPlusMode};
use sbm_sdp::io::{read_matrix, write_matrix};
use sbm_sdp::model::{balanced_assignment, sample_goe, sample_sbm, LabelLayout};
use sbm_sdp::rng::split_seed;
use sbm_sdp::sdp::{sdp_balanced, sdp_membership, sdp_psd1};
use sbm_sdp::{Matrix, Solution, SolverOptions};

use config::{ExperimentConfig, ModelConfig, SolverConfig};

/// Environment variable capping the worker thread count.
const WORKERS_ENV: &str = "SBM_SDP_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, config or input data.
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    /// The run finished but some replicates failed.
    #[error("{0}")]
    Partial(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) => 2,
            CliError::Partial(_) => 3,
        }
    }
}

impl From<sbm_sdp::Error> for CliError {
    fn from(e: sbm_sdp::Error) -> Self {
        match e {
            sbm_sdp::Error::Io(_) | sbm_sdp::Error::EmptyPairClass(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "sbm-sdp", version, about = "Semidefinite community detection and testing for weighted SBMs")]
struct Cli {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON file: an experiment for `run`, solver overrides otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted, except for `run`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rewrite experiment rows in canonical order after the run.
    #[arg(long, global = true)]
    sorted: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SdpSet {
    /// Unit diagonal only.
    Psd1,
    /// Unit diagonal and zero total sum.
    Balanced,
    /// Non-negative membership relaxation with total sum `λ`.
    Membership,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an SDP for a matrix file.
    Sdp {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "psd1")]
        set: SdpSet,
        /// Total-sum target for `--set membership`.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Average SDP(B)/n over GOE draws.
    GoeCalibrate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        reps: usize,
    },
    /// Plug-in test of K = k0 for a matrix file.
    TestK {
        matrix: PathBuf,
        #[arg(long)]
        k0: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Known variance proxy; estimated from the data when omitted.
        #[arg(long)]
        w_plus: Option<f64>,
    },
    /// Sequential estimate of the number of communities.
    EstimateK {
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = sbm_sdp::hypo::DEFAULT_K_MAX)]
        k_max: usize,
        #[arg(long)]
        w_plus: Option<f64>,
    },
    /// Closed-form separation bounds, optionally checked by enumeration.
    Bounds {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        enumerate: bool,
        /// Also report the far-configuration case.
        #[arg(long)]
        exploratory: bool,
    },
    /// Draw a zero-inflated Gaussian SBM matrix.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        mu_in: f64,
        #[arg(long)]
        mu_out: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Also write the true labels, one per line.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Run a replicated experiment described by `--config`.
    Run,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn workers() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &Path) -> Result<Matrix, CliError> {
    let file = File::open(path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    Ok(read_matrix(BufReader::new(file))?)
}

fn solver(cli: &Cli) -> Result<SolverOptions, CliError> {
    let cfg = match &cli.config {
        Some(p) => serde_json::from_str::<SolverConfig>(&read_text(p)?)
            .map_err(|e| CliError::Config(format!("invalid solver config: {e}")))?,
        None => SolverConfig::default(),
    };
    let opts = cfg.options(cli.seed);
    opts.validate()?;
    Ok(opts)
}

fn output(cli: &Cli) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cli.out {
        Some(p) => Box::new(
            File::create(p).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?,
        ),
        None => Box::new(io::stdout().lock()),
    })
}

fn known(w_plus: Option<f64>) -> WPlusMode {
    w_plus.map_or(WPlusMode::Plugin, WPlusMode::Known)
}

fn io_err(e: io::Error) -> CliError {
    CliError::Runtime(format!("write failed: {e}"))
}

fn report_solution(out: &mut dyn Write, s: &Solution) -> io::Result<()> {
    writeln!(out, "objective {}", s.objective)?;
    writeln!(out, "iterations {}", s.iterations)?;
    writeln!(out, "converged {}", s.converged)?;
    let r = &s.residuals;
    writeln!(out, "residual_diagonal {}", r.diagonal)?;
    writeln!(out, "residual_total_sum {}", r.total_sum)?;
    writeln!(out, "residual_psd {}", r.psd)?;
    writeln!(out, "residual_negativity {}", r.negativity)?;
    writeln!(out, "residual_primal {}", r.primal)?;
    writeln!(out, "residual_dual {}", r.dual)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Sdp { matrix, set, lambda } => {
            let m = load_matrix(matrix)?;
            let opts = solver(&cli)?;
            let sol = match (set, lambda) {
                (SdpSet::Psd1, _) => sdp_psd1(&m, &opts)?,
                (SdpSet::Balanced, _) => sdp_balanced(&m, &opts)?,
                (SdpSet::Membership, Some(l)) => sdp_membership(&m, *l, &opts)?,
                (SdpSet::Membership, None) => return Err(CliError::Config("--set membership needs --lambda".into())),
            };
            report_solution(&mut *output(&cli)?, &sol).map_err(io_err)
        }
        Command::GoeCalibrate { n, reps } => {
            if *reps == 0 {
                return Err(CliError::Config("--reps must be at least 1".into()));
            }
            let opts = solver(&cli)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers()?)
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let values = pool.install(|| {
                (0..*reps)
                    .into_par_iter()
                    .map(|r| {
                        let seed = split_seed(cli.seed, r as u64);
                        let b = sample_goe(*n, seed)?;
                        Ok(sdp_psd1(&b, &opts.clone().with_seed(split_seed(seed, 2)))?.objective / *n as f64)
                    })
                    .collect::<Result<Vec<f64>, sbm_sdp::Error>>()
            })?;
            let mut out = output(&cli)?;
            for (r, v) in values.iter().enumerate() {
                writeln!(out, "rep {r} sdp_over_n {v}").map_err(io_err)?;
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            writeln!(out, "mean_sdp_over_n {mean}").map_err(io_err)
        }
        Command::TestK { matrix, k0, delta, w_plus } => {
            let w = load_matrix(matrix)?;
            let opts = SequentialOptions {
                epsilon: *delta,
                w_plus: known(*w_plus),
                solver: solver(&cli)?,
                seed: cli.seed,
                ..SequentialOptions::default()
            };
            let stage = plugin_test(&w, *k0, &opts);
            let o = stage.outcome.ok_or_else(|| CliError::Config(stage.error.unwrap_or_default()))?;
            let mut out = output(&cli)?;
            writeln!(out, "k0 {}", o.k0).map_err(io_err)?;
            writeln!(out, "statistic {}", o.statistic).map_err(io_err)?;
            writeln!(out, "threshold {}", o.threshold).map_err(io_err)?;
            writeln!(out, "w_plus {}", o.w_plus_used).map_err(io_err)?;
            writeln!(out, "reject {}", o.reject).map_err(io_err)
        }
        Command::EstimateK { matrix, epsilon, k_max, w_plus } => {
            let w = load_matrix(matrix)?;
            let opts = SequentialOptions {
                epsilon: *epsilon,
                k_max: *k_max,
                w_plus: known(*w_plus),
                solver: solver(&cli)?,
                seed: cli.seed,
                ..SequentialOptions::default()
            };
            let trace = sequential_estimate_k(&w, &opts)?;
            let mut out = output(&cli)?;
            for s in &trace.stages {
                match (&s.outcome, &s.error) {
                    (Some(o), _) => writeln!(
                        out,
                        "stage k0={} statistic={} threshold={} reject={}",
                        o.k0, o.statistic, o.threshold, o.reject
                    ),
                    (None, e) => writeln!(out, "stage k0={} error={}", s.k0, e.as_deref().unwrap_or("unknown")),
                }
                .map_err(io_err)?;
            }
            match trace.k_hat {
                KHat::Found(k) => writeln!(out, "k_hat {k}"),
                KHat::ExceededMax => writeln!(out, "k_hat >{k_max}"),
            }
            .map_err(io_err)
        }
        Command::Bounds { r, s, m, enumerate, exploratory } => {
            let case = closed_form_bound(*r, *s, *m, *exploratory)?;
            let mut out = output(&cli)?;
            for c in &case.cases {
                writeln!(out, "case {:?} coeff {}", c.case, c.coeff).map_err(io_err)?;
            }
            writeln!(out, "bound_case {:?}", case.case_id).map_err(io_err)?;
            writeln!(out, "bound_coeff {}", case.bound_coeff).map_err(io_err)?;
            writeln!(out, "overall_coeff {}", overall_bound_coeff(*m)).map_err(io_err)?;
            if *enumerate {
                let e = enumerate_min_sdp_diff(*r, *s, *m, &solver(&cli)?)?;
                writeln!(out, "enumerated_min {}", e.min_value).map_err(io_err)?;
                writeln!(out, "partitions {}", e.partitions).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Simulate { n, k, rho, mu_in, mu_out, tau, labels_out } => {
            let model = ModelConfig { n: *n, k: *k, rho: *rho, mu_in: *mu_in, mu_out: *mu_out, tau: *tau }.build()?;
            let truth = balanced_assignment(*n, *k, LabelLayout::Random { seed: split_seed(cli.seed, 1) })?;
            let w = sample_sbm(&model, &truth, split_seed(cli.seed, 0))?;
            write_matrix(&mut *output(&cli)?, &w)?;
            if let Some(p) = labels_out {
                let text: String = truth.labels().iter().map(|l| format!("{l}\n")).collect();
                std::fs::write(p, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?;
            }
            Ok(())
        }
        Command::Run => {
            let path = cli.config.as_ref().ok_or_else(|| CliError::Config("run needs --config".into()))?;
            let cfg = ExperimentConfig::from_json(&read_text(path)?)?;
            let out = cli
                .out
                .clone()
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.kind.name())));
            let report = experiment::run_experiment(&cfg, &out, cli.sorted, workers()?)?;
            eprintln!(
                "wrote {} rows to {} (summary {}, timing {})",
                report.rows.len(),
                report.results.display(),
                report.summary.display(),
                report.timing.display()
            );
            if report.failures > 0 {
                return Err(CliError::Partial(format!("{} replicate(s) failed; see error rows", report.failures)));
            }
            Ok(())
        }
    }
}
