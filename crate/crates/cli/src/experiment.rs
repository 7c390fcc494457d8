//! Replicated experiment runner with a serialized, append-only CSV sink.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use sbm_sdp::bounds::{closed_form_bound, enumerate_min_sdp_diff, overall_bound_coeff};
use sbm_sdp::detect::{align_labels, estimate_membership, estimate_two, membership_error, overlap_error, spectral_clustering};
use sbm_sdp::hypo::{plugin_test, sequential_estimate_k, threshold, KHat, SequentialOptions, Stage, TestOutcome};
use sbm_sdp::model::{balanced_assignment, mean_matrix, sample_goe, sample_sbm, LabelLayout};
use sbm_sdp::rng::split_seed;
use sbm_sdp::sdp::sdp_psd1;

use crate::config::{ExperimentConfig, ExperimentKind, ModelConfig};
use crate::CliError;

pub const COLUMNS: &str = "experiment,replicate,seed,n,k,rho,mu_in,mu_out,tau,metric,value,note";

/// One measured quantity for one replicate at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub grid_index: usize,
    pub replicate: usize,
    pub seed: u64,
    pub point: ModelConfig,
    pub metric: String,
    pub value: f64,
    /// Reason code for `error` rows, empty otherwise.
    pub note: String,
    pub runtime_ms: u128,
}

impl ResultRow {
    fn csv(&self) -> String {
        let p = &self.point;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment, self.replicate, self.seed, p.n, p.k, p.rho, p.mu_in, p.mu_out, p.tau, self.metric, self.value,
            self.note
        )
    }

    fn sort_key(&self) -> (usize, usize, String) {
        (self.grid_index, self.replicate, self.metric.clone())
    }
}

/// What a finished run produced.
#[derive(Debug)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub failures: usize,
    pub results: PathBuf,
    pub summary: PathBuf,
    pub timing: PathBuf,
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn header(cfg: &ExperimentConfig) -> String {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!(
        "# sbm-sdp {}\n# experiment={}\n# config_sha256={}\n# base_seed={}\n# created_unix={created}\n{COLUMNS}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.kind.name(),
        config_hash(cfg),
        cfg.base_seed
    )
}

/// Stable reason code for an error row.
fn reason(e: &sbm_sdp::Error) -> &'static str {
    use sbm_sdp::Error::*;
    match e {
        DimensionMismatch { .. } | NotSquare { .. } | NotSymmetric { .. } => "shape",
        NonFinite { .. } => "non_finite",
        Unbalanced { .. } => "unbalanced",
        InvalidParameter(_) => "invalid_parameter",
        UnsupportedLaw(_) => "unsupported_law",
        TooLarge { .. } => "too_large",
        Infeasible(_) => "infeasible",
        EmptyPairClass(_) => "empty_pair_class",
        Parse { .. } => "parse",
        Io(_) => "io",
    }
}

struct Unit<'a> {
    cfg: &'a ExperimentConfig,
    grid_index: usize,
    replicate: usize,
    point: ModelConfig,
}

impl Unit<'_> {
    fn seed(&self) -> u64 {
        split_seed(self.cfg.base_seed, self.replicate as u64)
    }

    fn run(&self) -> Vec<ResultRow> {
        let start = Instant::now();
        let outcome = self.metrics();
        let runtime_ms = start.elapsed().as_millis();
        let row = |metric: String, value: f64, note: String| ResultRow {
            experiment: self.cfg.kind.name(),
            grid_index: self.grid_index,
            replicate: self.replicate,
            seed: self.seed(),
            point: self.point,
            metric,
            value,
            note,
            runtime_ms,
        };
        match outcome {
            Ok(metrics) => metrics.into_iter().map(|(m, v)| row(m.to_string(), v, String::new())).collect(),
            Err(e) => vec![row("error".into(), f64::NAN, reason(&e).into())],
        }
    }

    fn metrics(&self) -> sbm_sdp::Result<Vec<(&'static str, f64)>> {
        let seed = self.seed();
        let (data_seed, layout_seed, solver_seed) = (split_seed(seed, 0), split_seed(seed, 1), split_seed(seed, 2));
        let cfg = self.cfg;
        let solver = cfg.solver.options(solver_seed);
        let p = self.point;
        if cfg.kind == ExperimentKind::GoeCalibrate {
            let b = sample_goe(p.n, data_seed)?;
            return Ok(vec![("sdp_over_n", sdp_psd1(&b, &solver)?.objective / p.n as f64)]);
        }
        if cfg.kind == ExperimentKind::BoundsCheck {
            let b = cfg.bounds.expect("validated");
            let closed = closed_form_bound(b.r, b.s, b.m, b.exploratory)?;
            let mut out = vec![("closed_form_coeff", closed.bound_coeff), ("overall_bound_coeff", overall_bound_coeff(b.m))];
            if b.enumerate {
                out.push(("enumerated_min", enumerate_min_sdp_diff(b.r, b.s, b.m, &solver)?.min_value));
            }
            return Ok(out);
        }
        let model = p.build()?;
        let truth = balanced_assignment(p.n, p.k, LabelLayout::Random { seed: layout_seed })?;
        let w = sample_sbm(&model, &truth, data_seed)?;
        let seq = SequentialOptions {
            epsilon: cfg.delta,
            k_max: cfg.k_max,
            w_plus: cfg.w_plus.mode(Some(&model)),
            labels: Default::default(),
            solver: solver.clone(),
            seed: solver_seed,
        };
        Ok(match cfg.kind {
            ExperimentKind::SdpEval => {
                let mean = mean_matrix(model.mean_in(), model.mean_out(), &truth);
                vec![
                    ("sdp", sdp_psd1(&w, &solver)?.objective),
                    ("sdp_centered", sdp_psd1(&w.checked_sub(&mean)?, &solver)?.objective),
                    ("threshold", threshold(p.n, model.subgamma().w_plus, cfg.delta)),
                ]
            }
            ExperimentKind::TestPower => {
                let mut out = Vec::new();
                let o = outcome(plugin_test(&w, p.k, &seq))?;
                out.extend([("statistic_true", o.statistic), ("threshold_true", o.threshold), ("reject_true", o.reject as u8 as f64)]);
                if p.k > 1 {
                    let o = outcome(plugin_test(&w, p.k - 1, &seq))?;
                    out.extend([("statistic_below", o.statistic), ("threshold_below", o.threshold), ("reject_below", o.reject as u8 as f64)]);
                }
                out
            }
            ExperimentKind::EstimateCommunities => {
                let est = estimate_membership(&w, p.k, &solver)?;
                let mut out = vec![("membership_error", membership_error(&est.z_rounded, &truth.membership_matrix())? as f64)];
                if p.k == 2 {
                    let two = estimate_two(&w, &solver)?;
                    out.push(("overlap_error", overlap_error(&two.signs, &truth.sign_vector()?)?));
                }
                let sc = spectral_clustering(&w, p.k, solver_seed)?;
                out.push(("sc_mismatches", align_labels(&sc, &truth)?.mismatches as f64));
                out
            }
            ExperimentKind::EstimateK => {
                let trace = sequential_estimate_k(&w, &seq)?;
                vec![
                    ("k_hat", trace.k_hat_or_overflow() as f64),
                    ("exceeded", (trace.k_hat == KHat::ExceededMax) as u8 as f64),
                ]
            }
            ExperimentKind::GoeCalibrate | ExperimentKind::BoundsCheck => unreachable!("handled above"),
        })
    }
}

fn outcome(stage: Stage) -> sbm_sdp::Result<TestOutcome> {
    stage.outcome.ok_or_else(|| sbm_sdp::Error::Infeasible(stage.error.unwrap_or_default()))
}

struct Sink {
    results: BufWriter<File>,
    timing: BufWriter<File>,
    rows: Vec<ResultRow>,
}

impl Sink {
    fn push(&mut self, rows: Vec<ResultRow>) -> std::io::Result<()> {
        for row in rows {
            writeln!(self.results, "{}", row.csv())?;
            self.results.flush()?;
            writeln!(self.timing, "{},{},{},{},{}", row.experiment, row.grid_index, row.replicate, row.metric, row.runtime_ms)?;
            self.timing.flush()?;
            self.rows.push(row);
        }
        Ok(())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Runs every (grid point, replicate) pair on `workers` threads.
///
/// Rows are appended and flushed as units finish, so row order follows
/// completion unless `sorted` is set, in which case the file is rewritten
/// in (grid point, replicate, metric) order at the end.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, sorted: bool, workers: usize) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let header = header(cfg);
    let summary_path = sibling(out, "summary");
    let timing_path = sibling(out, "timing");
    let mut results = create(out)?;
    let mut timing = create(&timing_path)?;
    let io = |e: std::io::Error| CliError::Runtime(format!("write failed: {e}"));
    results.write_all(header.as_bytes()).map_err(io)?;
    results.flush().map_err(io)?;
    writeln!(timing, "experiment,grid_index,replicate,metric,runtime_ms").map_err(io)?;

    let points = match cfg.kind {
        ExperimentKind::BoundsCheck => {
            let b = cfg.bounds.expect("validated");
            vec![ModelConfig { n: b.r * b.s * b.m, k: b.r, ..cfg.model }]
        }
        _ => cfg.grid_points(),
    };
    let replicates = if cfg.kind == ExperimentKind::BoundsCheck { 1 } else { cfg.replicates };
    let units: Vec<Unit> = points
        .iter()
        .enumerate()
        .flat_map(|(grid_index, &point)| (0..replicates).map(move |replicate| Unit { cfg, grid_index, replicate, point }))
        .collect();

    let sink = Mutex::new(Sink { results, timing, rows: Vec::new() });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| {
        units.par_iter().try_for_each(|unit| {
            let rows = unit.run();
            sink.lock().expect("sink poisoned").push(rows)
        })
    })
    .map_err(io)?;

    let mut rows = sink.into_inner().expect("sink poisoned").rows;
    rows.sort_by_key(ResultRow::sort_key);
    if sorted {
        let tmp = out.with_extension("csv.tmp");
        let mut w = create(&tmp)?;
        w.write_all(header.as_bytes()).map_err(io)?;
        for row in &rows {
            writeln!(w, "{}", row.csv()).map_err(io)?;
        }
        w.flush().map_err(io)?;
        drop(w);
        fs::rename(&tmp, out).map_err(io)?;
    }
    write_summary(&summary_path, &header, &rows).map_err(io)?;
    let failures = rows.iter().filter(|r| r.metric == "error").count();
    Ok(RunReport { rows, failures, results: out.to_path_buf(), summary: summary_path, timing: timing_path })
}

fn write_summary(path: &Path, header: &str, rows: &[ResultRow]) -> std::io::Result<()> {
    let mut groups: BTreeMap<(usize, String), (ModelConfig, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        groups.entry((r.grid_index, r.metric.clone())).or_insert_with(|| (r.point, Vec::new())).1.push(r.value);
    }
    let mut w = BufWriter::new(File::create(path)?);
    // Reuse the provenance lines, swapping the column header.
    for line in header.lines().filter(|l| l.starts_with('#')) {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "n,k,rho,mu_in,mu_out,tau,metric,count,mean,std")?;
    for ((_, metric), (p, values)) in groups {
        let count = values.len();
        let (mean, std) = if metric == "error" {
            (f64::NAN, f64::NAN)
        } else {
            let mean = values.iter().sum::<f64>() / count as f64;
            let var = if count > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
            } else {
                0.0
            };
            (mean, var.sqrt())
        };
        writeln!(w, "{},{},{},{},{},{},{metric},{count},{mean},{std}", p.n, p.k, p.rho, p.mu_in, p.mu_out, p.tau)?;
    }
    w.flush()
}
