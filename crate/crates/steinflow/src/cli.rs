//! Experiment runner: declarative configuration with flag overrides, the
//! three benchmark tasks, and result serialization.
//!
//! # Output file schemas (version 1)
//!
//! Each trial writes `<label>_trace.csv` with one row per iteration and the
//! self-describing header
//! `iter,mksd,ksd_h<b1>,...,ksd_h<bm>,w_h<b1>,...,w_h<bm>,<metric columns>`
//! where `<bi>` are the bandwidth values of the kernel grid (so the column
//! count is `2 + 2m + #metrics`). Metric columns hold NaN on iterations
//! where the evaluation cadence skipped them.
//!
//! Each trial also writes `<label>_summary.txt` with `key=value` lines
//! (first line `schema_version=1`), and a run writes `aggregate.txt` with
//! the across-trial mean and standard deviation of each final metric.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ndarray::{Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{
    load_csv, split, standardize, CsvSchema, Dataset, LabelColumn, SplitSpec, StandardizeStats,
    Task,
};
use crate::dynamics::{
    run_mk_svgd_observed, run_svgd_observed, BandwidthSpec, ParticleSet, RunConfig, RunTrace,
    WeightMode,
};
use crate::error::{input_err, Error, Result};
use crate::kernel::{build_grid, BandwidthGrid};
use crate::metrics::{classification_metrics, particle_moments, regression_metrics, EvalReport};
use crate::targets::{
    predictive_blr, predictive_bnn, BlrPosterior, BnnPosterior, GaussianTarget, ScoreModel,
};

/// Which benchmark an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Gaussian,
    Logreg,
    Bnn,
}

/// Weight-update mechanism, as spelled in config files and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightModeChoice {
    ClosedForm,
    AdagradAscent,
}

impl std::str::FromStr for WeightModeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" => Ok(Self::ClosedForm),
            "adagrad_ascent" => Ok(Self::AdagradAscent),
            other => Err(Error::Config(format!(
                "unknown weight mode {other:?}; expected closed_form or adagrad_ascent"
            ))),
        }
    }
}

impl From<WeightModeChoice> for WeightMode {
    fn from(choice: WeightModeChoice) -> Self {
        match choice {
            WeightModeChoice::ClosedForm => WeightMode::ClosedForm,
            WeightModeChoice::AdagradAscent => WeightMode::AdaGradAscent,
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub seed: u64,
    pub trials: usize,
    pub particles: usize,
    pub iters: usize,
    pub step: f64,
    pub grid_lo: f64,
    pub grid_factor: f64,
    pub grid_count: usize,
    /// Minibatch size for data-backed tasks; `None` runs full-batch.
    pub batch: Option<usize>,
    pub weight_mode: WeightModeChoice,
    pub weight_cadence: usize,
    pub weight_step: f64,
    pub dataset: Option<PathBuf>,
    /// Row subsample applied before splitting (seeded).
    pub subsample: Option<usize>,
    pub split_fraction: f64,
    /// Hidden-layer width (bnn only).
    pub hidden: usize,
    pub standardize: bool,
    /// Evaluate task metrics every this many iterations.
    pub eval_every: usize,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Task-specific defaults.
    pub fn for_task(task: TaskKind) -> Self {
        let base = Self {
            task,
            seed: 0,
            trials: 1,
            particles: 500,
            iters: 200,
            step: 0.3,
            grid_lo: 2f64.powi(-4),
            grid_factor: 2.0,
            grid_count: 10,
            batch: None,
            weight_mode: WeightModeChoice::ClosedForm,
            weight_cadence: 1,
            weight_step: 0.05,
            dataset: None,
            subsample: None,
            split_fraction: 1.0,
            hidden: 50,
            standardize: false,
            eval_every: 1,
            out: None,
        };
        match task {
            TaskKind::Gaussian => base,
            TaskKind::Logreg => Self {
                particles: 100,
                iters: 500,
                step: 0.05,
                grid_lo: 2f64.powi(2),
                batch: Some(100),
                split_fraction: 0.8,
                standardize: true,
                eval_every: 25,
                ..base
            },
            TaskKind::Bnn => Self {
                particles: 20,
                iters: 2000,
                step: 0.01,
                batch: Some(100),
                split_fraction: 0.9,
                standardize: true,
                eval_every: 100,
                ..base
            },
        }
    }

    /// Apply partial overrides (config file first, then flags; the caller
    /// controls the order, later wins).
    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = &o.$field {
                    self.$field = v.clone();
                }
            };
        }
        take!(seed);
        take!(trials);
        take!(particles);
        take!(iters);
        take!(step);
        take!(grid_lo);
        take!(grid_factor);
        take!(grid_count);
        take!(weight_mode);
        take!(weight_cadence);
        take!(weight_step);
        take!(split_fraction);
        take!(hidden);
        take!(standardize);
        take!(eval_every);
        if let Some(v) = o.batch {
            self.batch = Some(v);
        }
        if let Some(v) = &o.dataset {
            self.dataset = Some(v.clone());
        }
        if let Some(v) = o.subsample {
            self.subsample = Some(v);
        }
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.particles == 0 || self.iters == 0 {
            return Err(Error::Config(
                "trials, particles, and iters must be positive".into(),
            ));
        }
        if !(self.step > 0.0) || !(self.weight_step > 0.0) {
            return Err(Error::Config("step sizes must be positive".into()));
        }
        if !(self.grid_lo > 0.0) || !(self.grid_factor > 0.0) || self.grid_count == 0 {
            return Err(Error::Config("invalid kernel grid specification".into()));
        }
        if self.eval_every == 0 || self.weight_cadence == 0 {
            return Err(Error::Config("cadence fields must be positive".into()));
        }
        if self.task != TaskKind::Gaussian && !(0.0 < self.split_fraction && self.split_fraction < 1.0)
        {
            return Err(Error::Config(
                "split_fraction must lie strictly between 0 and 1".into(),
            ));
        }
        if self.task == TaskKind::Bnn && self.hidden == 0 {
            return Err(Error::Config("hidden width must be positive".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<BandwidthGrid> {
        build_grid(self.grid_lo, self.grid_factor, self.grid_count)
    }

    fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig {
            iterations: self.iters,
            step: self.step,
            seed,
            batch: self.batch,
            weight_mode: self.weight_mode.into(),
            weight_cadence: self.weight_cadence,
            weight_step: self.weight_step,
            ..RunConfig::default()
        }
    }
}

/// Partial settings, as read from a TOML file or assembled from flags.
/// `None` fields keep the task defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfigOverrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub particles: Option<usize>,
    pub iters: Option<usize>,
    pub step: Option<f64>,
    pub grid_lo: Option<f64>,
    pub grid_factor: Option<f64>,
    pub grid_count: Option<usize>,
    pub batch: Option<usize>,
    pub weight_mode: Option<WeightModeChoice>,
    pub weight_cadence: Option<usize>,
    pub weight_step: Option<f64>,
    pub dataset: Option<PathBuf>,
    pub subsample: Option<usize>,
    pub split_fraction: Option<f64>,
    pub hidden: Option<usize>,
    pub standardize: Option<bool>,
    pub eval_every: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct ConfigFile {
    task: TaskKind,
    #[serde(flatten)]
    overrides: ConfigOverrides,
}

/// Read a TOML config file into a task and its overrides.
pub fn load_config(path: impl AsRef<Path>) -> Result<(TaskKind, ConfigOverrides)> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let parsed: ConfigFile = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
    Ok((parsed.task, parsed.overrides))
}

/// Validate the STEINFLOW_THREADS environment variable. The computation is
/// sequential, so the value only caps (already absent) parallelism, but an
/// invalid setting is still rejected loudly.
pub fn thread_cap_from_env() -> Result<Option<usize>> {
    match std::env::var("STEINFLOW_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Config(format!("STEINFLOW_THREADS: {e}"))),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(Some(v)),
            _ => Err(Error::Config(format!(
                "STEINFLOW_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

/// One finished trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub seed: u64,
    pub trace: RunTrace,
    pub report: EvalReport,
    pub wall: Duration,
}

/// The 2-D Gaussian benchmark target.
pub fn gaussian_benchmark_target() -> GaussianTarget {
    let mean = ndarray::array![-0.6871, 0.8010];
    let cov = ndarray::array![[0.2260, 0.1652], [0.1652, 0.6779]];
    GaussianTarget::new(mean, cov).expect("benchmark covariance is PD")
}

/// Standard-normal particle initialization.
pub fn init_gaussian_particles(n: usize, d: usize, seed: u64) -> Result<ParticleSet> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ParticleSet::new(GaussianTarget::standard(d).sample(n, &mut rng))
}

/// Run the Gaussian benchmark over `config.trials` seeds.
pub fn run_gaussian(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let target = gaussian_benchmark_target();
    let grid = config.grid()?;
    let mut results = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let seed = config.seed + trial as u64;
        let init = init_gaussian_particles(config.particles, target.dim(), seed)?;
        let started = Instant::now();
        let (out, trace) = run_mk_svgd_observed(
            &target,
            init,
            &grid,
            &config.run_config(seed),
            Vec::new(),
            |_, _| Vec::new(),
        )?;
        let wall = started.elapsed();
        let (mean, cov) = particle_moments(out.positions())?;
        let report = EvalReport {
            particle_mean: Some(mean),
            particle_cov: cov,
            ..EvalReport::default()
        };
        let result = TrialResult {
            seed,
            trace,
            report,
            wall,
        };
        maybe_emit(config, trial, &result)?;
        results.push(result);
    }
    emit_aggregate_if_configured(config, &results)?;
    Ok(results)
}

/// A prepared logistic-regression problem: posterior on the training
/// split, held-out test data ready for the predictive.
#[derive(Debug, Clone)]
pub struct LogregProblem {
    pub model: BlrPosterior,
    pub test_features: Array2<f64>,
    pub test_labels: Array1<f64>,
}

/// Load, subsample, split, and (optionally) standardize the dataset named
/// by the config, then assemble the hierarchical logistic posterior
/// (Gamma(1, 0.01) hyperprior on the weight precision).
pub fn prepare_logreg(config: &ExperimentConfig) -> Result<LogregProblem> {
    let dataset = load_task_dataset(config, Task::Classification)?;
    let (train, test) = split_dataset(config, &dataset)?;
    let (train, test) = if config.standardize {
        let (tr, te, _) = standardize(&train, &test, false)?;
        (tr, te)
    } else {
        (train, test)
    };
    let model = BlrPosterior::new(train.features, train.targets, 1.0, 0.01)?;
    Ok(LogregProblem {
        model,
        test_features: test.features,
        test_labels: test.targets,
    })
}

/// Particle initialization for the logistic posterior: per particle,
/// `alpha ~ Gamma(1, rate 0.01)` and `theta ~ N(0, alpha^{-1} I)`, stored
/// as `[theta, log alpha]`.
pub fn init_logreg_particles(num_features: usize, n: usize, seed: u64) -> Result<ParticleSet> {
    let gamma = Gamma::new(1.0, 100.0).expect("valid Gamma parameters");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut positions = Array2::zeros((n, num_features + 1));
    for mut row in positions.rows_mut() {
        let alpha: f64 = gamma.sample(&mut rng);
        let sd = (1.0 / alpha).sqrt();
        for a in 0..num_features {
            let z: f64 = StandardNormal.sample(&mut rng);
            row[a] = sd * z;
        }
        row[num_features] = alpha.ln();
    }
    ParticleSet::new(positions)
}

fn logreg_metrics(
    problem: &LogregProblem,
    positions: ArrayView2<f64>,
) -> Result<(f64, f64)> {
    let probs = predictive_blr(positions, problem.test_features.view())?;
    classification_metrics(probs.view(), problem.test_labels.view())
}

/// Run the logistic-regression benchmark with the multi-kernel driver.
pub fn run_logreg(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    run_logreg_with(config, None)
}

/// Vanilla single-kernel baseline on the same problem and harness.
pub fn run_logreg_vanilla(
    config: &ExperimentConfig,
    bandwidth: BandwidthSpec,
) -> Result<Vec<TrialResult>> {
    run_logreg_with(config, Some(bandwidth))
}

fn run_logreg_with(
    config: &ExperimentConfig,
    vanilla: Option<BandwidthSpec>,
) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let problem = prepare_logreg(config)?;
    let grid = config.grid()?;
    let metric_names = vec!["accuracy".to_string(), "test_ll".to_string()];
    let mut results = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let seed = config.seed + trial as u64;
        let init = init_logreg_particles(problem.model.num_features(), config.particles, seed)?;
        let eval_every = config.eval_every;
        let observer = |iter: usize, positions: ArrayView2<f64>| -> Vec<f64> {
            if (iter + 1) % eval_every == 0 || iter + 1 == config.iters {
                match logreg_metrics(&problem, positions) {
                    Ok((acc, ll)) => vec![acc, ll],
                    Err(_) => vec![f64::NAN, f64::NAN],
                }
            } else {
                vec![f64::NAN, f64::NAN]
            }
        };
        let started = Instant::now();
        let run_config = config.run_config(seed);
        let (out, trace) = match vanilla {
            None => run_mk_svgd_observed(
                &problem.model,
                init,
                &grid,
                &run_config,
                metric_names.clone(),
                observer,
            )?,
            Some(bw) => run_svgd_observed(
                &problem.model,
                init,
                bw,
                &run_config,
                metric_names.clone(),
                observer,
            )?,
        };
        let wall = started.elapsed();
        let (accuracy, test_ll) = logreg_metrics(&problem, out.positions())?;
        let report = EvalReport {
            accuracy: Some(accuracy),
            test_log_likelihood: Some(test_ll),
            ..EvalReport::default()
        };
        let result = TrialResult {
            seed,
            trace,
            report,
            wall,
        };
        maybe_emit(config, trial, &result)?;
        results.push(result);
    }
    emit_aggregate_if_configured(config, &results)?;
    Ok(results)
}

/// A prepared BNN regression problem. Training data are standardized
/// inside the model; test data stay in raw units and are transformed by
/// the stored stats at prediction time.
#[derive(Debug, Clone)]
pub struct BnnProblem {
    pub model: BnnPosterior,
    pub test_features_raw: Array2<f64>,
    pub test_targets: Array1<f64>,
    pub stats: StandardizeStats,
}

/// Load, split, and standardize the regression dataset and assemble the
/// BNN posterior (Gamma(1, 0.1) hyperpriors).
pub fn prepare_bnn(config: &ExperimentConfig) -> Result<BnnProblem> {
    let dataset = load_task_dataset(config, Task::Regression)?;
    let (train, test) = split_dataset(config, &dataset)?;
    let (train_std, _, stats) = standardize(&train, &test, true)?;
    let model = BnnPosterior::new(train_std.features, train_std.targets, config.hidden)?;
    Ok(BnnProblem {
        model,
        test_features_raw: test.features,
        test_targets: test.targets,
        stats,
    })
}

/// Particle initialization for the BNN: network weights `N(0, 1/fan_in)`,
/// biases zero, `log lambda = log gamma = 0`.
pub fn init_bnn_particles(model: &BnnPosterior, n: usize, seed: u64) -> Result<ParticleSet> {
    let (h, p) = (model.hidden(), model.num_features());
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut positions = Array2::zeros((n, model.dim()));
    for mut row in positions.rows_mut() {
        let w1_sd = (1.0 / p as f64).sqrt();
        for a in 0..h * p {
            let z: f64 = StandardNormal.sample(&mut rng);
            row[a] = w1_sd * z;
        }
        let w2_sd = (1.0 / h as f64).sqrt();
        for a in h * p + h..h * p + 2 * h {
            let z: f64 = StandardNormal.sample(&mut rng);
            row[a] = w2_sd * z;
        }
        // biases and both log-precisions start at zero
    }
    ParticleSet::new(positions)
}

fn bnn_metrics(problem: &BnnProblem, positions: ArrayView2<f64>) -> Result<(f64, f64)> {
    let (means, precisions) = predictive_bnn(
        &problem.model,
        positions,
        problem.test_features_raw.view(),
        &problem.stats,
    )?;
    regression_metrics(means.view(), precisions.view(), problem.test_targets.view())
}

/// Run the BNN regression benchmark with the multi-kernel driver.
pub fn run_bnn(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    run_bnn_with(config, None)
}

/// Vanilla single-kernel baseline on the same problem and harness.
pub fn run_bnn_vanilla(
    config: &ExperimentConfig,
    bandwidth: BandwidthSpec,
) -> Result<Vec<TrialResult>> {
    run_bnn_with(config, Some(bandwidth))
}

fn run_bnn_with(
    config: &ExperimentConfig,
    vanilla: Option<BandwidthSpec>,
) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let grid = config.grid()?;
    let metric_names = vec!["rmse".to_string(), "test_ll".to_string()];
    let mut results = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let seed = config.seed + trial as u64;
        // re-split per trial so trials average over data splits as well
        let mut trial_config = config.clone();
        trial_config.seed = seed;
        let problem = prepare_bnn(&trial_config)?;
        let init = init_bnn_particles(&problem.model, config.particles, seed)?;
        let eval_every = config.eval_every;
        let observer = |iter: usize, positions: ArrayView2<f64>| -> Vec<f64> {
            if (iter + 1) % eval_every == 0 || iter + 1 == config.iters {
                match bnn_metrics(&problem, positions) {
                    Ok((rmse, ll)) => vec![rmse, ll],
                    Err(_) => vec![f64::NAN, f64::NAN],
                }
            } else {
                vec![f64::NAN, f64::NAN]
            }
        };
        let started = Instant::now();
        let run_config = config.run_config(seed);
        let (out, trace) = match vanilla {
            None => run_mk_svgd_observed(
                &problem.model,
                init,
                &grid,
                &run_config,
                metric_names.clone(),
                observer,
            )?,
            Some(bw) => run_svgd_observed(
                &problem.model,
                init,
                bw,
                &run_config,
                metric_names.clone(),
                observer,
            )?,
        };
        let wall = started.elapsed();
        let (rmse, test_ll) = bnn_metrics(&problem, out.positions())?;
        let report = EvalReport {
            rmse: Some(rmse),
            test_log_likelihood: Some(test_ll),
            ..EvalReport::default()
        };
        let result = TrialResult {
            seed,
            trace,
            report,
            wall,
        };
        maybe_emit(config, trial, &result)?;
        results.push(result);
    }
    emit_aggregate_if_configured(config, &results)?;
    Ok(results)
}

/// Dispatch on the configured task.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    match config.task {
        TaskKind::Gaussian => run_gaussian(config),
        TaskKind::Logreg => run_logreg(config),
        TaskKind::Bnn => run_bnn(config),
    }
}

fn load_task_dataset(config: &ExperimentConfig, task: Task) -> Result<Dataset> {
    let path = config
        .dataset
        .as_ref()
        .ok_or_else(|| Error::Config("this task requires --dataset".into()))?;
    let width = csv_column_count(path)?;
    if width < 2 {
        return input_err("dataset needs at least one feature column and a label");
    }
    let schema = CsvSchema::new(LabelColumn::Index(width - 1), task);
    let mut dataset = load_csv(path, &schema)?;
    if let Some(size) = config.subsample {
        dataset = dataset.subsample(size, config.seed);
    }
    Ok(dataset)
}

fn csv_column_count(path: &Path) -> Result<usize> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)?;
    match reader.records().next() {
        Some(record) => Ok(record.map_err(|e| Error::Config(e.to_string()))?.len()),
        None => input_err("dataset file is empty"),
    }
}

fn split_dataset(config: &ExperimentConfig, dataset: &Dataset) -> Result<(Dataset, Dataset)> {
    split(
        dataset,
        &SplitSpec {
            train_fraction: config.split_fraction,
            seed: config.seed,
        },
    )
}

fn maybe_emit(config: &ExperimentConfig, trial: usize, result: &TrialResult) -> Result<()> {
    if let Some(dir) = &config.out {
        emit_results(&result.trace, &result.report, dir, &format!("trial{trial}"))?;
    }
    Ok(())
}

fn emit_aggregate_if_configured(
    config: &ExperimentConfig,
    results: &[TrialResult],
) -> Result<()> {
    if let Some(dir) = &config.out {
        emit_aggregate(results, dir)?;
    }
    Ok(())
}

fn format_float(v: f64) -> String {
    // full round-trip precision so parse-back recovers the trace exactly
    format!("{v:?}")
}

/// Write one trial's trace CSV and summary file into `dir` under the given
/// label. See the module docs for the schemas.
pub fn emit_results(
    trace: &RunTrace,
    report: &EvalReport,
    dir: impl AsRef<Path>,
    label: &str,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;

    let mut writer = csv::Writer::from_path(dir.join(format!("{label}_trace.csv")))?;
    let mut header = vec!["iter".to_string(), "mksd".to_string()];
    for b in &trace.bandwidths {
        header.push(format!("ksd_h{b}"));
    }
    for b in &trace.bandwidths {
        header.push(format!("w_h{b}"));
    }
    header.extend(trace.metric_names.iter().cloned());
    writer.write_record(&header)?;
    for record in &trace.records {
        let mut row = vec![record.iteration.to_string(), format_float(record.mksd)];
        row.extend(record.per_kernel_ksd.iter().map(|v| format_float(*v)));
        row.extend(record.weights.iter().map(|v| format_float(*v)));
        row.extend(record.metrics.iter().map(|v| format_float(*v)));
        writer.write_record(&row)?;
    }
    writer.flush()?;

    let mut summary = String::new();
    writeln!(summary, "schema_version=1").expect("string write");
    for (key, value) in report_fields(report) {
        writeln!(summary, "{key}={value}").expect("string write");
    }
    std::fs::write(dir.join(format!("{label}_summary.txt")), summary)?;
    Ok(())
}

fn report_fields(report: &EvalReport) -> Vec<(String, String)> {
    let mut fields = Vec::new();
    if let Some(v) = report.accuracy {
        fields.push(("accuracy".into(), format_float(v)));
    }
    if let Some(v) = report.rmse {
        fields.push(("rmse".into(), format_float(v)));
    }
    if let Some(v) = report.test_log_likelihood {
        fields.push(("test_log_likelihood".into(), format_float(v)));
    }
    if let Some(m) = &report.particle_mean {
        let joined: Vec<String> = m.iter().map(|v| format_float(*v)).collect();
        fields.push(("particle_mean".into(), joined.join(",")));
    }
    if let Some(c) = &report.particle_cov {
        let joined: Vec<String> = c.iter().map(|v| format_float(*v)).collect();
        fields.push(("particle_cov".into(), joined.join(",")));
    }
    fields
}

/// Across-trial aggregate: mean and standard deviation of every final
/// scalar metric, written as `aggregate.txt`.
pub fn emit_aggregate(results: &[TrialResult], dir: impl AsRef<Path>) -> Result<()> {
    if results.is_empty() {
        return input_err("no trials to aggregate");
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut text = String::new();
    writeln!(text, "schema_version=1").expect("string write");
    writeln!(text, "trials={}", results.len()).expect("string write");
    for (name, get) in [
        ("accuracy", (|r: &EvalReport| r.accuracy) as fn(&EvalReport) -> Option<f64>),
        ("rmse", |r| r.rmse),
        ("test_log_likelihood", |r| r.test_log_likelihood),
    ] {
        let values: Vec<f64> = results.iter().filter_map(|r| get(&r.report)).collect();
        if values.len() == results.len() {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / values.len() as f64;
            writeln!(text, "{name}_mean={}", format_float(mean)).expect("string write");
            writeln!(text, "{name}_std={}", format_float(var.sqrt())).expect("string write");
        }
    }
    let wall: f64 = results.iter().map(|r| r.wall.as_secs_f64()).sum();
    writeln!(text, "total_wall_secs={}", format_float(wall)).expect("string write");
    std::fs::write(dir.join("aggregate.txt"), text)?;
    Ok(())
}

/// Parse an emitted trace CSV back into its header and numeric rows
/// (`iter` column included, as a float).
pub fn parse_trace_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Config(e.to_string()))?;
        let mut row = Vec::with_capacity(record.len());
        for field in record.iter() {
            row.push(field.parse::<f64>().map_err(|_| Error::Parse {
                row: line + 2,
                msg: format!("not a number: {field:?}"),
            })?);
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Read back a summary file into key/value pairs.
pub fn parse_summary(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("malformed summary line: {line:?}")))?;
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}
