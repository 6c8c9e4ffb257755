//! Update directions, AdaGrad step control, and the driver loops for
//! vanilla SVGD and its multiple-kernel variant.
//!
//! The multi-kernel driver re-optimizes the kernel weight vector each
//! iteration from the same O(m n^2) pairwise evaluation already needed for
//! the update direction, so weight adaptation adds no extra kernel passes.

use std::time::{Duration, Instant};

use ndarray::{Array2, ArrayView2};

use crate::data::minibatch_stream;
use crate::discrepancy::{ksd_per_kernel, mksd, optimal_weights, EstimatorKind, ScoreCache};
use crate::error::{input_err, Error, Result};
use crate::kernel::{
    build_pairwise_eval, median_heuristic, BandwidthGrid, KernelSlice, KernelWeights,
    PairwiseKernelEval,
};
use crate::targets::ScoreModel;

/// The particle ensemble: one row per particle.
#[derive(Debug, Clone)]
pub struct ParticleSet {
    positions: Array2<f64>,
}

impl ParticleSet {
    pub fn new(positions: Array2<f64>) -> Result<Self> {
        if positions.nrows() == 0 || positions.ncols() == 0 {
            return input_err("particle set must be nonempty");
        }
        if positions.iter().any(|v| !v.is_finite()) {
            return input_err("particle positions must be finite");
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> ArrayView2<'_, f64> {
        self.positions.view()
    }

    pub fn num_particles(&self) -> usize {
        self.positions.nrows()
    }

    pub fn dim(&self) -> usize {
        self.positions.ncols()
    }
}

/// Per-coordinate AdaGrad accumulator.
#[derive(Debug, Clone)]
pub struct AdaGradState {
    accum: Array2<f64>,
    base_step: f64,
    fudge: f64,
}

impl AdaGradState {
    pub const DEFAULT_FUDGE: f64 = 1e-6;

    pub fn new(n: usize, d: usize, base_step: f64) -> Result<Self> {
        if base_step <= 0.0 || !base_step.is_finite() {
            return input_err("AdaGrad base step must be positive and finite");
        }
        Ok(Self {
            accum: Array2::zeros((n, d)),
            base_step,
            fudge: Self::DEFAULT_FUDGE,
        })
    }

    /// Accumulate the squared gradient and return the position delta
    /// `step * g / (fudge + sqrt(accum))`.
    pub fn step(&mut self, grad: ArrayView2<f64>) -> Result<Array2<f64>> {
        if grad.raw_dim() != self.accum.raw_dim() {
            return input_err("gradient shape does not match AdaGrad state");
        }
        let mut delta = grad.to_owned();
        for (d, a) in delta.iter_mut().zip(self.accum.iter_mut()) {
            *a += *d * *d;
            *d = self.base_step * *d / (self.fudge + a.sqrt());
        }
        Ok(delta)
    }
}

/// One completed iteration of a driver run.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Weights used for this iteration's move.
    pub weights: Vec<f64>,
    /// Per-kernel V-statistic KSD of the pre-move particle set.
    pub per_kernel_ksd: Vec<f64>,
    /// Weighted discrepancy under `weights`.
    pub mksd: f64,
    pub elapsed: Duration,
    /// Task metrics reported by the observer (possibly empty).
    pub metrics: Vec<f64>,
}

/// Append-only per-iteration record of a run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    /// Bandwidths of the kernel grid the run started with (the median
    /// heuristic re-estimates per iteration; this then holds the initial
    /// value).
    pub bandwidths: Vec<f64>,
    pub metric_names: Vec<String>,
    pub records: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

/// How the weight vector is re-optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Exact per-iteration closed form.
    ClosedForm,
    /// AdaGrad ascent on the linear weight objective with projection back
    /// onto the nonnegative unit sphere.
    AdaGradAscent,
}

/// Driver configuration shared by both the vanilla and multi-kernel loops.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Number of iterations T (>= 1).
    pub iterations: usize,
    /// AdaGrad base step for the particles.
    pub step: f64,
    /// Seed for the minibatch stream (unused for analytic targets).
    pub seed: u64,
    /// Minibatch size for stochastic models; `None` runs full-batch.
    pub batch: Option<usize>,
    pub weight_mode: WeightMode,
    /// Re-optimize weights every `weight_cadence` iterations.
    pub weight_cadence: usize,
    /// AdaGrad base step for the weight vector (ascent mode only).
    pub weight_step: f64,
    /// Estimator used for the per-kernel discrepancy that drives the
    /// weight update. The U-statistic is unbiased and free of the
    /// diagonal term `(||s||^2 + 2d/h)/n`, which otherwise dominates near
    /// convergence and pushes all weight onto the smallest bandwidth.
    pub weight_estimator: EstimatorKind,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            iterations: 200,
            step: 0.05,
            seed: 0,
            batch: None,
            weight_mode: WeightMode::ClosedForm,
            weight_cadence: 1,
            weight_step: 0.05,
            weight_estimator: EstimatorKind::UStatistic,
        }
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return input_err("need at least one iteration");
        }
        if self.weight_cadence == 0 {
            return input_err("weight cadence must be >= 1");
        }
        if !(self.step > 0.0) || !(self.weight_step > 0.0) {
            return input_err("step sizes must be positive");
        }
        Ok(())
    }
}

/// Single-kernel update direction:
/// `phi(x_l) = (1/n) sum_j [k(x_j, x_l) s(x_j) + grad_{x_j} k(x_j, x_l)]`.
pub fn svgd_direction(slice: &KernelSlice, scores: &ScoreCache) -> Result<Array2<f64>> {
    let s = scores.scores();
    let n = s.nrows();
    if slice.values.nrows() != n {
        return input_err("kernel evaluation does not match score cache size");
    }
    // kernel-smoothed scores via one matmul; repulsion via a j-axis sum
    let mut phi = slice.values.t().dot(s);
    phi += &slice.grad_first.sum_axis(ndarray::Axis(0));
    phi /= n as f64;
    Ok(phi)
}

/// Weight-combined direction `sum_i w_i phi_i`.
pub fn mk_svgd_direction(
    eval: &PairwiseKernelEval,
    scores: &ScoreCache,
    w: &KernelWeights,
) -> Result<Array2<f64>> {
    if w.len() != eval.num_kernels() {
        return input_err(format!(
            "weight length {} does not match kernel count {}",
            w.len(),
            eval.num_kernels()
        ));
    }
    let s = scores.scores();
    let mut combined = Array2::zeros(s.raw_dim());
    for (wi, slice) in w.as_slice().iter().zip(&eval.kernels) {
        let phi = svgd_direction(slice, scores)?;
        combined.scaled_add(*wi, &phi);
    }
    Ok(combined)
}

/// AdaGrad ascent state for the weight vector (linear objective, so the
/// gradient is the per-kernel KSD vector itself), projected back onto the
/// nonnegative unit sphere after each step.
struct WeightAscent {
    raw: Vec<f64>,
    accum: Vec<f64>,
    step: f64,
}

impl WeightAscent {
    fn new(init: &KernelWeights, step: f64) -> Self {
        Self {
            raw: init.as_slice().to_vec(),
            accum: vec![0.0; init.len()],
            step,
        }
    }

    fn update(&mut self, per_kernel_ksd: &[f64]) -> Result<KernelWeights> {
        for ((w, a), g) in self.raw.iter_mut().zip(&mut self.accum).zip(per_kernel_ksd) {
            *a += g * g;
            *w += self.step * g / (AdaGradState::DEFAULT_FUDGE + a.sqrt());
            *w = w.max(0.0);
        }
        if self.raw.iter().sum::<f64>() <= 0.0 {
            let uniform = KernelWeights::uniform(self.raw.len())?;
            self.raw = uniform.as_slice().to_vec();
            return Ok(uniform);
        }
        // keep the un-projected magnitudes as ascent state; emit the
        // projection
        KernelWeights::from_unnormalized(&self.raw)
    }
}

fn check_finite(what: &str, iter: usize, values: ArrayView2<f64>) -> Result<()> {
    for (row, r) in values.rows().into_iter().enumerate() {
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                iter,
                detail: format!("non-finite {what} for particle {row}"),
            });
        }
    }
    Ok(())
}

fn batch_source(
    model: &dyn ScoreModel,
    config: &RunConfig,
) -> Result<Option<crate::data::MinibatchStream>> {
    match (model.data_len(), config.batch) {
        (Some(n_data), Some(batch)) if batch < n_data => {
            Ok(Some(minibatch_stream(n_data, batch, config.seed)?))
        }
        (None, Some(_)) => input_err("minibatching requires a data-backed model"),
        _ => Ok(None),
    }
}

/// Multi-kernel driver: per iteration, build the shared pairwise
/// evaluation, score the particles (minibatched for stochastic models),
/// move them along the weight-combined direction under AdaGrad, and
/// re-optimize the weight vector from the V-statistic KSD of the same
/// evaluation. Weights start uniform at `1/sqrt(m)`.
///
/// The observer is called with the post-move particle positions each
/// iteration and its outputs are recorded as `metric_names` columns.
pub fn run_mk_svgd_observed(
    model: &dyn ScoreModel,
    init: ParticleSet,
    grid: &BandwidthGrid,
    config: &RunConfig,
    metric_names: Vec<String>,
    mut observer: impl FnMut(usize, ArrayView2<f64>) -> Vec<f64>,
) -> Result<(ParticleSet, RunTrace)> {
    config.validate()?;
    if init.dim() != model.dim() {
        return input_err("particle dimension does not match model dimension");
    }
    let mut positions = init.positions;
    let (n, d) = (positions.nrows(), positions.ncols());
    let mut adagrad = AdaGradState::new(n, d, config.step)?;
    let mut weights = KernelWeights::uniform(grid.len())?;
    let mut ascent = WeightAscent::new(&weights, config.weight_step);
    let mut batches = batch_source(model, config)?;

    let mut trace = RunTrace {
        bandwidths: grid.bandwidths().to_vec(),
        metric_names,
        records: Vec::with_capacity(config.iterations),
    };

    for iter in 0..config.iterations {
        let started = Instant::now();
        let eval = build_pairwise_eval(positions.view(), grid)?;
        let batch = batches.as_mut().and_then(|b| b.next());
        let raw_scores = model.score(positions.view(), batch.as_deref())?;
        check_finite("score", iter, raw_scores.view())?;
        let scores = ScoreCache::new(raw_scores)?;

        // the U-statistic needs two particles; degrade gracefully for n=1
        let kind = if n < 2 {
            EstimatorKind::VStatistic
        } else {
            config.weight_estimator
        };
        let estimate = ksd_per_kernel(&eval, &scores, kind)?;
        let mksd_value = mksd(&estimate, &weights)?;
        let direction = mk_svgd_direction(&eval, &scores, &weights)?;
        let delta = adagrad.step(direction.view())?;
        positions += &delta;
        check_finite("position", iter, positions.view())?;

        let metrics = observer(iter, positions.view());
        trace.records.push(IterationRecord {
            iteration: iter,
            weights: weights.as_slice().to_vec(),
            per_kernel_ksd: estimate.per_kernel.clone(),
            mksd: mksd_value,
            elapsed: started.elapsed(),
            metrics,
        });

        if (iter + 1) % config.weight_cadence == 0 {
            weights = match config.weight_mode {
                WeightMode::ClosedForm => {
                    let update = optimal_weights(&estimate)?;
                    if update.fallback {
                        // every per-kernel estimate was nonpositive: no
                        // kernel detects remaining discrepancy, so keep the
                        // last informative weights instead of resetting
                        weights
                    } else {
                        update.weights
                    }
                }
                WeightMode::AdaGradAscent => ascent.update(&estimate.per_kernel)?,
            };
        }
    }
    Ok((ParticleSet { positions }, trace))
}

/// [`run_mk_svgd_observed`] without task metrics.
pub fn run_mk_svgd(
    model: &dyn ScoreModel,
    init: ParticleSet,
    grid: &BandwidthGrid,
    config: &RunConfig,
) -> Result<(ParticleSet, RunTrace)> {
    run_mk_svgd_observed(model, init, grid, config, Vec::new(), |_, _| Vec::new())
}

/// Bandwidth policy for the vanilla driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthSpec {
    Fixed(f64),
    /// Re-estimated from the current particle set every iteration.
    MedianHeuristic,
}

/// Vanilla single-kernel SVGD driver. With `BandwidthSpec::Fixed(h)` it
/// performs exactly the floating-point operations of the multi-kernel
/// driver restricted to one kernel with unit weight, which makes the m=1
/// reduction bit-compatible.
pub fn run_svgd_observed(
    model: &dyn ScoreModel,
    init: ParticleSet,
    bandwidth: BandwidthSpec,
    config: &RunConfig,
    metric_names: Vec<String>,
    mut observer: impl FnMut(usize, ArrayView2<f64>) -> Vec<f64>,
) -> Result<(ParticleSet, RunTrace)> {
    config.validate()?;
    if init.dim() != model.dim() {
        return input_err("particle dimension does not match model dimension");
    }
    let mut positions = init.positions;
    let (n, d) = (positions.nrows(), positions.ncols());
    let mut adagrad = AdaGradState::new(n, d, config.step)?;
    let weights = KernelWeights::uniform(1)?;
    let mut batches = batch_source(model, config)?;

    let initial_h = match bandwidth {
        BandwidthSpec::Fixed(h) => h,
        BandwidthSpec::MedianHeuristic => median_heuristic(positions.view())?,
    };
    let mut trace = RunTrace {
        bandwidths: vec![initial_h],
        metric_names,
        records: Vec::with_capacity(config.iterations),
    };

    for iter in 0..config.iterations {
        let started = Instant::now();
        let h = match bandwidth {
            BandwidthSpec::Fixed(h) => h,
            BandwidthSpec::MedianHeuristic => median_heuristic(positions.view())?,
        };
        let grid = BandwidthGrid::single(h)?;
        let eval = build_pairwise_eval(positions.view(), &grid)?;
        let batch = batches.as_mut().and_then(|b| b.next());
        let raw_scores = model.score(positions.view(), batch.as_deref())?;
        check_finite("score", iter, raw_scores.view())?;
        let scores = ScoreCache::new(raw_scores)?;

        // the U-statistic needs two particles; degrade gracefully for n=1
        let kind = if n < 2 {
            EstimatorKind::VStatistic
        } else {
            config.weight_estimator
        };
        let estimate = ksd_per_kernel(&eval, &scores, kind)?;
        let mksd_value = mksd(&estimate, &weights)?;
        let direction = mk_svgd_direction(&eval, &scores, &weights)?;
        let delta = adagrad.step(direction.view())?;
        positions += &delta;
        check_finite("position", iter, positions.view())?;

        let metrics = observer(iter, positions.view());
        trace.records.push(IterationRecord {
            iteration: iter,
            weights: weights.as_slice().to_vec(),
            per_kernel_ksd: estimate.per_kernel.clone(),
            mksd: mksd_value,
            elapsed: started.elapsed(),
            metrics,
        });
    }
    Ok((ParticleSet { positions }, trace))
}

/// [`run_svgd_observed`] without task metrics.
pub fn run_svgd(
    model: &dyn ScoreModel,
    init: ParticleSet,
    bandwidth: BandwidthSpec,
    config: &RunConfig,
) -> Result<(ParticleSet, RunTrace)> {
    run_svgd_observed(model, init, bandwidth, config, Vec::new(), |_, _| Vec::new())
}
