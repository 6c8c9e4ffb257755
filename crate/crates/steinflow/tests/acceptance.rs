//! Benchmark acceptance gate. Each test checks one numbered criterion and
//! prints a single `criterion N: PASS/FAIL` line (visible with
//! `--nocapture`). Tolerances are pinned next to each check.
//!
//! Several criteria measure wall time, so every test serializes on a
//! global lock; run order does not matter.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use steinflow::cli::{
    gaussian_benchmark_target, run_bnn, run_bnn_vanilla, run_gaussian, run_logreg,
    run_logreg_vanilla, ExperimentConfig, TaskKind, TrialResult,
};
use steinflow::data::{synth, Dataset};
use steinflow::discrepancy::{
    ksd_per_kernel, max_mksd_weights, optimal_weights, u_matrices, EstimatorKind, KsdEstimate,
    ScoreCache,
};
use steinflow::dynamics::{run_mk_svgd_observed, run_svgd_observed, BandwidthSpec, RunConfig};
use steinflow::kernel::{build_grid, build_pairwise_eval, BandwidthGrid, KernelWeights};
use steinflow::targets::{BlrPosterior, BnnPosterior, GaussianTarget, ScoreModel};

fn serial() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

fn verdict(criterion: usize, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({name}): {status} — {detail}");
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

/// The 10-seed Gaussian benchmark shared by criteria 1 and 2.
fn gaussian_results() -> &'static Vec<TrialResult> {
    static RESULTS: OnceLock<Vec<TrialResult>> = OnceLock::new();
    RESULTS.get_or_init(|| {
        let mut config = ExperimentConfig::for_task(TaskKind::Gaussian);
        config.trials = 10;
        run_gaussian(&config).expect("gaussian benchmark run")
    })
}

/// Gaussian toy benchmark: n=500, T=200, bandwidth grid 2^-4..2^5; the
/// 10-seed average of the final particle mean must sit within +/-0.01 per
/// coordinate of the reference value, each seed's sample covariance
/// within Frobenius distance 0.05 of the target covariance, and each
/// seeded run must finish in under a minute.
#[test]
fn criterion_1_gaussian_toy_reproduction() {
    let _guard = serial();
    let results = gaussian_results();
    let target = gaussian_benchmark_target();
    let reference_mean = [-0.68792629, 0.80107447];

    let mut mean_acc = [0.0f64; 2];
    let mut max_frob: f64 = 0.0;
    let mut max_wall = Duration::ZERO;
    for result in results {
        let mean = result.report.particle_mean.as_ref().expect("mean");
        let cov = result.report.particle_cov.as_ref().expect("cov");
        mean_acc[0] += mean[0];
        mean_acc[1] += mean[1];
        let frob = (cov - target.covariance()).mapv(|v| v * v).sum().sqrt();
        max_frob = max_frob.max(frob);
        max_wall = max_wall.max(result.wall);
    }
    let n = results.len() as f64;
    let err = [
        (mean_acc[0] / n - reference_mean[0]).abs(),
        (mean_acc[1] / n - reference_mean[1]).abs(),
    ];

    let ok = err[0] < 0.01
        && err[1] < 0.01
        && max_frob < 0.05
        && max_wall < Duration::from_secs(60);
    verdict(
        1,
        "Gaussian toy reproduction",
        ok,
        &format!(
            "10-seed mean error [{:.5}, {:.5}] (tol 0.01), max covariance \
             Frobenius distance {:.4} (tol 0.05), slowest seed {:.1}s (limit 60s)",
            err[0],
            err[1],
            max_frob,
            max_wall.as_secs_f64()
        ),
    );
}

/// Kernel-weight structure: in the converged state of criterion 1's runs,
/// the two largest kernel weights belong to bandwidths 1 and 2. Weights
/// jitter between frozen and re-optimized phases near convergence, so the
/// readout is the per-seed average over the last 100 iterations, further
/// averaged across the 10 seeds.
#[test]
fn criterion_2_kernel_weight_structure() {
    let _guard = serial();
    let results = gaussian_results();
    let bandwidths = results[0].trace.bandwidths.clone();
    let m = bandwidths.len();

    let mut aggregate = vec![0.0f64; m];
    for result in results {
        let records = &result.trace.records;
        let tail = &records[records.len().saturating_sub(100)..];
        for record in tail {
            for (acc, w) in aggregate.iter_mut().zip(&record.weights) {
                *acc += w / (tail.len() * results.len()) as f64;
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| aggregate[b].total_cmp(&aggregate[a]));
    let top: Vec<f64> = order[..2].iter().map(|&i| bandwidths[i]).collect();
    let ok = (top.contains(&1.0)) && (top.contains(&2.0));
    verdict(
        2,
        "kernel-weight structure",
        ok,
        &format!(
            "two largest tail-averaged weights at bandwidths {:?} (expected {{1, 2}}); \
             full profile {:?}",
            top,
            aggregate.iter().map(|w| (w * 1e3).round() / 1e3).collect::<Vec<_>>()
        ),
    );
}

/// Reduction oracle: the multi-kernel driver restricted to a single
/// kernel must match the vanilla driver trajectory to <= 1e-12
/// per-iteration drift over 100 iterations.
#[test]
fn criterion_3_single_kernel_reduction() {
    let _guard = serial();
    let target = gaussian_benchmark_target();
    let init = steinflow::cli::init_gaussian_particles(60, 2, 7).unwrap();
    let config = RunConfig {
        iterations: 100,
        step: 0.1,
        ..RunConfig::default()
    };
    let h = 1.5;

    let mut mk_states: Vec<Array2<f64>> = Vec::new();
    let grid = BandwidthGrid::single(h).unwrap();
    run_mk_svgd_observed(&target, init.clone(), &grid, &config, Vec::new(), |_, p| {
        mk_states.push(p.to_owned());
        Vec::new()
    })
    .unwrap();

    let mut max_drift: f64 = 0.0;
    let mut idx = 0;
    run_svgd_observed(
        &target,
        init,
        BandwidthSpec::Fixed(h),
        &config,
        Vec::new(),
        |_, p| {
            let drift = (&mk_states[idx] - &p).mapv(f64::abs).sum();
            max_drift = max_drift.max(drift);
            idx += 1;
            Vec::new()
        },
    )
    .unwrap();

    let ok = idx == 100 && max_drift <= 1e-12;
    verdict(
        3,
        "single-kernel reduction",
        ok,
        &format!("max per-iteration trajectory drift {max_drift:.2e} over {idx} iterations (tol 1e-12)"),
    );
}

/// Brute-force RBF Stein-kernel term computed from scratch, independent
/// of the library's vectorized path.
fn brute_force_ksd(
    positions: &Array2<f64>,
    scores: &Array2<f64>,
    h: f64,
    kind: EstimatorKind,
) -> f64 {
    let n = positions.nrows();
    let d = positions.ncols();
    let mut total = 0.0;
    let mut count = 0usize;
    for j in 0..n {
        for l in 0..n {
            if j != l || kind == EstimatorKind::VStatistic {
                let diff: Vec<f64> = (0..d)
                    .map(|a| positions[[j, a]] - positions[[l, a]])
                    .collect();
                let sq: f64 = diff.iter().map(|v| v * v).sum();
                let k = (-sq / h).exp();
                // grad wrt the first argument x_j; wrt x_l flips sign
                let grad_j: Vec<f64> = diff.iter().map(|v| -2.0 / h * v * k).collect();
                let trace = k * (2.0 * d as f64 / h - 4.0 / (h * h) * sq);
                let mut u = trace;
                for a in 0..d {
                    u += scores[[j, a]] * k * scores[[l, a]];
                    u += scores[[j, a]] * (-grad_j[a]);
                    u += grad_j[a] * scores[[l, a]];
                }
                total += u;
                count += 1;
            }
        }
    }
    if kind == EstimatorKind::VStatistic {
        count = n * n;
    }
    total / count as f64
}

/// KSD estimator oracle: the U- and V-statistic estimators must match an
/// independent brute-force double loop on random instances within 1e-10.
#[test]
fn criterion_4_ksd_estimator_oracle() {
    let _guard = serial();
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    let mut max_err: f64 = 0.0;
    let mut cases = 0usize;
    for _ in 0..25 {
        let n = rng.gen_range(2..=10);
        let d = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=3);
        let positions = Array2::from_shape_fn((n, d), |_| rng.gen_range(-2.0..2.0));
        let scores = Array2::from_shape_fn((n, d), |_| rng.gen_range(-3.0..3.0));
        // the grid wants strictly increasing bandwidths
        let mut bandwidths: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..4.0)).collect();
        bandwidths.sort_by(f64::total_cmp);
        bandwidths.dedup();
        let grid = BandwidthGrid::new(bandwidths.clone()).unwrap();
        let eval = build_pairwise_eval(positions.view(), &grid).unwrap();
        let cache = ScoreCache::new(scores.clone()).unwrap();
        for kind in [EstimatorKind::UStatistic, EstimatorKind::VStatistic] {
            let estimate = ksd_per_kernel(&eval, &cache, kind).unwrap();
            for (i, &h) in bandwidths.iter().enumerate() {
                let oracle = brute_force_ksd(&positions, &scores, h, kind);
                max_err = max_err.max((estimate.per_kernel[i] - oracle).abs());
                cases += 1;
            }
        }
    }
    let ok = max_err <= 1e-10;
    verdict(
        4,
        "KSD estimator oracle",
        ok,
        &format!("max |estimator - brute force| {max_err:.2e} over {cases} kernel instances (tol 1e-10)"),
    );
}

/// Weight-optimality oracle: the exact maximizer of the linear objective
/// <w, S> on the nonnegative unit sphere must beat 10,000 random
/// nonnegative unit vectors within 1e-8 slack. The square-root closed
/// form is additionally checked to attain at least the uniform-weight
/// value (it maximizes a different surrogate and can trail the exact
/// maximizer).
#[test]
fn criterion_5_weight_optimality_oracle() {
    let _guard = serial();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut worst_gap: f64 = f64::INFINITY;
    let mut closed_ok = true;
    for _ in 0..20 {
        let m = rng.gen_range(2..=5);
        // mixed signs, but keep at least one strictly positive entry so
        // the linear objective has a nondegenerate maximizer
        let s: Vec<f64> = loop {
            let draw: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.2..1.0)).collect();
            if draw.iter().any(|v| *v > 0.0) {
                break draw;
            }
        };
        let estimate = KsdEstimate {
            per_kernel: s.clone(),
            kind: EstimatorKind::UStatistic,
        };
        let dot = |w: &[f64]| -> f64 { w.iter().zip(&s).map(|(a, b)| a * b).sum() };

        let best = dot(max_mksd_weights(&estimate).unwrap().weights.as_slice());
        let mut random_best = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            let norm: f64 = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                random_best = random_best.max(dot(&raw.iter().map(|v| v / norm).collect::<Vec<_>>()));
            }
        }
        worst_gap = worst_gap.min(best - random_best);

        let update = optimal_weights(&estimate).unwrap();
        if !update.fallback {
            let uniform = KernelWeights::uniform(m).unwrap();
            closed_ok &= dot(update.weights.as_slice()) >= dot(uniform.as_slice()) - 1e-12;
        }
    }
    let ok = worst_gap >= -1e-8 && closed_ok;
    verdict(
        5,
        "weight optimality oracle",
        ok,
        &format!(
            "exact maximizer vs best of 10,000 random nonnegative unit vectors: \
             worst margin {worst_gap:.2e} (slack 1e-8); closed form >= uniform: {closed_ok}"
        ),
    );
}

fn fd_score(model: &dyn ScoreModel, x: ArrayView1<f64>, step: f64) -> Array1<f64> {
    let d = x.len();
    Array1::from_shape_fn(d, |a| {
        let mut hi = x.to_owned();
        let mut lo = x.to_owned();
        hi[a] += step;
        lo[a] -= step;
        let f_hi = model.log_density(hi.view()).expect("log density");
        let f_lo = model.log_density(lo.view()).expect("log density");
        (f_hi - f_lo) / (2.0 * step)
    })
}

fn max_fd_rel_err(model: &dyn ScoreModel, draws: usize, scale: f64, seed: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let d = model.dim();
    let mut max_rel: f64 = 0.0;
    for _ in 0..draws {
        let x = Array1::from_shape_fn(d, |_| rng.gen_range(-scale..scale));
        let positions = x.clone().insert_axis(Axis(0));
        let analytic = model.score(positions.view(), None).unwrap();
        let numeric = fd_score(model, x.view(), 1e-5);
        let diff = (&numeric - &analytic.row(0)).mapv(f64::abs).sum();
        let norm = analytic.row(0).mapv(f64::abs).sum().max(1.0);
        max_rel = max_rel.max(diff / norm);
    }
    max_rel
}

/// Score-gradient checks: analytic scores of the Gaussian, Bayesian
/// logistic regression, and small Bayesian-NN targets must match central
/// finite differences of their explicit log-densities to relative error
/// < 1e-4 over at least 100 random draws each.
#[test]
fn criterion_6_score_gradient_checks() {
    let _guard = serial();
    let mut rng = ChaCha20Rng::seed_from_u64(6);

    let mean = Array1::from_shape_fn(3, |_| rng.gen_range(-1.0..1.0));
    let a = Array2::from_shape_fn((3, 3), |_| rng.gen_range(-1.0..1.0));
    let cov = a.dot(&a.t()) + Array2::<f64>::eye(3) * 0.5;
    let gaussian = GaussianTarget::new(mean, cov).unwrap();
    let gauss_err = max_fd_rel_err(&gaussian, 120, 2.0, 60);

    let blr_data = synth::classification("fd-blr", 40, 3, 61);
    let blr =
        BlrPosterior::new(blr_data.features.clone(), blr_data.targets.clone(), 1.0, 0.01).unwrap();
    let blr_err = max_fd_rel_err(&blr, 120, 1.5, 62);

    let bnn_data = synth::regression("fd-bnn", 12, 2, 0.2, 63);
    let bnn = BnnPosterior::new(bnn_data.features.clone(), bnn_data.targets.clone(), 3).unwrap();
    let bnn_err = max_fd_rel_err(&bnn, 120, 0.8, 64);

    let ok = gauss_err < 1e-4 && blr_err < 1e-4 && bnn_err < 1e-4;
    verdict(
        6,
        "score-gradient checks",
        ok,
        &format!(
            "max finite-difference relative error over 120 draws each: \
             gaussian {gauss_err:.2e}, logistic {blr_err:.2e}, bnn {bnn_err:.2e} (tol 1e-4)"
        ),
    );
}

/// Stein identity: with n=1000 exact samples from the 2-D Gaussian
/// benchmark target, each per-kernel U-statistic KSD must lie within 3
/// bootstrap standard errors of zero; samples shifted off-target must
/// give a strictly positive V-statistic MKSD.
#[test]
fn criterion_7_stein_identity() {
    let _guard = serial();
    let target = gaussian_benchmark_target();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let n = 1000usize;
    let samples = target.sample(n, &mut rng);
    let grid = BandwidthGrid::new(vec![0.5, 1.0, 2.0, 4.0]).unwrap();

    let eval = build_pairwise_eval(samples.view(), &grid).unwrap();
    let cache = ScoreCache::new(target.score(samples.view(), None).unwrap()).unwrap();
    let mats = u_matrices(&eval, &cache).unwrap();
    let estimate = ksd_per_kernel(&eval, &cache, EstimatorKind::UStatistic).unwrap();

    // bootstrap: resample particle indices with replacement, recompute the
    // pairwise average over off-diagonal resampled pairs
    let mut max_sigma: f64 = 0.0;
    for (kernel_idx, u) in mats.iter().enumerate() {
        let mut boots = Vec::with_capacity(200);
        for _ in 0..200 {
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut total = 0.0;
            for (a, &ja) in idx.iter().enumerate() {
                for (b, &jb) in idx.iter().enumerate() {
                    if a != b {
                        total += u[[ja, jb]];
                    }
                }
            }
            boots.push(total / (n * (n - 1)) as f64);
        }
        let mean = boots.iter().sum::<f64>() / boots.len() as f64;
        let var =
            boots.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (boots.len() - 1) as f64;
        let se = var.sqrt();
        max_sigma = max_sigma.max(estimate.per_kernel[kernel_idx].abs() / se);
    }

    let shifted = &samples + 1.0;
    let eval_s = build_pairwise_eval(shifted.view(), &grid).unwrap();
    let cache_s = ScoreCache::new(target.score(shifted.view(), None).unwrap()).unwrap();
    let est_s = ksd_per_kernel(&eval_s, &cache_s, EstimatorKind::VStatistic).unwrap();
    let weights = KernelWeights::uniform(grid.len()).unwrap();
    let shifted_mksd = steinflow::discrepancy::mksd(&est_s, &weights).unwrap();

    let ok = max_sigma <= 3.0 && shifted_mksd > 0.0;
    verdict(
        7,
        "Stein identity",
        ok,
        &format!(
            "on-target per-kernel U-statistic at most {max_sigma:.2} bootstrap SEs from 0 \
             (limit 3); shifted-sample V-statistic MKSD {shifted_mksd:.4} (> 0 required)"
        ),
    );
}

fn write_dataset_csv(dir: &std::path::Path, name: &str, data: &Dataset) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut text = String::new();
    for (row, y) in data.features.rows().into_iter().zip(data.targets.iter()) {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&fields.join(","));
        text.push(',');
        text.push_str(&format!("{y}\n"));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Desk-scale logistic regression: on a 20k-row seeded subsample of a
/// 54-feature binary dataset, the multi-kernel run's test accuracy must
/// be at least the worst of five vanilla baselines (fixed bandwidths
/// 2^0, 2^4, 2^8, 2^12 and the median heuristic) and above 0.70, over 3
/// seeds, all within 15 minutes.
#[test]
fn criterion_8_logistic_regression_desk_scale() {
    let _guard = serial();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let data = synth::classification("covtype-like", 30_000, 54, 424_242);
    let path = write_dataset_csv(dir.path(), "covtype-like.csv", &data);

    let mut config = ExperimentConfig::for_task(TaskKind::Logreg);
    config.dataset = Some(path);
    config.subsample = Some(20_000);
    config.trials = 3;
    config.eval_every = 100;

    let mk_acc: Vec<f64> = run_logreg(&config)
        .unwrap()
        .iter()
        .map(|r| r.report.accuracy.unwrap())
        .collect();

    let baselines = [
        BandwidthSpec::Fixed(1.0),
        BandwidthSpec::Fixed(16.0),
        BandwidthSpec::Fixed(256.0),
        BandwidthSpec::Fixed(4096.0),
        BandwidthSpec::MedianHeuristic,
    ];
    let mut baseline_means = Vec::new();
    for spec in baselines {
        let accs: Vec<f64> = run_logreg_vanilla(&config, spec)
            .unwrap()
            .iter()
            .map(|r| r.report.accuracy.unwrap())
            .collect();
        baseline_means.push(mean(&accs));
    }
    let worst_baseline = baseline_means.iter().copied().fold(f64::INFINITY, f64::min);
    let elapsed = started.elapsed();

    let ok = mean(&mk_acc) >= worst_baseline
        && mk_acc.iter().all(|&a| a > 0.70)
        && elapsed < Duration::from_secs(900);
    verdict(
        8,
        "logistic regression desk scale",
        ok,
        &format!(
            "multi-kernel mean accuracy {:.4} (per-seed {:?}) vs worst baseline mean \
             {worst_baseline:.4}; all > 0.70; wall {:.0}s (limit 900s)",
            mean(&mk_acc),
            mk_acc.iter().map(|a| (a * 1e4).round() / 1e4).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    );
}

/// Desk-scale BNN regression: on Yacht-shaped (308x6) and Boston-shaped
/// (506x13) regression data with a 90/10 split over 10 trials, the
/// multi-kernel mean RMSE must not exceed the median-heuristic vanilla
/// mean RMSE by more than 0.15, the Yacht-shaped RMSE must stay below
/// 1.2, and the whole comparison must finish within 30 minutes.
#[test]
fn criterion_9_bnn_regression_desk_scale() {
    let _guard = serial();
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for (name, n, p) in [("yacht-like", 308, 6), ("boston-like", 506, 13)] {
        let data = synth::regression(name, n, p, 0.3, 777);
        let path = write_dataset_csv(dir.path(), &format!("{name}.csv"), &data);
        let mut config = ExperimentConfig::for_task(TaskKind::Bnn);
        config.dataset = Some(path);
        config.trials = 10;
        config.eval_every = 500;

        let mk: Vec<f64> = run_bnn(&config)
            .unwrap()
            .iter()
            .map(|r| r.report.rmse.unwrap())
            .collect();
        let vanilla: Vec<f64> = run_bnn_vanilla(&config, BandwidthSpec::MedianHeuristic)
            .unwrap()
            .iter()
            .map(|r| r.report.rmse.unwrap())
            .collect();
        let (mk_mean, vanilla_mean) = (mean(&mk), mean(&vanilla));
        ok &= mk_mean <= vanilla_mean + 0.15;
        if name == "yacht-like" {
            ok &= mk_mean < 1.2;
        }
        details.push(format!(
            "{name}: multi-kernel mean RMSE {mk_mean:.3} vs median-heuristic {vanilla_mean:.3}"
        ));
    }
    let elapsed = started.elapsed();
    ok &= elapsed < Duration::from_secs(1800);
    verdict(
        9,
        "BNN regression desk scale",
        ok,
        &format!(
            "{}; yacht limit 1.2, gap limit 0.15; wall {:.0}s (limit 1800s)",
            details.join("; "),
            elapsed.as_secs_f64()
        ),
    );
}

/// Complexity scaling: per-iteration wall time at n=500 particles must
/// grow at most ~linearly in the number of kernels; the m=10 / m=1 ratio
/// must not exceed 12.
#[test]
fn criterion_10_complexity_scaling() {
    let _guard = serial();
    let target = gaussian_benchmark_target();
    let config = RunConfig {
        iterations: 20,
        step: 0.3,
        ..RunConfig::default()
    };

    let mut per_iter = Vec::new();
    for grid in [
        BandwidthGrid::single(1.0).unwrap(),
        build_grid(0.0625, 2.0, 10).unwrap(),
    ] {
        let init = steinflow::cli::init_gaussian_particles(500, 2, 0).unwrap();
        let (_, trace) = run_mk_svgd_observed(&target, init, &grid, &config, Vec::new(), |_, _| {
            Vec::new()
        })
        .unwrap();
        // skip the first iteration (cache warm-up noise)
        let times: Vec<f64> = trace.records[1..]
            .iter()
            .map(|r| r.elapsed.as_secs_f64())
            .collect();
        per_iter.push(mean(&times));
    }

    let ratio = per_iter[1] / per_iter[0];
    let ok = ratio <= 12.0;
    verdict(
        10,
        "complexity scaling",
        ok,
        &format!(
            "per-iteration wall time {:.2}ms (m=1) vs {:.2}ms (m=10), ratio {ratio:.2} (limit 12)",
            per_iter[0] * 1e3,
            per_iter[1] * 1e3
        ),
    );
}
