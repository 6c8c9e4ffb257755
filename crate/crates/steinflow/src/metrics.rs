//! Ensemble evaluation: test accuracy, predictive log-likelihood, RMSE, and
//! particle-moment diagnostics.
//!
//! Predictive averaging follows the Bayesian model averaging convention:
//! per-particle probabilities (or densities) are averaged first, then logged.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{input_err, Result};

/// Summary of one evaluated run. Task-specific fields stay `None` for the
/// other task.
#[derive(Debug, Clone, Default)]
pub struct EvalReport {
    pub accuracy: Option<f64>,
    pub rmse: Option<f64>,
    pub test_log_likelihood: Option<f64>,
    pub particle_mean: Option<Array1<f64>>,
    pub particle_cov: Option<Array2<f64>>,
}

const PROB_FLOOR: f64 = 1e-12;

/// Classification metrics from per-particle positive-class probabilities
/// (`probs[[i, j]]` = particle i's probability that test point j is labeled 1).
///
/// The ensemble probability is the arithmetic mean over particles; accuracy
/// thresholds it at 0.5; the log-likelihood averages `log` of the ensemble
/// probability of the true label, floored at 1e-12.
pub fn classification_metrics(
    probs: ArrayView2<f64>,
    labels: ArrayView1<f64>,
) -> Result<(f64, f64)> {
    let (n_particles, n_test) = (probs.nrows(), probs.ncols());
    if n_particles == 0 || n_test == 0 {
        return input_err("need at least one particle and one test point");
    }
    if labels.len() != n_test {
        return input_err(format!(
            "label count {} does not match test columns {n_test}",
            labels.len()
        ));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return input_err("probabilities must lie in [0, 1]");
    }
    let mut correct = 0usize;
    let mut ll = 0.0;
    for j in 0..n_test {
        let ensemble = probs.column(j).sum() / n_particles as f64;
        let predicted = f64::from(ensemble > 0.5);
        if predicted == labels[j] {
            correct += 1;
        }
        let p_true = if labels[j] == 1.0 { ensemble } else { 1.0 - ensemble };
        ll += p_true.max(PROB_FLOOR).ln();
    }
    Ok((correct as f64 / n_test as f64, ll / n_test as f64))
}

/// Regression metrics from per-particle predictive means and per-particle
/// Gaussian noise precisions, all in un-standardized units.
///
/// RMSE is computed on the ensemble-mean prediction. The test log-likelihood
/// averages the log of the particle-averaged Gaussian predictive density.
pub fn regression_metrics(
    predictions: ArrayView2<f64>,
    precisions: ArrayView1<f64>,
    targets: ArrayView1<f64>,
) -> Result<(f64, f64)> {
    let (n_particles, n_test) = (predictions.nrows(), predictions.ncols());
    if n_particles == 0 || n_test == 0 {
        return input_err("need at least one particle and one test point");
    }
    if precisions.len() != n_particles {
        return input_err("one noise precision per particle required");
    }
    if targets.len() != n_test {
        return input_err("target count does not match prediction columns");
    }
    if precisions.iter().any(|g| !(*g > 0.0)) {
        return input_err("noise precisions must be positive");
    }

    let mut sq_err = 0.0;
    let mut ll = 0.0;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    for j in 0..n_test {
        let mean_pred = predictions.column(j).sum() / n_particles as f64;
        let r = targets[j] - mean_pred;
        sq_err += r * r;

        // log of the particle-averaged Gaussian density, via log-sum-exp
        let log_dens: Vec<f64> = (0..n_particles)
            .map(|i| {
                let resid = targets[j] - predictions[[i, j]];
                0.5 * (precisions[i].ln() - ln_2pi) - 0.5 * precisions[i] * resid * resid
            })
            .collect();
        let max = log_dens.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = log_dens.iter().map(|l| (l - max).exp()).sum();
        ll += max + (sum / n_particles as f64).ln();
    }
    Ok(((sq_err / n_test as f64).sqrt(), ll / n_test as f64))
}

/// Sample mean and (n-1)-normalized sample covariance of the particle set.
/// The covariance is omitted for fewer than two particles.
pub fn particle_moments(particles: ArrayView2<f64>) -> Result<(Array1<f64>, Option<Array2<f64>>)> {
    let (n, d) = (particles.nrows(), particles.ncols());
    if n == 0 {
        return input_err("empty particle set");
    }
    let mean = particles.sum_axis(ndarray::Axis(0)) / n as f64;
    if n < 2 {
        return Ok((mean, None));
    }
    let mut cov = Array2::zeros((d, d));
    for row in particles.rows() {
        for a in 0..d {
            for b in 0..d {
                cov[[a, b]] += (row[a] - mean[a]) * (row[b] - mean[b]);
            }
        }
    }
    cov /= (n - 1) as f64;
    Ok((mean, Some(cov)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::array;

    #[test]
    fn classification_perfect_single_particle() {
        let probs = array![[1.0, 0.0, 1.0]];
        let labels = array![1.0, 0.0, 1.0];
        let (acc, ll) = classification_metrics(probs.view(), labels.view()).unwrap();
        assert_eq!(acc, 1.0);
        assert_abs_diff_eq!(ll, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn classification_uniform_probabilities() {
        let probs = array![[0.5, 0.5]];
        let labels = array![1.0, 0.0];
        let (_, ll) = classification_metrics(probs.view(), labels.view()).unwrap();
        assert_relative_eq!(ll, 0.5f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn classification_ensemble_is_mean_of_particles() {
        // particles {0.2, 0.6} on a positive label: ensemble 0.4
        let probs = array![[0.2], [0.6]];
        let labels = array![1.0];
        let (acc, ll) = classification_metrics(probs.view(), labels.view()).unwrap();
        assert_eq!(acc, 0.0);
        assert_relative_eq!(ll, 0.4f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn classification_rejects_bad_shapes_and_values() {
        let probs = array![[0.2, 0.6]];
        assert!(classification_metrics(probs.view(), array![1.0].view()).is_err());
        let probs = array![[1.2]];
        assert!(classification_metrics(probs.view(), array![1.0].view()).is_err());
    }

    #[test]
    fn regression_zero_error() {
        let preds = array![[1.0, 2.0]];
        let prec = array![4.0];
        let targets = array![1.0, 2.0];
        let (rmse, _) = regression_metrics(preds.view(), prec.view(), targets.view()).unwrap();
        assert_eq!(rmse, 0.0);
    }

    #[test]
    fn regression_single_particle_gaussian_ll() {
        let r: f64 = 0.7;
        let gamma: f64 = 2.5;
        let preds = array![[0.0]];
        let prec = array![gamma];
        let targets = array![r];
        let (rmse, ll) = regression_metrics(preds.view(), prec.view(), targets.view()).unwrap();
        assert_relative_eq!(rmse, r, max_relative = 1e-12);
        let expect = 0.5 * (gamma / (2.0 * std::f64::consts::PI)).ln() - gamma * r * r / 2.0;
        assert_relative_eq!(ll, expect, max_relative = 1e-12);
    }

    #[test]
    fn regression_constant_offset() {
        let preds = array![[1.5, 3.5, 2.5]];
        let prec = array![1.0];
        let targets = array![1.0, 3.0, 2.0];
        let (rmse, _) = regression_metrics(preds.view(), prec.view(), targets.view()).unwrap();
        assert_relative_eq!(rmse, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn regression_rejects_nonpositive_precision() {
        let preds = array![[0.0]];
        let prec = array![0.0];
        assert!(regression_metrics(preds.view(), prec.view(), array![0.0].view()).is_err());
    }

    #[test]
    fn moments_two_particles() {
        let particles = array![[-1.0], [1.0]];
        let (mean, cov) = particle_moments(particles.view()).unwrap();
        assert_eq!(mean, array![0.0]);
        assert_eq!(cov.unwrap(), array![[2.0]]); // n-1 convention
    }

    #[test]
    fn moments_identical_particles() {
        let particles = array![[2.0, 3.0], [2.0, 3.0], [2.0, 3.0]];
        let (mean, cov) = particle_moments(particles.view()).unwrap();
        assert_eq!(mean, array![2.0, 3.0]);
        assert_eq!(cov.unwrap(), Array2::zeros((2, 2)));
    }

    #[test]
    fn moments_single_particle_omits_covariance() {
        let particles = array![[1.0, 2.0]];
        let (_, cov) = particle_moments(particles.view()).unwrap();
        assert!(cov.is_none());
    }

    #[test]
    fn metrics_are_particle_permutation_invariant() {
        let probs = array![[0.2, 0.9], [0.6, 0.3], [0.4, 0.5]];
        let labels = array![1.0, 0.0];
        let swapped = array![[0.6, 0.3], [0.4, 0.5], [0.2, 0.9]];
        let (acc_a, ll_a) = classification_metrics(probs.view(), labels.view()).unwrap();
        let (acc_b, ll_b) = classification_metrics(swapped.view(), labels.view()).unwrap();
        assert_eq!(acc_a, acc_b);
        assert_abs_diff_eq!(ll_a, ll_b, epsilon = 1e-12);
    }
}
