//! Empirical kernelized Stein discrepancy (KSD) estimators, the
//! multi-kernel discrepancy (MKSD), and the closed-form optimal weight
//! vector that maximizes it over the nonnegative unit sphere.

use ndarray::{Array2, ArrayView1};

use crate::error::{input_err, Result};
use crate::kernel::{KernelWeights, PairwiseKernelEval};

/// Which pairwise-average estimator to use.
///
/// The U-statistic excludes the diagonal and is unbiased; the V-statistic
/// includes it and is nonnegative for PSD kernels, which makes it the safe
/// input to the square roots in the closed-form weight update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    UStatistic,
    VStatistic,
}

/// Cached target scores `s_p(x_j)` at the current particle positions.
#[derive(Debug, Clone)]
pub struct ScoreCache {
    scores: Array2<f64>,
}

impl ScoreCache {
    pub fn new(scores: Array2<f64>) -> Result<Self> {
        if scores.iter().any(|v| !v.is_finite()) {
            return input_err("score cache contains non-finite entries");
        }
        Ok(Self { scores })
    }

    pub fn scores(&self) -> &Array2<f64> {
        &self.scores
    }

    pub fn num_particles(&self) -> usize {
        self.scores.nrows()
    }
}

/// Per-kernel KSD estimates under a common estimator kind.
#[derive(Debug, Clone)]
pub struct KsdEstimate {
    pub per_kernel: Vec<f64>,
    pub kind: EstimatorKind,
}

/// The pairwise Stein kernel term
/// `u(x, y) = s(x)^T k s(y) + s(x)^T grad_y k + (grad_x k)^T s(y) + Tr(grad_{x,y} k)`.
pub fn u_term(
    score_x: ArrayView1<f64>,
    score_y: ArrayView1<f64>,
    k_val: f64,
    grad_x_k: ArrayView1<f64>,
    grad_y_k: ArrayView1<f64>,
    trace_hess: f64,
) -> Result<f64> {
    let d = score_x.len();
    if score_y.len() != d || grad_x_k.len() != d || grad_y_k.len() != d {
        return input_err("u_term: dimension mismatch");
    }
    let mut total = trace_hess;
    for a in 0..d {
        total += score_x[a] * k_val * score_y[a];
        total += score_x[a] * grad_y_k[a];
        total += grad_x_k[a] * score_y[a];
    }
    Ok(total)
}

/// Full pairwise Stein-kernel matrices, one per base kernel:
/// `u_i[[j, l]] = u_p^i(x_j, x_l)`.
///
/// For the RBF base kernels `grad_y k = -grad_x k` is used directly.
pub fn u_matrices(eval: &PairwiseKernelEval, scores: &ScoreCache) -> Result<Vec<Array2<f64>>> {
    let n = eval.num_particles();
    if scores.num_particles() != n {
        return input_err(format!(
            "score rows {} do not match particle count {n}",
            scores.num_particles()
        ));
    }
    let s = scores.scores();
    let d = s.ncols();

    // score Gram matrix, shared by every kernel
    let score_dot = s.dot(&s.t()).as_standard_layout().into_owned();
    let score_flat = s.as_slice().expect("standard layout");
    let dot_flat = score_dot.as_slice().expect("standard layout");

    let mut out = Vec::with_capacity(eval.num_kernels());
    for slice in &eval.kernels {
        let mut u = Array2::<f64>::zeros((n, n));
        let u_flat = u.as_slice_mut().expect("standard layout");
        let values = slice.values.as_slice().expect("standard layout");
        let hess = slice.trace_hess.as_slice().expect("standard layout");
        let grad = slice.grad_first.as_slice().expect("standard layout");
        for j in 0..n {
            let s_j = &score_flat[j * d..(j + 1) * d];
            for l in 0..n {
                let idx = j * n + l;
                // grad_x k = G[j, l], grad_y k = -G[j, l] for RBF
                let g = &grad[idx * d..idx * d + d];
                let s_l = &score_flat[l * d..(l + 1) * d];
                let mut cross = 0.0;
                for a in 0..d {
                    cross += g[a] * (s_l[a] - s_j[a]);
                }
                u_flat[idx] = dot_flat[idx] * values[idx] + cross + hess[idx];
            }
        }
        out.push(u);
    }
    Ok(out)
}

/// Estimate the per-kernel KSD by averaging the pairwise Stein term.
pub fn ksd_per_kernel(
    eval: &PairwiseKernelEval,
    scores: &ScoreCache,
    kind: EstimatorKind,
) -> Result<KsdEstimate> {
    let n = eval.num_particles();
    match kind {
        EstimatorKind::UStatistic if n < 2 => {
            return input_err("U-statistic needs at least two particles")
        }
        EstimatorKind::VStatistic if n < 1 => {
            return input_err("V-statistic needs at least one particle")
        }
        _ => {}
    }
    let mats = u_matrices(eval, scores)?;
    let per_kernel = mats
        .iter()
        .map(|u| match kind {
            EstimatorKind::UStatistic => {
                let total: f64 = u.sum();
                let diag: f64 = u.diag().sum();
                (total - diag) / (n * (n - 1)) as f64
            }
            EstimatorKind::VStatistic => u.sum() / (n * n) as f64,
        })
        .collect();
    Ok(KsdEstimate { per_kernel, kind })
}

/// MKSD at a given weight vector: the weighted sum of per-kernel KSDs.
pub fn mksd(estimate: &KsdEstimate, w: &KernelWeights) -> Result<f64> {
    if w.len() != estimate.per_kernel.len() {
        return input_err(format!(
            "weight length {} does not match estimate length {}",
            w.len(),
            estimate.per_kernel.len()
        ));
    }
    Ok(w.as_slice()
        .iter()
        .zip(&estimate.per_kernel)
        .map(|(wi, si)| wi * si)
        .sum())
}

/// Result of the closed-form weight update.
#[derive(Debug, Clone)]
pub struct WeightUpdate {
    pub weights: KernelWeights,
    /// True when every per-kernel estimate was nonpositive and the uniform
    /// fallback was used.
    pub fallback: bool,
}

fn clamped_or_fallback(estimate: &KsdEstimate) -> Result<Option<Vec<f64>>> {
    let m = estimate.per_kernel.len();
    if m == 0 {
        return input_err("empty KSD estimate");
    }
    if estimate.per_kernel.iter().any(|s| !s.is_finite()) {
        return input_err("KSD estimate contains non-finite entries");
    }
    let clamped: Vec<f64> = estimate.per_kernel.iter().map(|s| s.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= 0.0 {
        return Ok(None);
    }
    Ok(Some(clamped))
}

/// Closed-form weight update of the MK-SVGD algorithm:
/// `w_i = sqrt(S_i / sum_j S_j)` after clamping negatives to zero, i.e.
/// weights proportional to the RKHS norms `||phi_i||` of the per-kernel
/// update directions.
///
/// Note this is not the maximizer of the linear objective `<w, S>` on the
/// unit sphere (that is [`max_mksd_weights`]); it weights each kernel by the
/// magnitude of its own steepest-descent direction.
///
/// If every entry is nonpositive the update falls back to uniform weights;
/// this signals either that the particle set already satisfies the Stein
/// identity for every kernel, or that estimator noise dominates.
pub fn optimal_weights(estimate: &KsdEstimate) -> Result<WeightUpdate> {
    let m = estimate.per_kernel.len();
    let Some(clamped) = clamped_or_fallback(estimate)? else {
        return Ok(WeightUpdate {
            weights: KernelWeights::uniform(m)?,
            fallback: true,
        });
    };
    let total: f64 = clamped.iter().sum();
    let w: Vec<f64> = clamped.iter().map(|s| (s / total).sqrt()).collect();
    Ok(WeightUpdate {
        weights: KernelWeights::from_unnormalized(&w)?,
        fallback: false,
    })
}

/// Exact maximizer of `<w, S>` over the nonnegative unit sphere:
/// `w = S+ / ||S+||_2` with negatives clamped to zero. The attained value is
/// the maximum multi-kernel discrepancy over all admissible weight vectors.
///
/// Falls back to uniform weights when every entry is nonpositive.
pub fn max_mksd_weights(estimate: &KsdEstimate) -> Result<WeightUpdate> {
    let m = estimate.per_kernel.len();
    let Some(clamped) = clamped_or_fallback(estimate)? else {
        return Ok(WeightUpdate {
            weights: KernelWeights::uniform(m)?,
            fallback: true,
        });
    };
    Ok(WeightUpdate {
        weights: KernelWeights::from_unnormalized(&clamped)?,
        fallback: false,
    })
}
