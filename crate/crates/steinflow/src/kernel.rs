//! RBF base kernels with analytic derivatives, bandwidth selection, and the
//! weighted multi-kernel combiner.
//!
//! The bandwidth convention throughout is `k(x, x') = exp(-||x - x'||^2 / h)`
//! (no factor 2 in the denominator). All derivative formulas below are
//! derived under this convention.

use ndarray::{Array1, Array2, Array3, ArrayView1, ArrayView2};

use crate::error::{input_err, Result};

/// Ordered grid of RBF bandwidths, one per base kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    bandwidths: Vec<f64>,
}

impl BandwidthGrid {
    /// Build a grid from explicit bandwidths. They must be positive and
    /// strictly increasing.
    pub fn new(bandwidths: Vec<f64>) -> Result<Self> {
        if bandwidths.is_empty() {
            return input_err("bandwidth grid must be nonempty");
        }
        for &h in &bandwidths {
            if !(h > 0.0) || !h.is_finite() {
                return input_err(format!("bandwidth must be positive and finite, got {h}"));
            }
        }
        if bandwidths.windows(2).any(|w| w[0] >= w[1]) {
            return input_err("bandwidths must be strictly increasing");
        }
        Ok(Self { bandwidths })
    }

    /// Grid with a single bandwidth.
    pub fn single(h: f64) -> Result<Self> {
        Self::new(vec![h])
    }

    pub fn len(&self) -> usize {
        self.bandwidths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bandwidths.is_empty()
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }
}

/// Geometric bandwidth sequence `lo, lo*factor, ..., lo*factor^(count-1)`.
///
/// A decreasing sequence (`factor < 1`) is stored in ascending order.
pub fn build_grid(lo: f64, factor: f64, count: usize) -> Result<BandwidthGrid> {
    if count == 0 {
        return input_err("grid count must be >= 1");
    }
    if !(lo > 0.0) || !lo.is_finite() {
        return input_err(format!("grid lo must be positive, got {lo}"));
    }
    if !(factor > 0.0) || !factor.is_finite() {
        return input_err(format!("grid factor must be positive, got {factor}"));
    }
    if count > 1 && factor == 1.0 {
        return input_err("grid factor must differ from 1 when count > 1");
    }
    let mut hs: Vec<f64> = (0..count).map(|i| lo * factor.powi(i as i32)).collect();
    if factor < 1.0 {
        hs.reverse();
    }
    BandwidthGrid::new(hs)
}

/// Nonnegative kernel weight vector with unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    w: Vec<f64>,
}

impl KernelWeights {
    const NORM_TOL: f64 = 1e-9;

    /// Validate and wrap a weight vector: entries nonnegative, `||w||_2 = 1`
    /// within `1e-9`.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return input_err("kernel weights must be nonempty");
        }
        if w.iter().any(|&wi| wi < 0.0 || !wi.is_finite()) {
            return input_err("kernel weights must be nonnegative and finite");
        }
        let norm = w.iter().map(|wi| wi * wi).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return input_err(format!("kernel weights must have unit norm, got {norm}"));
        }
        Ok(Self { w })
    }

    /// Uniform weights `1/sqrt(m)`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return input_err("kernel weight length must be >= 1");
        }
        Ok(Self {
            w: vec![1.0 / (m as f64).sqrt(); m],
        })
    }

    /// Normalize a nonnegative, not-all-zero vector onto the unit sphere.
    pub fn from_unnormalized(raw: &[f64]) -> Result<Self> {
        if raw.iter().any(|&wi| wi < 0.0 || !wi.is_finite()) {
            return input_err("kernel weights must be nonnegative and finite");
        }
        let norm = raw.iter().map(|wi| wi * wi).sum::<f64>().sqrt();
        if norm == 0.0 {
            return input_err("cannot normalize an all-zero weight vector");
        }
        Ok(Self {
            w: raw.iter().map(|wi| wi / norm).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }
}

/// Pointwise RBF evaluation with its first-argument gradient and the trace
/// of the mixed second derivative.
#[derive(Debug, Clone)]
pub struct RbfEval {
    pub value: f64,
    pub grad_x: Array1<f64>,
    pub trace_hess: f64,
}

/// Evaluate `k(x, y) = exp(-||x - y||^2 / h)` together with
/// `grad_x = -(2/h)(x - y) k` and
/// `Tr(grad_{x,x'} k) = k (2d/h - (4/h^2) ||x - y||^2)`.
pub fn rbf_eval(x: ArrayView1<f64>, y: ArrayView1<f64>, h: f64) -> Result<RbfEval> {
    if x.len() != y.len() {
        return input_err(format!("dimension mismatch: {} vs {}", x.len(), y.len()));
    }
    if !(h > 0.0) {
        return input_err(format!("bandwidth must be positive, got {h}"));
    }
    let d = x.len() as f64;
    let sqdist: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let value = (-sqdist / h).exp();
    let grad_x = (&x - &y).mapv(|diff| -(2.0 / h) * diff * value);
    let trace_hess = value * (2.0 * d / h - (4.0 / (h * h)) * sqdist);
    Ok(RbfEval {
        value,
        grad_x,
        trace_hess,
    })
}

/// Per-kernel pairwise arrays for one base kernel over a particle set.
#[derive(Debug, Clone)]
pub struct KernelSlice {
    pub bandwidth: f64,
    /// `values[[j, l]] = k(x_j, x_l)`
    pub values: Array2<f64>,
    /// `grad_first[[j, l, ..]] = grad_{x_j} k(x_j, x_l)`
    pub grad_first: Array3<f64>,
    /// `trace_hess[[j, l]] = Tr(grad_{x,x'} k)(x_j, x_l)`
    pub trace_hess: Array2<f64>,
}

/// Cached pairwise kernel quantities for all base kernels, sharing a single
/// squared-distance matrix.
#[derive(Debug, Clone)]
pub struct PairwiseKernelEval {
    pub sqdist: Array2<f64>,
    pub kernels: Vec<KernelSlice>,
}

impl PairwiseKernelEval {
    pub fn num_kernels(&self) -> usize {
        self.kernels.len()
    }

    pub fn num_particles(&self) -> usize {
        self.sqdist.nrows()
    }
}

/// Build the pairwise evaluation for every kernel in the grid. The squared
/// distance matrix is computed once and shared, so the whole pass is
/// O(n^2 d + m n^2).
pub fn build_pairwise_eval(
    positions: ArrayView2<f64>,
    grid: &BandwidthGrid,
) -> Result<PairwiseKernelEval> {
    let n = positions.nrows();
    let d = positions.ncols();
    if n == 0 {
        return input_err("particle set must be nonempty");
    }

    // squared distances and signed differences, computed once and shared
    let mut sqdist = Array2::<f64>::zeros((n, n));
    let mut diff = Array3::<f64>::zeros((n, n, d));
    for j in 0..n {
        for l in (j + 1)..n {
            let mut s = 0.0;
            for a in 0..d {
                let dv = positions[[j, a]] - positions[[l, a]];
                s += dv * dv;
                diff[[j, l, a]] = dv;
                diff[[l, j, a]] = -dv;
            }
            sqdist[[j, l]] = s;
            sqdist[[l, j]] = s;
        }
    }
    let diff_flat = diff.as_slice().expect("standard layout");

    let mut kernels: Vec<KernelSlice> = Vec::with_capacity(grid.len());
    for &h in grid.bandwidths() {
        // exp(-s/2h) = sqrt(exp(-s/h)): on a factor-2 grid each slice after
        // the first needs only a sqrt pass instead of a fresh exp pass
        let values = match kernels.last() {
            Some(prev) if (h / prev.bandwidth - 2.0).abs() < 1e-12 => {
                prev.values.mapv(f64::sqrt)
            }
            _ => sqdist.mapv(|s| (-s / h).exp()),
        };
        let scale = 2.0 * d as f64 / h;
        let quad = 4.0 / (h * h);
        let mut trace_hess = Array2::<f64>::zeros((n, n));
        ndarray::Zip::from(&mut trace_hess)
            .and(&values)
            .and(&sqdist)
            .for_each(|t, &k, &s| *t = k * (scale - quad * s));

        let mut grad_first = Array3::<f64>::zeros((n, n, d));
        let grad_flat = grad_first.as_slice_mut().expect("standard layout");
        let values_flat = values.as_slice().expect("standard layout");
        for ((gc, dc), &k) in grad_flat
            .chunks_exact_mut(d)
            .zip(diff_flat.chunks_exact(d))
            .zip(values_flat)
        {
            let c = -(2.0 / h) * k;
            for (g, &dv) in gc.iter_mut().zip(dc) {
                *g = c * dv;
            }
        }
        kernels.push(KernelSlice {
            bandwidth: h,
            values,
            grad_first,
            trace_hess,
        });
    }

    Ok(PairwiseKernelEval { sqdist, kernels })
}

/// Weighted combination of the per-kernel arrays.
#[derive(Debug, Clone)]
pub struct CombinedKernelEval {
    pub values: Array2<f64>,
    pub grad_first: Array3<f64>,
    pub trace_hess: Array2<f64>,
}

/// Combine the per-kernel arrays linearly: `Kw = sum_i w_i K_i`, identically
/// for gradients and Hessian traces.
pub fn multi_kernel_eval(
    eval: &PairwiseKernelEval,
    w: &KernelWeights,
) -> Result<CombinedKernelEval> {
    if w.len() != eval.num_kernels() {
        return input_err(format!(
            "weight length {} does not match kernel count {}",
            w.len(),
            eval.num_kernels()
        ));
    }
    let n = eval.num_particles();
    let d = eval.kernels[0].grad_first.shape()[2];
    let mut values = Array2::<f64>::zeros((n, n));
    let mut grad_first = Array3::<f64>::zeros((n, n, d));
    let mut trace_hess = Array2::<f64>::zeros((n, n));
    for (wi, slice) in w.as_slice().iter().zip(&eval.kernels) {
        values.scaled_add(*wi, &slice.values);
        grad_first.scaled_add(*wi, &slice.grad_first);
        trace_hess.scaled_add(*wi, &slice.trace_hess);
    }
    Ok(CombinedKernelEval {
        values,
        grad_first,
        trace_hess,
    })
}

/// Median-heuristic bandwidth: `h = med^2 / log n` where `med` is the median
/// of the pairwise Euclidean distances over `i < j`.
///
/// Degenerate sets where every particle coincides fall back to `h = 1`
/// (a zero bandwidth would kill the repulsive term).
pub fn median_heuristic(positions: ArrayView2<f64>) -> Result<f64> {
    let n = positions.nrows();
    if n < 2 {
        return input_err("median heuristic needs at least two particles");
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for l in (j + 1)..n {
            let s: f64 = (0..positions.ncols())
                .map(|a| {
                    let diff = positions[[j, a]] - positions[[l, a]];
                    diff * diff
                })
                .sum();
            dists.push(s.sqrt());
        }
    }
    dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let med = if dists.len() % 2 == 1 {
        dists[dists.len() / 2]
    } else {
        0.5 * (dists[dists.len() / 2 - 1] + dists[dists.len() / 2])
    };
    if med == 0.0 {
        return Ok(1.0);
    }
    Ok(med * med / (n as f64).ln())
}
