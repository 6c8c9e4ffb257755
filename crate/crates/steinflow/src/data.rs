//! Dataset ingestion, standardization, splitting, and minibatching for the
//! experiment harness.

use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{input_err, Error, Result};

/// A fully materialized numeric dataset. For classification the targets are
/// binary `{0, 1}`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub features: Array2<f64>,
    pub targets: Array1<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, features: Array2<f64>, targets: Array1<f64>) -> Result<Self> {
        if features.nrows() != targets.len() {
            return input_err(format!(
                "feature rows {} do not match target count {}",
                features.nrows(),
                targets.len()
            ));
        }
        Ok(Self {
            name: name.into(),
            features,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    fn take_rows(&self, idx: &[usize]) -> Dataset {
        let p = self.num_features();
        let mut features = Array2::zeros((idx.len(), p));
        let mut targets = Array1::zeros(idx.len());
        for (out, &i) in idx.iter().enumerate() {
            features.row_mut(out).assign(&self.features.row(i));
            targets[out] = self.targets[i];
        }
        Dataset {
            name: self.name.clone(),
            features,
            targets,
        }
    }

    /// Seeded random subsample without replacement. Returns a copy of the
    /// whole dataset if `size >= len`.
    pub fn subsample(&self, size: usize, seed: u64) -> Dataset {
        if size >= self.len() {
            return self.clone();
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        idx.shuffle(&mut rng);
        idx.truncate(size);
        self.take_rows(&idx)
    }
}

/// Which column holds the label.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

/// Classification labels get mapped to `{0, 1}`; regression targets are kept
/// as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classification,
    Regression,
}

/// CSV parsing options.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub label: LabelColumn,
    pub delimiter: u8,
    pub has_header: bool,
    pub task: Task,
}

impl CsvSchema {
    pub fn new(label: LabelColumn, task: Task) -> Self {
        Self {
            label,
            delimiter: b',',
            has_header: false,
            task,
        }
    }
}

/// Load a rectangular numeric CSV into a dataset.
///
/// Binary classification labels are accepted as `{0,1}`, `{1,2}` or `{-1,1}`
/// and mapped onto `{0,1}`; anything else is a parse error naming the row.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(schema.has_header)
        .flexible(true)
        .from_path(path.as_ref())
        .map_err(|e| Error::Parse {
            row: 0,
            msg: e.to_string(),
        })?;

    let label_idx = match &schema.label {
        LabelColumn::Index(i) => *i,
        LabelColumn::Name(name) => {
            if !schema.has_header {
                return Err(Error::Config(
                    "label column by name requires a header row".into(),
                ));
            }
            let headers = reader.headers().map_err(|e| Error::Parse {
                row: 0,
                msg: e.to_string(),
            })?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Config(format!("label column '{name}' not in header")))?
        }
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 1 + usize::from(schema.has_header);
        let record = record.map_err(|e| Error::Parse {
            row: row_no,
            msg: e.to_string(),
        })?;
        if let Some(w) = width {
            if record.len() != w {
                return Err(Error::Parse {
                    row: row_no,
                    msg: format!("ragged row: expected {w} fields, got {}", record.len()),
                });
            }
        } else {
            if record.len() < 2 {
                return Err(Error::Parse {
                    row: row_no,
                    msg: "need at least one feature and one label column".into(),
                });
            }
            if label_idx >= record.len() {
                return Err(Error::Parse {
                    row: row_no,
                    msg: format!("label column {label_idx} out of range"),
                });
            }
            width = Some(record.len());
        }
        let mut feats = Vec::with_capacity(record.len() - 1);
        for (c, field) in record.iter().enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                row: row_no,
                msg: format!("non-numeric cell '{field}' in column {c}"),
            })?;
            if c == label_idx {
                labels.push(value);
            } else {
                feats.push(value);
            }
        }
        rows.push(feats);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            row: 0,
            msg: "empty file".into(),
        });
    }

    if schema.task == Task::Classification {
        let mut distinct: Vec<f64> = labels.clone();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        let map: fn(f64) -> f64 = match distinct.as_slice() {
            [0.0] | [1.0] | [0.0, 1.0] => |v| v,
            [1.0, 2.0] => |v| v - 1.0,
            [-1.0, 1.0] => |v| (v + 1.0) / 2.0,
            _ => {
                let bad = labels
                    .iter()
                    .position(|v| *v != 0.0 && *v != 1.0)
                    .unwrap_or(0);
                return Err(Error::Parse {
                    row: bad + 1 + usize::from(schema.has_header),
                    msg: format!("unknown label value {}", labels[bad]),
                });
            }
        };
        for v in &mut labels {
            *v = map(*v);
        }
    }

    let p = rows[0].len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let features = Array2::from_shape_vec((labels.len(), p), flat)
        .expect("rectangularity checked above");
    let name = path
        .as_ref()
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    Dataset::new(name, features, Array1::from_vec(labels))
}

/// Convert a sparse libsvm-format file (`label idx:val idx:val ...`, indices
/// 1-based) into a dense CSV with the label in the last column.
pub fn convert_libsvm_to_csv(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
    num_features: usize,
) -> Result<usize> {
    use std::io::{BufRead, BufReader, BufWriter, Write};
    let reader = BufReader::new(std::fs::File::open(input.as_ref())?);
    let mut writer = BufWriter::new(std::fs::File::create(output.as_ref())?);
    let mut count = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label = parts.next().ok_or_else(|| Error::Parse {
            row: i + 1,
            msg: "missing label".into(),
        })?;
        let mut dense = vec![0.0f64; num_features];
        for part in parts {
            let (idx, val) = part.split_once(':').ok_or_else(|| Error::Parse {
                row: i + 1,
                msg: format!("malformed sparse entry '{part}'"),
            })?;
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                row: i + 1,
                msg: format!("bad feature index '{idx}'"),
            })?;
            if idx == 0 || idx > num_features {
                return Err(Error::Parse {
                    row: i + 1,
                    msg: format!("feature index {idx} out of range 1..={num_features}"),
                });
            }
            dense[idx - 1] = val.parse().map_err(|_| Error::Parse {
                row: i + 1,
                msg: format!("non-numeric value '{val}'"),
            })?;
        }
        for v in &dense {
            write!(writer, "{v},")?;
        }
        writeln!(writer, "{label}")?;
        count += 1;
    }
    writer.flush()?;
    Ok(count)
}

/// Train/test split parameters.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Deterministic shuffled split. The train size is
/// `floor(train_fraction * n)`; both sides must end up nonempty.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let n = dataset.len();
    if n < 2 {
        return input_err("need at least two rows to split");
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return input_err(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        ));
    }
    let n_train = (spec.train_fraction * n as f64).floor() as usize;
    if n_train == 0 || n_train == n {
        return input_err(format!(
            "degenerate split: {n_train}/{} of {n} rows",
            n - n_train
        ));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    idx.shuffle(&mut rng);
    let train = dataset.take_rows(&idx[..n_train]);
    let test = dataset.take_rows(&idx[n_train..]);
    Ok((train, test))
}

/// Per-column standardization statistics, computed on the training split
/// only. Scales use the population (divide by n) standard deviation;
/// zero-variance columns keep scale 1 and are only centered.
#[derive(Debug, Clone)]
pub struct StandardizeStats {
    pub feature_mean: Array1<f64>,
    pub feature_scale: Array1<f64>,
    pub target_mean: Option<f64>,
    pub target_scale: Option<f64>,
}

impl StandardizeStats {
    pub fn apply_features(&self, features: ArrayView2<f64>) -> Array2<f64> {
        let mut out = features.to_owned();
        for mut row in out.rows_mut() {
            for (a, v) in row.iter_mut().enumerate() {
                *v = (*v - self.feature_mean[a]) / self.feature_scale[a];
            }
        }
        out
    }

    pub fn standardize_target(&self, y: f64) -> f64 {
        (y - self.target_mean.unwrap_or(0.0)) / self.target_scale.unwrap_or(1.0)
    }

    pub fn unstandardize_target(&self, y: f64) -> f64 {
        y * self.target_scale.unwrap_or(1.0) + self.target_mean.unwrap_or(0.0)
    }
}

fn column_stats(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    (mean, if sd > 0.0 { sd } else { 1.0 })
}

/// Standardize train and test with train-only statistics. When
/// `standardize_targets` is set (regression), the target column is
/// standardized the same way and the stats carry the inverse transform.
pub fn standardize(
    train: &Dataset,
    test: &Dataset,
    standardize_targets: bool,
) -> Result<(Dataset, Dataset, StandardizeStats)> {
    if train.is_empty() {
        return input_err("training split must be nonempty");
    }
    if test.num_features() != train.num_features() {
        return input_err("train and test feature widths differ");
    }
    let n = train.len();
    let p = train.num_features();
    let mut feature_mean = Array1::zeros(p);
    let mut feature_scale = Array1::ones(p);
    for a in 0..p {
        let (m, s) = column_stats(train.features.column(a).iter().copied(), n);
        feature_mean[a] = m;
        feature_scale[a] = s;
    }
    let (target_mean, target_scale) = if standardize_targets {
        let (m, s) = column_stats(train.targets.iter().copied(), n);
        (Some(m), Some(s))
    } else {
        (None, None)
    };
    let stats = StandardizeStats {
        feature_mean,
        feature_scale,
        target_mean,
        target_scale,
    };
    let transform = |ds: &Dataset| -> Dataset {
        let features = stats.apply_features(ds.features.view());
        let targets = if standardize_targets {
            ds.targets.mapv(|y| stats.standardize_target(y))
        } else {
            ds.targets.clone()
        };
        Dataset {
            name: ds.name.clone(),
            features,
            targets,
        }
    };
    Ok((transform(train), transform(test), stats))
}

/// Infinite iterator over minibatch index sets. Every epoch is a fresh
/// shuffled partition of `0..n`; the last batch of an epoch may be short.
#[derive(Debug)]
pub struct MinibatchStream {
    order: Vec<usize>,
    batch: usize,
    pos: usize,
    rng: ChaCha20Rng,
}

pub fn minibatch_stream(n: usize, batch: usize, seed: u64) -> Result<MinibatchStream> {
    if batch == 0 {
        return input_err("batch size must be positive");
    }
    if batch > n {
        return input_err(format!("batch size {batch} exceeds {n} rows"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    Ok(MinibatchStream {
        order,
        batch,
        pos: 0,
        rng,
    })
}

impl Iterator for MinibatchStream {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.pos >= self.order.len() {
            self.order.shuffle(&mut self.rng);
            self.pos = 0;
        }
        let end = (self.pos + self.batch).min(self.order.len());
        let out = self.order[self.pos..end].to_vec();
        self.pos = end;
        Some(out)
    }
}

/// Seeded synthetic datasets used by the desk-scale benchmark harness when
/// the original source files are not available.
pub mod synth {
    use super::Dataset;
    use ndarray::{Array1, Array2};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Binary classification with Gaussian features and a logistic label
    /// model; Bayes-optimal accuracy is around 0.8 at the default scale.
    pub fn classification(name: &str, n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let theta: Vec<f64> = (0..p)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                2.0 * z / (p as f64).sqrt()
            })
            .collect();
        let mut features = Array2::zeros((n, p));
        let mut targets = Array1::zeros(n);
        for j in 0..n {
            let mut logit = 0.0;
            for a in 0..p {
                let x: f64 = StandardNormal.sample(&mut rng);
                features[[j, a]] = x;
                logit += theta[a] * x;
            }
            let prob = 1.0 / (1.0 + (-logit).exp());
            targets[j] = f64::from(rng.gen_range(0.0..1.0) < prob);
        }
        Dataset {
            name: name.into(),
            features,
            targets,
        }
    }

    /// Smooth nonlinear regression surface plus Gaussian noise, in the
    /// shape (row/attribute counts) of the named UCI benchmark tables.
    pub fn regression(name: &str, n: usize, p: usize, noise_sd: f64, seed: u64) -> Dataset {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let freq: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5..2.0)).collect();
        let lin: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut features = Array2::zeros((n, p));
        let mut targets = Array1::zeros(n);
        for j in 0..n {
            let mut s = 0.0;
            let mut l = 0.0;
            for a in 0..p {
                let x = rng.gen_range(-1.0..1.0);
                features[[j, a]] = x;
                s += (freq[a] * x).sin();
                l += lin[a] * x;
            }
            let noise: f64 = StandardNormal.sample(&mut rng);
            targets[j] = 3.0 * s / (p as f64).sqrt() + l + noise_sd * noise;
        }
        Dataset {
            name: name.into(),
            features,
            targets,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_csv_fixture() {
        let f = write_temp("1.0,2.0,0\n3.0,4.0,1\n5.0,6.0,1\n");
        let schema = CsvSchema::new(LabelColumn::Index(2), Task::Classification);
        let ds = load_csv(f.path(), &schema).unwrap();
        assert_eq!(ds.features, array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]);
        assert_eq!(ds.targets, array![0.0, 1.0, 1.0]);
    }

    #[test]
    fn load_csv_header_and_named_label() {
        let f = write_temp("a,b,y\n1,2,3.5\n4,5,6.5\n");
        let mut schema = CsvSchema::new(LabelColumn::Name("y".into()), Task::Regression);
        schema.has_header = true;
        let ds = load_csv(f.path(), &schema).unwrap();
        assert_eq!(ds.targets, array![3.5, 6.5]);
        assert_eq!(ds.features.ncols(), 2);
    }

    #[test]
    fn load_csv_reports_ragged_row() {
        let f = write_temp("1,2,0\n3,4\n");
        let schema = CsvSchema::new(LabelColumn::Index(2), Task::Classification);
        let err = load_csv(f.path(), &schema).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2"), "{msg}");
    }

    #[test]
    fn load_csv_reports_non_numeric_cell() {
        let f = write_temp("1,2,0\n3,oops,1\n");
        let schema = CsvSchema::new(LabelColumn::Index(2), Task::Classification);
        let err = load_csv(f.path(), &schema).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn load_csv_maps_one_two_labels() {
        let f = write_temp("0.5,1\n0.7,2\n0.9,1\n");
        let schema = CsvSchema::new(LabelColumn::Index(1), Task::Classification);
        let ds = load_csv(f.path(), &schema).unwrap();
        assert_eq!(ds.targets, array![0.0, 1.0, 0.0]);
    }

    #[test]
    fn load_csv_rejects_unknown_labels() {
        let f = write_temp("0.5,3\n0.7,4\n");
        let schema = CsvSchema::new(LabelColumn::Index(1), Task::Classification);
        assert!(load_csv(f.path(), &schema).is_err());
    }

    #[test]
    fn libsvm_conversion_round_trip() {
        let f = write_temp("2 1:0.5 3:1.5\n1 2:-1.0\n");
        let out = tempfile::NamedTempFile::new().unwrap();
        let n = convert_libsvm_to_csv(f.path(), out.path(), 3).unwrap();
        assert_eq!(n, 2);
        let schema = CsvSchema::new(LabelColumn::Index(3), Task::Classification);
        let ds = load_csv(out.path(), &schema).unwrap();
        assert_eq!(ds.features, array![[0.5, 0.0, 1.5], [0.0, -1.0, 0.0]]);
        assert_eq!(ds.targets, array![1.0, 0.0]);
    }

    fn toy_dataset(n: usize) -> Dataset {
        let features = Array2::from_shape_fn((n, 2), |(i, j)| (i * 2 + j) as f64);
        let targets = Array1::from_shape_fn(n, |i| i as f64);
        Dataset::new("toy", features, targets).unwrap()
    }

    #[test]
    fn split_sizes_and_determinism() {
        let ds = toy_dataset(10);
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 42,
        };
        let (train, test) = split(&ds, &spec).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        let (train2, test2) = split(&ds, &spec).unwrap();
        assert_eq!(train.features, train2.features);
        assert_eq!(test.targets, test2.targets);

        // partition property: every original target appears exactly once
        let mut seen: Vec<f64> = train.targets.iter().chain(test.targets.iter()).copied().collect();
        seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(seen, (0..10).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn split_floor_convention() {
        let ds = toy_dataset(506);
        let spec = SplitSpec {
            train_fraction: 0.9,
            seed: 0,
        };
        let (train, test) = split(&ds, &spec).unwrap();
        assert_eq!(train.len(), 455);
        assert_eq!(test.len(), 51);
    }

    #[test]
    fn split_rejects_degenerate() {
        let ds = toy_dataset(1);
        let spec = SplitSpec {
            train_fraction: 0.5,
            seed: 0,
        };
        assert!(split(&ds, &spec).is_err());
        let ds = toy_dataset(3);
        assert!(split(
            &ds,
            &SplitSpec {
                train_fraction: 0.1,
                seed: 0
            }
        )
        .is_err());
    }

    #[test]
    fn standardize_two_point_column() {
        // population convention: column {0, 2} has mean 1, std 1
        let train = Dataset::new("t", array![[0.0], [2.0]], array![0.0, 2.0]).unwrap();
        let test = Dataset::new("t", array![[1.0]], array![1.0]).unwrap();
        let (tr, te, stats) = standardize(&train, &test, true).unwrap();
        assert_eq!(tr.features, array![[-1.0], [1.0]]);
        assert_eq!(te.features, array![[0.0]]);
        assert_eq!(tr.targets, array![-1.0, 1.0]);
        assert_abs_diff_eq!(stats.unstandardize_target(te.targets[0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn standardize_constant_column_centers_only() {
        let train = Dataset::new("t", array![[5.0, 1.0], [5.0, 3.0]], array![0.0, 0.0]).unwrap();
        let test = train.clone();
        let (tr, _, stats) = standardize(&train, &test, false).unwrap();
        assert_eq!(tr.features.column(0).to_vec(), vec![0.0, 0.0]);
        assert_eq!(stats.feature_scale[0], 1.0);
    }

    #[test]
    fn standardize_round_trip_and_no_test_leakage() {
        let train = toy_dataset(8);
        let test = toy_dataset(3);
        let (_, _, stats) = standardize(&train, &test, true).unwrap();
        // stats must equal recomputation from the train split alone
        let (_, _, stats_again) = standardize(&train, &train, true).unwrap();
        assert_eq!(stats.feature_mean, stats_again.feature_mean);
        assert_eq!(stats.target_mean, stats_again.target_mean);
        for y in [0.0, 1.7, -3.2] {
            let z = stats.standardize_target(y);
            assert_abs_diff_eq!(stats.unstandardize_target(z), y, epsilon = 1e-12);
        }
    }

    #[test]
    fn minibatch_partition_and_determinism() {
        let mut stream = minibatch_stream(10, 3, 7).unwrap();
        let epoch: Vec<Vec<usize>> = (0..4).map(|_| stream.next().unwrap()).collect();
        assert_eq!(epoch.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 3, 1]);
        let mut all: Vec<usize> = epoch.into_iter().flatten().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());

        let mut again = minibatch_stream(10, 3, 7).unwrap();
        let mut stream = minibatch_stream(10, 3, 7).unwrap();
        for _ in 0..9 {
            assert_eq!(stream.next(), again.next());
        }
    }

    #[test]
    fn minibatch_rejects_bad_sizes() {
        assert!(minibatch_stream(10, 0, 0).is_err());
        assert!(minibatch_stream(10, 11, 0).is_err());
    }

    #[test]
    fn subsample_is_seeded_and_sized() {
        let ds = toy_dataset(100);
        let a = ds.subsample(20, 5);
        let b = ds.subsample(20, 5);
        assert_eq!(a.len(), 20);
        assert_eq!(a.features, b.features);
        let c = ds.subsample(500, 5);
        assert_eq!(c.len(), 100);
    }

    #[test]
    fn synth_shapes() {
        let c = synth::classification("covtype-like", 200, 54, 1);
        assert_eq!(c.features.shape(), &[200, 54]);
        assert!(c.targets.iter().all(|y| *y == 0.0 || *y == 1.0));
        let r = synth::regression("yacht-like", 308, 6, 0.5, 2);
        assert_eq!(r.features.shape(), &[308, 6]);
    }
}
