//! Reference classifiers the wrapper pipeline is compared against:
//! Gaussian naive Bayes, k-nearest-neighbours, and a univariate gene
//! ranking for building small baseline panels.
//!
//! Scoring runs in double precision regardless of the dataset scalar.

use serde::{Deserialize, Serialize};

use crate::dataset::{ExpressionDataset, Label};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Variances are floored here so constant features cannot produce a
/// zero-width Gaussian.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Per-class Gaussian naive Bayes parameters, class order [Tumor, Normal].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    /// Class frequencies; they sum to 1.
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

fn class_index(label: Label) -> usize {
    match label {
        Label::Tumor => 0,
        Label::Normal => 1,
    }
}

/// Fit per-class feature means and population variances (divisor `n`).
pub fn gnb_fit<S: Scalar>(ds: &ExpressionDataset<S>) -> Result<GnbModel> {
    let labels = ds.require_labels()?;
    let n_genes = ds.n_genes();
    let mut counts = [0usize; 2];
    let mut means = [vec![0.0f64; n_genes], vec![0.0f64; n_genes]];
    for (i, &label) in labels.iter().enumerate() {
        let c = class_index(label);
        counts[c] += 1;
        for (j, &v) in ds.row(i).iter().enumerate() {
            means[c][j] += v.as_f64();
        }
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::Config(
            "naive Bayes needs at least one sample of each class".into(),
        ));
    }
    for c in 0..2 {
        for m in &mut means[c] {
            *m /= counts[c] as f64;
        }
    }
    let mut variances = [vec![0.0f64; n_genes], vec![0.0f64; n_genes]];
    for (i, &label) in labels.iter().enumerate() {
        let c = class_index(label);
        for (j, &v) in ds.row(i).iter().enumerate() {
            let d = v.as_f64() - means[c][j];
            variances[c][j] += d * d;
        }
    }
    for c in 0..2 {
        for v in &mut variances[c] {
            *v = (*v / counts[c] as f64).max(VARIANCE_FLOOR);
        }
    }
    let total = (counts[0] + counts[1]) as f64;
    Ok(GnbModel {
        priors: [counts[0] as f64 / total, counts[1] as f64 / total],
        means,
        variances,
    })
}

/// Per-class log scores, `ln(prior) + sum of per-gene log Gaussian
/// densities`, in class order [Tumor, Normal].
pub fn gnb_log_scores<S: Scalar>(model: &GnbModel, row: &[S]) -> Result<[f64; 2]> {
    if row.len() != model.means[0].len() {
        return Err(Error::Dimension {
            what: "naive Bayes input",
            expected: model.means[0].len(),
            found: row.len(),
        });
    }
    let mut scores = [0.0f64; 2];
    for (c, score) in scores.iter_mut().enumerate() {
        *score = model.priors[c].ln();
        for (j, &v) in row.iter().enumerate() {
            let var = model.variances[c][j];
            let d = v.as_f64() - model.means[c][j];
            *score += -0.5 * (2.0 * std::f64::consts::PI * var).ln() - d * d / (2.0 * var);
        }
    }
    Ok(scores)
}

/// Classify one row by the larger log score; a tie goes to Tumor.
pub fn gnb_predict<S: Scalar>(model: &GnbModel, row: &[S]) -> Result<Label> {
    let [tumor, normal] = gnb_log_scores(model, row)?;
    Ok(if tumor >= normal {
        Label::Tumor
    } else {
        Label::Normal
    })
}

pub fn gnb_predict_batch<S: Scalar>(
    model: &GnbModel,
    ds: &ExpressionDataset<S>,
) -> Result<Vec<Label>> {
    (0..ds.n_samples())
        .map(|i| gnb_predict(model, ds.row(i)))
        .collect()
}

/// k-nearest-neighbours "model": the stored training set plus an odd `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel<S: Scalar> {
    train: ExpressionDataset<S>,
    k: usize,
}

impl<S: Scalar> KnnModel<S> {
    /// Store a labeled training set. `k` must be odd — two classes can then
    /// never split a vote — and at most the number of training samples.
    pub fn new(train: ExpressionDataset<S>, k: usize) -> Result<Self> {
        train.require_labels()?;
        if k == 0 || k % 2 == 0 {
            return Err(Error::Config(format!(
                "k must be odd and positive, got {k}"
            )));
        }
        if k > train.n_samples() {
            return Err(Error::Config(format!(
                "k = {k} exceeds the {} training samples",
                train.n_samples()
            )));
        }
        Ok(Self { train, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Classify one row by majority vote among the `k` nearest training samples
/// under Euclidean distance. Distance ties are resolved toward the lower
/// training index.
pub fn knn_predict<S: Scalar>(model: &KnnModel<S>, row: &[S]) -> Result<Label> {
    let train = &model.train;
    let labels = train.require_labels()?;
    if row.len() != train.n_genes() {
        return Err(Error::Dimension {
            what: "nearest-neighbour input",
            expected: train.n_genes(),
            found: row.len(),
        });
    }
    // Squared distances rank identically to distances and tie exactly when
    // they do.
    let mut by_distance: Vec<(f64, usize)> = (0..train.n_samples())
        .map(|i| {
            let d2 = train
                .row(i)
                .iter()
                .zip(row)
                .map(|(&a, &b)| {
                    let d = a.as_f64() - b.as_f64();
                    d * d
                })
                .sum::<f64>();
            (d2, i)
        })
        .collect();
    by_distance
        .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distance").then(a.1.cmp(&b.1)));
    let tumor_votes = by_distance[..model.k]
        .iter()
        .filter(|&&(_, i)| labels[i] == Label::Tumor)
        .count();
    Ok(if tumor_votes * 2 > model.k {
        Label::Tumor
    } else {
        Label::Normal
    })
}

pub fn knn_predict_batch<S: Scalar>(
    model: &KnnModel<S>,
    test: &ExpressionDataset<S>,
) -> Result<Vec<Label>> {
    (0..test.n_samples())
        .map(|i| knn_predict(model, test.row(i)))
        .collect()
}

/// Indices of the `count` genes with the largest absolute class-mean
/// separation, ordered by decreasing separation (ties toward the lower
/// gene index).
pub fn top_separating_genes<S: Scalar>(
    ds: &ExpressionDataset<S>,
    count: usize,
) -> Result<Vec<usize>> {
    if count == 0 || count > ds.n_genes() {
        return Err(Error::Config(format!(
            "gene count must lie in 1..={}, got {count}",
            ds.n_genes()
        )));
    }
    let model = gnb_fit(ds)?; // reuses the per-class means
    let mut scored: Vec<(f64, usize)> = (0..ds.n_genes())
        .map(|j| ((model.means[0][j] - model.means[1][j]).abs(), j))
        .collect();
    scored
        .sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite separation").then(a.1.cmp(&b.1)));
    Ok(scored[..count].iter().map(|&(_, j)| j).collect())
}
