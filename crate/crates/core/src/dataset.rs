//! Gene-expression datasets: loading, validation, scaling, masking, splitting.
//!
//! The matrix is stored samples-by-genes (one row per tissue sample) because
//! classifiers consume sample rows; the public colon file ships genes-by-samples
//! and is transposed on load via [`Orientation`].

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::scalar::Scalar;

/// Two-class tissue label. Tumor is the positive class throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Tumor,
    Normal,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tumor => write!(f, "Tumor"),
            Label::Normal => write!(f, "Normal"),
        }
    }
}

/// How a raw matrix file is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    SamplesByGenes,
    GenesBySamples,
}

/// How a label file encodes classes.
///
/// `Sign`: one integer per line, negative means Tumor, positive means Normal
/// (matches the public colon distribution of 40 Tumor / 22 Normal).
/// `Token`: case-insensitive `tumor` / `normal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelConvention {
    Sign,
    Token,
}

/// Expression matrix with optional per-sample labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionDataset<S: Scalar> {
    values: Vec<S>, // row-major, n_samples x n_genes
    n_samples: usize,
    n_genes: usize,
    gene_ids: Vec<String>,
    labels: Option<Vec<Label>>,
    scaled: bool,
}

/// Per-gene min/max captured by [`ExpressionDataset::scale_features`], so
/// held-out data can be mapped with training-set parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ScalingParams<S: Scalar> {
    pub mins: Vec<S>,
    pub maxs: Vec<S>,
}

/// Result of a stratified holdout split.
#[derive(Debug, Clone)]
pub struct Holdout<S: Scalar> {
    pub train: ExpressionDataset<S>,
    pub test: ExpressionDataset<S>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Stratification warnings (a class with no test samples); reported, not fatal.
    pub warnings: Vec<String>,
}

/// Fold index per sample for stratified k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    fold_of: Vec<usize>,
    k: usize,
}

impl<S: Scalar> ExpressionDataset<S> {
    /// Build a dataset from a row-major value buffer. Gene ids default to
    /// `g0..g{n-1}`; no labels; unscaled.
    pub fn new(values: Vec<S>, n_samples: usize, n_genes: usize) -> Result<Self> {
        if values.len() != n_samples * n_genes {
            return Err(Error::Dimension {
                what: "value buffer",
                expected: n_samples * n_genes,
                found: values.len(),
            });
        }
        for (pos, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Config(format!(
                    "non-finite value at sample {}, gene {}",
                    pos / n_genes.max(1),
                    pos % n_genes.max(1)
                )));
            }
        }
        let gene_ids = (0..n_genes).map(|j| format!("g{j}")).collect();
        Ok(Self {
            values,
            n_samples,
            n_genes,
            gene_ids,
            labels: None,
            scaled: false,
        })
    }

    /// Convenience constructor from per-sample rows.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_samples = rows.len();
        let n_genes = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_genes {
                return Err(Error::Format {
                    row: i + 1,
                    detail: format!("expected {} fields, found {}", n_genes, r.len()),
                });
            }
        }
        Self::new(rows.into_iter().flatten().collect(), n_samples, n_genes)
    }

    pub fn with_gene_ids(mut self, gene_ids: Vec<String>) -> Result<Self> {
        if gene_ids.len() != self.n_genes {
            return Err(Error::Dimension {
                what: "gene ids",
                expected: self.n_genes,
                found: gene_ids.len(),
            });
        }
        self.gene_ids = gene_ids;
        Ok(self)
    }

    /// Attach per-sample labels; errors if the counts disagree.
    pub fn with_labels(mut self, labels: Vec<Label>) -> Result<Self> {
        if labels.len() != self.n_samples {
            return Err(Error::Alignment(format!(
                "{} labels for {} samples",
                labels.len(),
                self.n_samples
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_genes(&self) -> usize {
        self.n_genes
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn require_labels(&self) -> Result<&[Label]> {
        self.labels
            .as_deref()
            .ok_or_else(|| Error::State("dataset has no labels".into()))
    }

    pub fn value(&self, sample: usize, gene: usize) -> S {
        self.values[sample * self.n_genes + gene]
    }

    pub fn row(&self, sample: usize) -> &[S] {
        &self.values[sample * self.n_genes..(sample + 1) * self.n_genes]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn column(&self, gene: usize) -> Vec<S> {
        (0..self.n_samples).map(|i| self.value(i, gene)).collect()
    }

    /// (tumor, normal) sample counts.
    pub fn class_counts(&self) -> Result<(usize, usize)> {
        let labels = self.require_labels()?;
        let tumor = labels.iter().filter(|&&l| l == Label::Tumor).count();
        Ok((tumor, labels.len() - tumor))
    }

    /// New dataset containing the listed sample rows, in the given order.
    pub fn subset_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.n_genes);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|ls| indices.iter().map(|&i| ls[i]).collect());
        Self {
            values,
            n_samples: indices.len(),
            n_genes: self.n_genes,
            gene_ids: self.gene_ids.clone(),
            labels,
            scaled: self.scaled,
        }
    }

    /// Replace the labels wholesale (count must match). Intended for
    /// permutation probes; values are untouched.
    pub fn with_labels_replaced(&self, labels: Vec<Label>) -> Result<Self> {
        self.clone().with_labels(labels)
    }

    /// Mark a dataset whose values are already in the network input range
    /// (for example, hand-built test fixtures) as scaled, without touching
    /// the values.
    pub fn assume_scaled(mut self) -> Self {
        self.scaled = true;
        self
    }

    /// Map each gene column to `[-1, 1]` by its own min/max; constant columns
    /// map to all zeros. Returns the scaled dataset together with the per-gene
    /// parameters so held-out data can be scaled consistently.
    pub fn scale_features(&self) -> Result<(Self, ScalingParams<S>)> {
        if self.scaled {
            return Err(Error::State("dataset already scaled".into()));
        }
        Ok(self.min_max_scaled())
    }

    /// Scaling worker without the already-scaled state check. The pipeline
    /// uses this to derive fresh parameters from a training partition.
    pub(crate) fn min_max_scaled(&self) -> (Self, ScalingParams<S>) {
        let mut mins = vec![S::infinity(); self.n_genes];
        let mut maxs = vec![S::neg_infinity(); self.n_genes];
        for i in 0..self.n_samples {
            let row = self.row(i);
            for (j, &v) in row.iter().enumerate() {
                if v < mins[j] {
                    mins[j] = v;
                }
                if v > maxs[j] {
                    maxs[j] = v;
                }
            }
        }
        let params = ScalingParams { mins, maxs };
        let mut out = self.clone();
        params.rescale_in_place(&mut out.values, self.n_genes, false);
        out.scaled = true;
        (out, params)
    }
}

impl<S: Scalar> ScalingParams<S> {
    /// Scale a dataset with these (training-derived) parameters. Values from
    /// held-out samples may fall outside `[-1, 1]`; pass `clamp` to pin them
    /// to the bounds.
    pub fn apply_to(&self, ds: &ExpressionDataset<S>, clamp: bool) -> Result<ExpressionDataset<S>> {
        if ds.n_genes != self.mins.len() {
            return Err(Error::Dimension {
                what: "scaling parameters",
                expected: ds.n_genes,
                found: self.mins.len(),
            });
        }
        let mut out = ds.clone();
        self.rescale_in_place(&mut out.values, ds.n_genes, clamp);
        out.scaled = true;
        Ok(out)
    }

    fn rescale_in_place(&self, values: &mut [S], n_genes: usize, clamp: bool) {
        let one = S::one();
        let two = S::cast(2.0);
        for (pos, v) in values.iter_mut().enumerate() {
            let j = pos % n_genes;
            let (lo, hi) = (self.mins[j], self.maxs[j]);
            *v = if hi == lo {
                S::zero()
            } else {
                let mut y = two * (*v - lo) / (hi - lo) - one;
                if clamp {
                    y = y.min(one).max(-one);
                }
                y
            };
        }
    }
}

impl<S: Scalar> ExpressionDataset<S> {
    /// Project onto the columns where the mask bit is set, preserving column
    /// order and gene ids.
    pub fn apply_mask(&self, mask: &FeatureMask) -> Result<Self> {
        if mask.len() != self.n_genes {
            return Err(Error::Dimension {
                what: "mask length",
                expected: self.n_genes,
                found: mask.len(),
            });
        }
        if mask.is_all_zero() {
            return Err(Error::DegenerateMask);
        }
        let keep = mask.ones();
        let mut values = Vec::with_capacity(self.n_samples * keep.len());
        for i in 0..self.n_samples {
            let row = self.row(i);
            values.extend(keep.iter().map(|&j| row[j]));
        }
        Ok(Self {
            values,
            n_samples: self.n_samples,
            n_genes: keep.len(),
            gene_ids: keep.iter().map(|&j| self.gene_ids[j].clone()).collect(),
            labels: self.labels.clone(),
            scaled: self.scaled,
        })
    }

    /// Stratified holdout split: per class, `round(train_fraction * count)`
    /// samples go to train and the remainder to test. Deterministic in `seed`.
    pub fn holdout_split(&self, train_fraction: f64, seed: u64) -> Result<Holdout<S>> {
        let labels = self.require_labels()?;
        let (train_indices, test_indices, warnings) =
            stratified_holdout_indices(labels, train_fraction, seed)?;
        Ok(Holdout {
            train: self.subset_rows(&train_indices),
            test: self.subset_rows(&test_indices),
            train_indices,
            test_indices,
            warnings,
        })
    }

    /// Stratified k-fold assignment; deterministic in `seed`.
    pub fn stratified_kfold(&self, k: usize, seed: u64) -> Result<FoldAssignment> {
        let labels = self.require_labels()?;
        if k < 2 {
            return Err(Error::Config(format!("k must be at least 2, got {k}")));
        }
        if k > self.n_samples {
            return Err(Error::Config(format!(
                "k = {k} exceeds the {} available samples",
                self.n_samples
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fold_of = vec![0usize; self.n_samples];
        for class in [Label::Tumor, Label::Normal] {
            let mut members: Vec<usize> = labels
                .iter()
                .enumerate()
                .filter_map(|(i, &l)| (l == class).then_some(i))
                .collect();
            members.shuffle(&mut rng);
            for (pos, idx) in members.into_iter().enumerate() {
                fold_of[idx] = pos % k;
            }
        }
        Ok(FoldAssignment { fold_of, k })
    }
}

/// Index-level stratified holdout. Exposed so callers can reproduce a split
/// (e.g. to permute test labels in a leakage probe).
pub fn stratified_holdout_indices(
    labels: &[Label],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>, Vec<String>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut warnings = Vec::new();
    for class in [Label::Tumor, Label::Normal] {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == class).then_some(i))
            .collect();
        if members.is_empty() {
            return Err(Error::Config(format!(
                "class {class} has no samples; both classes are required"
            )));
        }
        members.shuffle(&mut rng);
        let n_train = ((train_fraction * members.len() as f64).round() as usize).min(members.len());
        if n_train == members.len() {
            warnings.push(format!(
                "StratificationWarning: class {class} has no test samples at fraction {train_fraction}"
            ));
        }
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test, warnings))
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_samples(&self) -> usize {
        self.fold_of.len()
    }

    pub fn fold_of(&self, sample: usize) -> usize {
        self.fold_of[sample]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.fold_of
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }

    /// (train, test) datasets for one fold.
    pub fn split<S: Scalar>(
        &self,
        ds: &ExpressionDataset<S>,
        fold: usize,
    ) -> Result<(ExpressionDataset<S>, ExpressionDataset<S>)> {
        if ds.n_samples() != self.fold_of.len() {
            return Err(Error::Dimension {
                what: "fold assignment",
                expected: ds.n_samples(),
                found: self.fold_of.len(),
            });
        }
        Ok((
            ds.subset_rows(&self.train_indices(fold)),
            ds.subset_rows(&self.test_indices(fold)),
        ))
    }
}

// ---------------------------------------------------------------------------
// Raw matrix and label files
// ---------------------------------------------------------------------------

/// Load a whitespace- or comma-delimited numeric matrix. The delimiter is
/// auto-detected per file (first non-blank line containing a comma selects
/// CSV). In samples-by-genes orientation a fully non-numeric first row is
/// taken as a gene-id header.
pub fn load_matrix<S: Scalar>(
    path: impl AsRef<Path>,
    orientation: Orientation,
) -> Result<ExpressionDataset<S>> {
    let text = std::fs::read_to_string(path)?;
    matrix_from_str(&text, orientation)
}

pub fn matrix_from_str<S: Scalar>(
    text: &str,
    orientation: Orientation,
) -> Result<ExpressionDataset<S>> {
    // (1-based line number, fields)
    let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
    let comma = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .map(|l| l.contains(','))
        .unwrap_or(false);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = if comma {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        rows.push((lineno + 1, fields));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("matrix file has no data".into()));
    }

    let mut gene_ids: Option<Vec<String>> = None;
    if orientation == Orientation::SamplesByGenes {
        let first = &rows[0].1;
        if first.iter().all(|t| t.parse::<S>().is_err()) {
            gene_ids = Some(first.iter().map(|s| s.to_string()).collect());
            rows.remove(0);
            if rows.is_empty() {
                return Err(Error::EmptyInput("matrix file has a header but no data".into()));
            }
        }
    }

    let width = rows[0].1.len();
    let mut parsed: Vec<S> = Vec::with_capacity(rows.len() * width);
    for (lineno, fields) in &rows {
        if fields.len() != width {
            return Err(Error::Format {
                row: *lineno,
                detail: format!("expected {} fields, found {}", width, fields.len()),
            });
        }
        for (f, token) in fields.iter().enumerate() {
            let v: S = token.parse().map_err(|_| Error::Parse {
                line: *lineno,
                field: f + 1,
                detail: format!("not a number: {token:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: *lineno,
                    field: f + 1,
                    detail: format!("non-finite value: {token:?}"),
                });
            }
            parsed.push(v);
        }
    }

    let (n_samples, n_genes, values) = match orientation {
        Orientation::SamplesByGenes => (rows.len(), width, parsed),
        Orientation::GenesBySamples => {
            let (n_genes, n_samples) = (rows.len(), width);
            let mut t = vec![S::zero(); parsed.len()];
            for g in 0..n_genes {
                for s in 0..n_samples {
                    t[s * n_genes + g] = parsed[g * n_samples + s];
                }
            }
            (n_samples, n_genes, t)
        }
    };
    let ds = ExpressionDataset::new(values, n_samples, n_genes)?;
    match gene_ids {
        Some(ids) => ds.with_gene_ids(ids),
        None => Ok(ds),
    }
}

/// Load one label per line under the given convention.
pub fn load_labels(path: impl AsRef<Path>, convention: LabelConvention) -> Result<Vec<Label>> {
    let text = std::fs::read_to_string(path)?;
    labels_from_str(&text, convention)
}

pub fn labels_from_str(text: &str, convention: LabelConvention) -> Result<Vec<Label>> {
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let label = match convention {
            LabelConvention::Sign => {
                let v: i64 = token.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    field: 1,
                    detail: format!("not an integer label: {token:?}"),
                })?;
                match v.signum() {
                    -1 => Label::Tumor,
                    1 => Label::Normal,
                    _ => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            field: 1,
                            detail: "zero is not a valid sign-convention label".into(),
                        })
                    }
                }
            }
            LabelConvention::Token => {
                if token.eq_ignore_ascii_case("tumor") {
                    Label::Tumor
                } else if token.eq_ignore_ascii_case("normal") {
                    Label::Normal
                } else {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        field: 1,
                        detail: format!("unknown label token: {token:?}"),
                    });
                }
            }
        };
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput("label file has no labels".into()));
    }
    Ok(labels)
}

// ---------------------------------------------------------------------------
// Canonical combined format: CSV with header `label,g0,g1,...`
// ---------------------------------------------------------------------------

impl<S: Scalar> ExpressionDataset<S> {
    /// Render as the canonical CSV (`label,g0,...` header, one sample per row).
    pub fn to_canonical_string(&self) -> Result<String> {
        let labels = self.require_labels()?;
        let mut out = String::new();
        out.push_str("label");
        for id in &self.gene_ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for i in 0..self.n_samples {
            out.push_str(&labels[i].to_string());
            for &v in self.row(i) {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_canonical(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_canonical_string()?)?;
        Ok(())
    }

    pub fn load_canonical(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::canonical_from_str(&text)
    }

    pub fn canonical_from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::EmptyInput("canonical file is empty".into()))?;
        let mut header_fields = header.split(',').map(str::trim);
        match header_fields.next() {
            Some(first) if first.eq_ignore_ascii_case("label") => {}
            _ => {
                return Err(Error::Format {
                    row: 1,
                    detail: "canonical header must start with `label`".into(),
                })
            }
        }
        let gene_ids: Vec<String> = header_fields.map(str::to_string).collect();
        let n_genes = gene_ids.len();

        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != n_genes + 1 {
                return Err(Error::Format {
                    row: lineno,
                    detail: format!("expected {} fields, found {}", n_genes + 1, fields.len()),
                });
            }
            let label_token = fields[0];
            let label = if label_token.eq_ignore_ascii_case("tumor") {
                Label::Tumor
            } else if label_token.eq_ignore_ascii_case("normal") {
                Label::Normal
            } else {
                return Err(Error::Parse {
                    line: lineno,
                    field: 1,
                    detail: format!("unknown label token: {label_token:?}"),
                });
            };
            labels.push(label);
            for (f, token) in fields[1..].iter().enumerate() {
                let v: S = token.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    field: f + 2,
                    detail: format!("not a number: {token:?}"),
                })?;
                values.push(v);
            }
        }
        if labels.is_empty() {
            return Err(Error::EmptyInput("canonical file has no samples".into()));
        }
        let n_samples = labels.len();
        ExpressionDataset::new(values, n_samples, n_genes)?
            .with_gene_ids(gene_ids)?
            .with_labels(labels)
    }
}
