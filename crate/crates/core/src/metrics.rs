//! Classification metrics: confusion counts, accuracy, run aggregation.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Two-class confusion counts with Tumor as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Tumor predicted as Tumor.
    pub true_positive: usize,
    /// Tumor predicted as Normal.
    pub false_negative: usize,
    /// Normal predicted as Normal.
    pub true_negative: usize,
    /// Normal predicted as Tumor.
    pub false_positive: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_negative + self.true_negative + self.false_positive
    }

    pub fn correct(&self) -> usize {
        self.true_positive + self.true_negative
    }
}

/// Tally a confusion matrix from aligned prediction/truth slices.
pub fn confusion(predicted: &[Label], actual: &[Label]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::Dimension {
            what: "prediction list",
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput("no predictions to score".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        match (a, p) {
            (Label::Tumor, Label::Tumor) => cm.true_positive += 1,
            (Label::Tumor, Label::Normal) => cm.false_negative += 1,
            (Label::Normal, Label::Normal) => cm.true_negative += 1,
            (Label::Normal, Label::Tumor) => cm.false_positive += 1,
        }
    }
    Ok(cm)
}

/// Fraction of correct predictions, `(TP + TN) / (TP + TN + FP + FN)`.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyInput("confusion matrix counts nothing".into()));
    }
    Ok(cm.correct() as f64 / total as f64)
}

/// Summary statistics over repeated runs: mean, population standard
/// deviation, min, max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

/// Aggregate per-run values (population variance, divisor `n`).
pub fn aggregate(values: &[f64]) -> Result<Aggregate> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no values to aggregate".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(Aggregate {
        mean,
        std_dev: var.sqrt(),
        min,
        max,
    })
}

/// Render a fraction as a percentage with exactly two decimals, rounding
/// half up: `0.935483..` becomes `"93.55%"`.
pub fn format_percent(fraction: f64) -> String {
    assert!(fraction.is_finite(), "cannot format a non-finite fraction");
    assert!(fraction >= 0.0, "cannot format a negative fraction");
    // Integer half-up rounding: scale to hundredths of a percent, then
    // floor(x + 0.5).
    let scaled = (fraction * 10000.0 + 0.5).floor() as u64;
    format!("{}.{:02}%", scaled / 100, scaled % 100)
}
