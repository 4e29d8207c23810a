//! Three-layer perceptron: logistic activations on the hidden and output
//! layers, trained per-sample by stochastic gradient descent on the summed
//! squared error `E = 1/2 * sum((target - output)^2)`.
//!
//! The classifier convention is two output nodes, index 0 for Tumor and
//! index 1 for Normal, with one-hot targets.

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{ExpressionDataset, Label};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Layer sizes for a three-layer network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpLayout {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
}

impl MlpLayout {
    pub fn new(n_inputs: usize, n_hidden: usize, n_outputs: usize) -> Result<Self> {
        if n_inputs == 0 || n_hidden == 0 || n_outputs == 0 {
            return Err(Error::Config(format!(
                "all layer sizes must be positive, got {n_inputs}x{n_hidden}x{n_outputs}"
            )));
        }
        Ok(Self {
            n_inputs,
            n_hidden,
            n_outputs,
        })
    }

    /// Two-output classifier layout (Tumor node 0, Normal node 1).
    pub fn classifier(n_inputs: usize, n_hidden: usize) -> Result<Self> {
        Self::new(n_inputs, n_hidden, 2)
    }
}

/// Weights and biases. `w1` is hidden-by-inputs row-major, `w2` is
/// outputs-by-hidden row-major. Serializes as a versioned document so
/// snapshots stay readable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MlpModel<S: Scalar> {
    #[serde(default = "model_schema")]
    pub schema: u32,
    pub layout: MlpLayout,
    pub w1: Vec<S>,
    pub b1: Vec<S>,
    pub w2: Vec<S>,
    pub b2: Vec<S>,
}

fn model_schema() -> u32 {
    1
}

/// Gradients of the per-sample error with respect to every parameter, in the
/// same shapes as [`MlpModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients<S: Scalar> {
    pub w1: Vec<S>,
    pub b1: Vec<S>,
    pub w2: Vec<S>,
    pub b2: Vec<S>,
}

impl<S: Scalar> MlpGradients<S> {
    /// Flatten in canonical parameter order: w1, b1, w2, b2.
    pub fn flatten(&self) -> Vec<S> {
        let mut out =
            Vec::with_capacity(self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len());
        out.extend_from_slice(&self.w1);
        out.extend_from_slice(&self.b1);
        out.extend_from_slice(&self.w2);
        out.extend_from_slice(&self.b2);
        out
    }
}

/// Training hyperparameters for per-sample gradient descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Step size for every update.
    pub learning_rate: f64,
    /// Hard cap on training epochs.
    pub max_epochs: usize,
    /// Stop once an epoch's mean per-sample error drops to this level.
    pub error_goal: f64,
    /// Seed for the per-epoch presentation order.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_epochs: 60,
            error_goal: 0.01,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("max_epochs must be at least 1".into()));
        }
        if !(self.error_goal >= 0.0) {
            return Err(Error::Config(format!(
                "error_goal must be non-negative, got {}",
                self.error_goal
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// What happened during training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    /// Epochs actually run (`epoch_errors.len()`).
    pub epochs_run: usize,
    /// Mean per-sample error of each epoch, in order.
    pub epoch_errors: Vec<f64>,
    /// Whether the error goal was reached before the epoch cap.
    pub reached_goal: bool,
}

/// Initialize weights uniformly in `[-1/sqrt(fan_in), +1/sqrt(fan_in)]` and
/// biases to zero. Deterministic in `seed`; weights are drawn in parameter
/// order (w1 row-major, then w2 row-major).
pub fn init_model<S: Scalar>(layout: MlpLayout, seed: u64) -> MlpModel<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |count: usize, fan_in: usize| -> Vec<S> {
        let bound = S::cast(1.0 / (fan_in as f64).sqrt());
        let dist = Uniform::new_inclusive(-bound, bound);
        (0..count).map(|_| dist.sample(&mut rng)).collect()
    };
    let w1 = draw(layout.n_hidden * layout.n_inputs, layout.n_inputs);
    let w2 = draw(layout.n_outputs * layout.n_hidden, layout.n_hidden);
    MlpModel {
        schema: model_schema(),
        layout,
        w1,
        b1: vec![S::zero(); layout.n_hidden],
        w2,
        b2: vec![S::zero(); layout.n_outputs],
    }
}

fn sigmoid<S: Scalar>(x: S) -> S {
    S::one() / (S::one() + (-x).exp())
}

impl<S: Scalar> MlpModel<S> {
    fn check_input(&self, input: &[S]) -> Result<()> {
        if input.len() != self.layout.n_inputs {
            return Err(Error::Dimension {
                what: "network input",
                expected: self.layout.n_inputs,
                found: input.len(),
            });
        }
        Ok(())
    }

    fn forward_buffers(&self, input: &[S], hidden: &mut [S], outputs: &mut [S]) {
        let (ni, nh) = (self.layout.n_inputs, self.layout.n_hidden);
        for j in 0..nh {
            let mut acc = self.b1[j];
            let row = &self.w1[j * ni..(j + 1) * ni];
            for (w, x) in row.iter().zip(input) {
                acc += *w * *x;
            }
            hidden[j] = sigmoid(acc);
        }
        for k in 0..self.layout.n_outputs {
            let mut acc = self.b2[k];
            let row = &self.w2[k * nh..(k + 1) * nh];
            for (w, h) in row.iter().zip(hidden.iter()) {
                acc += *w * *h;
            }
            outputs[k] = sigmoid(acc);
        }
    }

    /// Backpropagated error terms for one sample: `delta_out[k]` is dE/dnet
    /// at output k, `delta_hidden[j]` likewise at hidden j. Both training
    /// updates and explicit gradients are built from these.
    fn deltas(
        &self,
        hidden: &[S],
        outputs: &[S],
        target: &[S],
        delta_out: &mut [S],
        delta_hidden: &mut [S],
    ) {
        let one = S::one();
        let nh = self.layout.n_hidden;
        for k in 0..self.layout.n_outputs {
            // dE/do = (o - t); dσ/dnet = o(1 - o)
            delta_out[k] = (outputs[k] - target[k]) * outputs[k] * (one - outputs[k]);
        }
        for j in 0..nh {
            let mut acc = S::zero();
            for k in 0..self.layout.n_outputs {
                acc += self.w2[k * nh + j] * delta_out[k];
            }
            delta_hidden[j] = acc * hidden[j] * (one - hidden[j]);
        }
    }

    fn parameter_slices(&self) -> [&[S]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    /// Total number of trainable parameters.
    pub fn parameter_count(&self) -> usize {
        self.parameter_slices().iter().map(|s| s.len()).sum()
    }

    /// Read a parameter by flat index (canonical order w1, b1, w2, b2).
    pub fn get_parameter(&self, mut idx: usize) -> S {
        for slice in self.parameter_slices() {
            if idx < slice.len() {
                return slice[idx];
            }
            idx -= slice.len();
        }
        panic!("parameter index out of range");
    }

    /// Write a parameter by flat index (canonical order w1, b1, w2, b2).
    pub fn set_parameter(&mut self, mut idx: usize, value: S) {
        for slice in [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2] {
            if idx < slice.len() {
                slice[idx] = value;
                return;
            }
            idx -= slice.len();
        }
        panic!("parameter index out of range");
    }
}

/// Activations for one input row: `(hidden, outputs)`.
pub fn forward<S: Scalar>(model: &MlpModel<S>, input: &[S]) -> Result<(Vec<S>, Vec<S>)> {
    model.check_input(input)?;
    let mut hidden = vec![S::zero(); model.layout.n_hidden];
    let mut outputs = vec![S::zero(); model.layout.n_outputs];
    model.forward_buffers(input, &mut hidden, &mut outputs);
    Ok((hidden, outputs))
}

/// Per-sample error `E = 1/2 * sum((target - output)^2)`.
pub fn sample_error<S: Scalar>(outputs: &[S], target: &[S]) -> S {
    assert_eq!(outputs.len(), target.len(), "output/target length mismatch");
    let half = S::cast(0.5);
    let mut acc = S::zero();
    for (&o, &t) in outputs.iter().zip(target) {
        let d = t - o;
        acc += d * d;
    }
    half * acc
}

/// Mean per-sample error of the model over a labeled dataset.
pub fn mean_squared_error<S: Scalar>(
    model: &MlpModel<S>,
    ds: &ExpressionDataset<S>,
) -> Result<f64> {
    let labels = ds.require_labels()?;
    if ds.n_samples() == 0 {
        return Err(Error::EmptyInput("no samples to score".into()));
    }
    let mut acc = 0.0f64;
    for i in 0..ds.n_samples() {
        let (_, outputs) = forward(model, ds.row(i))?;
        acc += sample_error(&outputs, &one_hot::<S>(labels[i])).as_f64();
    }
    Ok(acc / ds.n_samples() as f64)
}

/// Exact gradients of the per-sample error for one (input, target) pair.
/// This is the reference path checked against finite differences; the
/// training loop applies the same deltas in place.
pub fn loss_gradients<S: Scalar>(
    model: &MlpModel<S>,
    input: &[S],
    target: &[S],
) -> Result<MlpGradients<S>> {
    model.check_input(input)?;
    if target.len() != model.layout.n_outputs {
        return Err(Error::Dimension {
            what: "target vector",
            expected: model.layout.n_outputs,
            found: target.len(),
        });
    }
    let (ni, nh, no) = (
        model.layout.n_inputs,
        model.layout.n_hidden,
        model.layout.n_outputs,
    );
    let mut hidden = vec![S::zero(); nh];
    let mut outputs = vec![S::zero(); no];
    model.forward_buffers(input, &mut hidden, &mut outputs);
    let mut delta_out = vec![S::zero(); no];
    let mut delta_hidden = vec![S::zero(); nh];
    model.deltas(&hidden, &outputs, target, &mut delta_out, &mut delta_hidden);

    let mut g = MlpGradients {
        w1: vec![S::zero(); nh * ni],
        b1: delta_hidden.clone(),
        w2: vec![S::zero(); no * nh],
        b2: delta_out.clone(),
    };
    for j in 0..nh {
        for i in 0..ni {
            g.w1[j * ni + i] = delta_hidden[j] * input[i];
        }
    }
    for k in 0..no {
        for j in 0..nh {
            g.w2[k * nh + j] = delta_out[k] * hidden[j];
        }
    }
    Ok(g)
}

/// One-hot target for a label: Tumor is node 0, Normal is node 1.
pub fn one_hot<S: Scalar>(label: Label) -> [S; 2] {
    match label {
        Label::Tumor => [S::one(), S::zero()],
        Label::Normal => [S::zero(), S::one()],
    }
}

/// Argmax over the two output nodes; an exact tie goes to Tumor.
pub fn label_from_outputs<S: Scalar>(outputs: &[S]) -> Label {
    assert_eq!(outputs.len(), 2, "classifier networks have two outputs");
    if outputs[0] >= outputs[1] {
        Label::Tumor
    } else {
        Label::Normal
    }
}

/// Train in place by per-sample gradient descent. Samples are reshuffled
/// every epoch (deterministically in `cfg.seed`); training stops when an
/// epoch's mean error reaches `cfg.error_goal` or after `cfg.max_epochs`.
pub fn train<S: Scalar>(
    model: &mut MlpModel<S>,
    ds: &ExpressionDataset<S>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if !ds.is_scaled() {
        return Err(Error::State(
            "training data must be scaled to the network input range first".into(),
        ));
    }
    let labels = ds.require_labels()?.to_vec();
    if ds.n_samples() == 0 {
        return Err(Error::EmptyInput("no training samples".into()));
    }
    if ds.n_genes() != model.layout.n_inputs {
        return Err(Error::Dimension {
            what: "training features",
            expected: model.layout.n_inputs,
            found: ds.n_genes(),
        });
    }
    if model.layout.n_outputs != 2 {
        return Err(Error::Config(format!(
            "label training requires a two-output layout, got {}",
            model.layout.n_outputs
        )));
    }

    let (ni, nh, no) = (
        model.layout.n_inputs,
        model.layout.n_hidden,
        model.layout.n_outputs,
    );
    let lr = S::cast(cfg.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..ds.n_samples()).collect();
    let mut hidden = vec![S::zero(); nh];
    let mut outputs = vec![S::zero(); no];
    let mut delta_out = vec![S::zero(); no];
    let mut delta_hidden = vec![S::zero(); nh];

    let mut epoch_errors = Vec::new();
    let mut reached_goal = false;
    for _ in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut error_sum = 0.0f64;
        for &s in &order {
            let input = ds.row(s);
            let target = one_hot::<S>(labels[s]);
            model.forward_buffers(input, &mut hidden, &mut outputs);
            error_sum += sample_error(&outputs, &target).as_f64();
            model.deltas(&hidden, &outputs, &target, &mut delta_out, &mut delta_hidden);
            for k in 0..no {
                let step = lr * delta_out[k];
                let row = &mut model.w2[k * nh..(k + 1) * nh];
                for (w, h) in row.iter_mut().zip(hidden.iter()) {
                    *w -= step * *h;
                }
                model.b2[k] -= step;
            }
            for j in 0..nh {
                let step = lr * delta_hidden[j];
                let row = &mut model.w1[j * ni..(j + 1) * ni];
                for (w, x) in row.iter_mut().zip(input) {
                    *w -= step * *x;
                }
                model.b1[j] -= step;
            }
        }
        let mean = error_sum / ds.n_samples() as f64;
        epoch_errors.push(mean);
        if mean <= cfg.error_goal {
            reached_goal = true;
            break;
        }
    }
    Ok(TrainOutcome {
        epochs_run: epoch_errors.len(),
        epoch_errors,
        reached_goal,
    })
}

/// Predicted label for one input row.
pub fn predict<S: Scalar>(model: &MlpModel<S>, input: &[S]) -> Result<Label> {
    let (_, outputs) = forward(model, input)?;
    Ok(label_from_outputs(&outputs))
}

/// Predicted labels for every sample in a dataset.
pub fn predict_batch<S: Scalar>(
    model: &MlpModel<S>,
    ds: &ExpressionDataset<S>,
) -> Result<Vec<Label>> {
    (0..ds.n_samples())
        .map(|i| predict(model, ds.row(i)))
        .collect()
}
