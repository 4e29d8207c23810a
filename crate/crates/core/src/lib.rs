//! Evolutionary feature selection for gene-expression classification.
//!
//! The crate reproduces a microarray classification pipeline: a genetic
//! algorithm searches over gene masks, each mask scored by the inner
//! cross-validated accuracy of a small multilayer perceptron, and the
//! surviving gene subset feeds a final classifier evaluated under a
//! repeated stratified holdout protocol. Gaussian naive Bayes and
//! k-nearest-neighbour baselines run on the same masks and splits so the
//! comparison table is like for like.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below pin the default precision used by the CLI.
//!
//! ```
//! use evofs::{BiasMode, Dataset64, Label, PipelineConfig};
//!
//! let ds = Dataset64::from_rows(vec![
//!     vec![-0.9, 0.2], vec![-0.8, 0.1], vec![-0.7, 0.3],
//!     vec![0.9, 0.2], vec![0.8, 0.1], vec![0.7, 0.3],
//! ])
//! .unwrap()
//! .with_labels(vec![
//!     Label::Tumor, Label::Tumor, Label::Tumor,
//!     Label::Normal, Label::Normal, Label::Normal,
//! ])
//! .unwrap();
//! let (scaled, _params) = ds.scale_features().unwrap();
//! assert!(scaled.is_scaled());
//! assert_eq!(PipelineConfig::default().bias_mode, BiasMode::FullDataSelection);
//! ```

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod ga;
pub mod mask;
pub mod metrics;
pub mod mlp;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod seed;

pub use baselines::{
    gnb_fit, gnb_log_scores, gnb_predict, gnb_predict_batch, knn_predict, knn_predict_batch,
    top_separating_genes, GnbModel, KnnModel,
};
pub use dataset::{
    labels_from_str, load_labels, load_matrix, matrix_from_str, stratified_holdout_indices,
    ExpressionDataset, FoldAssignment, Holdout, Label, LabelConvention, Orientation,
    ScalingParams,
};
pub use error::{Error, Result};
pub use ga::{
    evolve, init_population, mutate, tournament_select, uniform_crossover, GaConfig, GaOutcome,
    GaTrace, TraceRow,
};
pub use mask::FeatureMask;
pub use metrics::{accuracy, aggregate, confusion, format_percent, Aggregate, ConfusionMatrix};
pub use mlp::{
    forward, init_model, loss_gradients, mean_squared_error, one_hot, predict, predict_batch,
    sample_error, train, label_from_outputs, MlpGradients, MlpLayout, MlpModel, TrainConfig,
    TrainOutcome,
};
pub use pipeline::{
    evaluate_modes, evaluate_protocol, holdout_seed, run_seed, run_selection, selection_seed_full,
    selection_seed_nested, tune_hidden, wrapper_fitness, BiasMode, PipelineConfig,
    SelectionResult,
};
pub use report::{
    reference_rows, EvaluationReport, ModeReport, ReferenceRow, RunManifest, RunRecord,
    SelectionSummary, REPORT_SCHEMA,
};
pub use scalar::Scalar;
pub use seed::{derive_seed, sha256_hex};

/// Default-precision dataset.
pub type Dataset64 = ExpressionDataset<f64>;
/// Single-precision dataset.
pub type Dataset32 = ExpressionDataset<f32>;
/// Default-precision scaling parameters.
pub type ScalingParams64 = ScalingParams<f64>;
/// Default-precision network.
pub type MlpModel64 = MlpModel<f64>;
/// Single-precision network.
pub type MlpModel32 = MlpModel<f32>;
/// Default-precision nearest-neighbour model.
pub type KnnModel64 = KnnModel<f64>;
