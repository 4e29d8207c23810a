//! Wrapper feature selection and the evaluation protocol.
//!
//! The genetic algorithm searches over gene masks; each mask is scored by
//! training a small MLP under stratified inner cross-validation and
//! subtracting a parsimony penalty. Evaluation repeats a stratified 90/10
//! holdout `eval_runs` times in one of two bias modes:
//!
//! * **full-data-selection** — one mask is selected on the complete dataset
//!   and reused by every run. Test samples influence the mask, so scores are
//!   optimistically biased; the mode exists to replicate protocols that
//!   select features globally before evaluation.
//! * **nested-selection** — every run re-selects its mask, re-tunes the
//!   hidden width, and re-fits scaling parameters on its training partition
//!   alone, giving an unbiased estimate.
//!
//! All randomness descends from one master seed through labeled
//! derivations (see the `*_seed` helpers), so any individual run can be
//! reconstructed in isolation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    gnb_fit, gnb_predict_batch, knn_predict_batch, top_separating_genes, KnnModel,
};
use crate::dataset::{stratified_holdout_indices, ExpressionDataset};
use crate::error::{Error, Result};
use crate::ga::{evolve, GaConfig, GaTrace};
use crate::mask::FeatureMask;
use crate::metrics::{accuracy, aggregate, confusion, Aggregate};
use crate::mlp::{init_model, predict_batch, train, MlpLayout, TrainConfig};
use crate::report::{
    reference_rows, EvaluationReport, ModeReport, RunRecord, SelectionSummary, REPORT_SCHEMA,
};
use crate::scalar::Scalar;
use crate::seed::derive_seed;

/// Whether feature selection sees the full dataset or only each run's
/// training partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BiasMode {
    #[serde(rename = "full-data-selection")]
    FullDataSelection,
    #[serde(rename = "nested-selection")]
    NestedSelection,
}

impl fmt::Display for BiasMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiasMode::FullDataSelection => "full-data-selection",
            BiasMode::NestedSelection => "nested-selection",
        })
    }
}

impl FromStr for BiasMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full-data-selection" => Ok(BiasMode::FullDataSelection),
            "nested" | "nested-selection" => Ok(BiasMode::NestedSelection),
            other => Err(Error::Config(format!(
                "unknown bias mode {other:?}; expected full or nested"
            ))),
        }
    }
}

/// Every protocol knob in one place. `ga.chromosome_length` and the various
/// seeds are resolved from the dataset and the master `seed` at use time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ga: GaConfig,
    pub mlp_train: TrainConfig,
    /// Hidden-width sweep bounds, inclusive.
    pub hidden_min: usize,
    pub hidden_max: usize,
    /// Fixed hidden width used inside the GA fitness (sweeping there would
    /// multiply the search cost by the sweep length).
    pub fitness_hidden: usize,
    pub inner_folds: usize,
    /// Weight λ of the feature-count penalty λ·popcount/n_genes. The default
    /// is small enough that one correctly classified sample always outweighs
    /// any popcount difference, making the penalty a pure tie-breaker.
    pub parsimony_weight: f64,
    pub eval_runs: usize,
    pub train_fraction: f64,
    pub bias_mode: BiasMode,
    /// Neighbours for the kNN baseline; odd.
    pub knn_k: usize,
    /// Master seed every other seed is derived from.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            ga: GaConfig::new(0),
            mlp_train: TrainConfig::default(),
            hidden_min: 3,
            hidden_max: 15,
            fitness_hidden: 8,
            inner_folds: 3,
            parsimony_weight: 0.01,
            eval_runs: 20,
            train_fraction: 0.9,
            bias_mode: BiasMode::FullDataSelection,
            knn_k: 3,
            seed: 42,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.mlp_train.validate()?;
        if self.hidden_min == 0 || self.hidden_max < self.hidden_min {
            return Err(Error::Config(format!(
                "hidden sweep must satisfy 1 <= min <= max, got {}..={}",
                self.hidden_min, self.hidden_max
            )));
        }
        if self.fitness_hidden == 0 {
            return Err(Error::Config("fitness_hidden must be positive".into()));
        }
        if self.inner_folds < 2 {
            return Err(Error::Config(format!(
                "inner_folds must be at least 2, got {}",
                self.inner_folds
            )));
        }
        if !(self.parsimony_weight >= 0.0 && self.parsimony_weight.is_finite()) {
            return Err(Error::Config(format!(
                "parsimony_weight must be finite and non-negative, got {}",
                self.parsimony_weight
            )));
        }
        if self.eval_runs == 0 {
            return Err(Error::Config("eval_runs must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.knn_k == 0 || self.knn_k % 2 == 0 {
            return Err(Error::Config(format!(
                "knn_k must be odd and positive, got {}",
                self.knn_k
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_bias_mode(mut self, mode: BiasMode) -> Self {
        self.bias_mode = mode;
        self
    }

    pub fn with_eval_runs(mut self, runs: usize) -> Self {
        self.eval_runs = runs;
        self
    }

    pub fn with_parsimony_weight(mut self, weight: f64) -> Self {
        self.parsimony_weight = weight;
        self
    }

    pub fn with_hidden_sweep(mut self, min: usize, max: usize) -> Self {
        self.hidden_min = min;
        self.hidden_max = max;
        self
    }

    pub fn with_ga(mut self, ga: GaConfig) -> Self {
        self.ga = ga;
        self
    }

    pub fn with_mlp_train(mut self, mlp_train: TrainConfig) -> Self {
        self.mlp_train = mlp_train;
        self
    }
}

/// Outcome of one selection pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub mask: FeatureMask,
    /// Gene ids at the mask's 1-bits, in gene order.
    pub selected_gene_ids: Vec<String>,
    pub fitness: f64,
    pub trace: GaTrace,
    /// Distinct masks evaluated.
    pub evaluations: usize,
    /// The configuration actually used, with the GA geometry resolved.
    pub config: PipelineConfig,
}

// ---------------------------------------------------------------------------
// Seed derivations
//
// Documented and public so any run of the protocol can be reconstructed
// from the master seed alone (the leakage probe depends on this).
// ---------------------------------------------------------------------------

/// Seed of evaluation run `run` (1-based): `derive_seed(master, "run", [run])`.
pub fn run_seed(master: u64, run: usize) -> u64 {
    derive_seed(master, "run", &[run as u64])
}

/// Seed of a run's 90/10 holdout shuffle: `derive_seed(run_seed, "holdout", [])`.
pub fn holdout_seed(run_seed: u64) -> u64 {
    derive_seed(run_seed, "holdout", &[])
}

/// Selection seed in full-data-selection mode (one selection pass per
/// evaluation): `derive_seed(master, "selection", [])`.
pub fn selection_seed_full(master: u64) -> u64 {
    derive_seed(master, "selection", &[])
}

/// Selection seed of one nested-selection run:
/// `derive_seed(run_seed, "selection", [])`.
pub fn selection_seed_nested(run_seed: u64) -> u64 {
    derive_seed(run_seed, "selection", &[])
}

/// Mean stratified inner-CV accuracy of an MLP on the masked genes, minus
/// the parsimony penalty λ·popcount/n_genes. Always in [−λ, 1]. Fold
/// assignment depends only on (labels, cfg.seed) — never on the mask — so
/// every candidate mask is scored against the same partitions.
pub fn wrapper_fitness<S: Scalar>(
    mask: &FeatureMask,
    ds: &ExpressionDataset<S>,
    cfg: &PipelineConfig,
) -> Result<f64> {
    if !ds.is_scaled() {
        return Err(Error::State(
            "wrapper fitness needs scaled data; call scale_features first".into(),
        ));
    }
    let masked = ds.apply_mask(mask)?;
    let mask_hash = mask.stable_hash();
    let folds = masked.stratified_kfold(cfg.inner_folds, derive_seed(cfg.seed, "inner-folds", &[]))?;
    let mut acc_sum = 0.0;
    for fold in 0..folds.k() {
        let (fold_train, fold_test) = folds.split(&masked, fold)?;
        let layout = MlpLayout::classifier(masked.n_genes(), cfg.fitness_hidden)?;
        let mut model = init_model::<S>(
            layout,
            derive_seed(cfg.seed, "fitness-mlp-init", &[mask_hash, fold as u64]),
        );
        let tcfg = cfg
            .mlp_train
            .clone()
            .with_seed(derive_seed(cfg.seed, "fitness-mlp-shuffle", &[mask_hash, fold as u64]));
        train(&mut model, &fold_train, &tcfg)?;
        let predictions = predict_batch(&model, &fold_test)?;
        let cm = confusion(&predictions, fold_test.require_labels()?)?;
        acc_sum += accuracy(&cm)?;
    }
    let mean_accuracy = acc_sum / folds.k() as f64;
    Ok(mean_accuracy - cfg.parsimony_weight * mask.popcount() as f64 / ds.n_genes() as f64)
}

/// Evolve a gene mask against [`wrapper_fitness`] on `ds`. In
/// nested-selection protocols the caller passes only training data here.
pub fn run_selection<S: Scalar>(
    ds: &ExpressionDataset<S>,
    cfg: &PipelineConfig,
) -> Result<SelectionResult> {
    cfg.validate()?;
    if !ds.is_scaled() {
        return Err(Error::State(
            "selection needs scaled data; call scale_features first".into(),
        ));
    }
    ds.require_labels()?;

    let mut resolved = cfg.clone();
    resolved.ga.chromosome_length = ds.n_genes();
    resolved.ga.seed = derive_seed(cfg.seed, "ga", &[]);
    let outcome = evolve(&resolved.ga, |mask| wrapper_fitness(mask, ds, cfg))?;
    let selected_gene_ids = outcome
        .best
        .ones()
        .into_iter()
        .map(|j| ds.gene_ids()[j].clone())
        .collect();
    Ok(SelectionResult {
        mask: outcome.best,
        selected_gene_ids,
        fitness: outcome.best_fitness,
        trace: outcome.trace,
        evaluations: outcome.evaluations,
        config: resolved,
    })
}

/// Sweep the hidden width over `hidden_min..=hidden_max` by stratified
/// inner-CV accuracy on the masked training data; ties go to the smallest
/// width.
pub fn tune_hidden<S: Scalar>(
    ds_train: &ExpressionDataset<S>,
    mask: &FeatureMask,
    cfg: &PipelineConfig,
) -> Result<usize> {
    cfg.validate()?;
    if !ds_train.is_scaled() {
        return Err(Error::State(
            "hidden-width tuning needs scaled data; call scale_features first".into(),
        ));
    }
    let masked = ds_train.apply_mask(mask)?;
    let mask_hash = mask.stable_hash();
    let folds = masked.stratified_kfold(cfg.inner_folds, derive_seed(cfg.seed, "tune-folds", &[]))?;
    let mut best = (cfg.hidden_min, -1.0f64);
    for h in cfg.hidden_min..=cfg.hidden_max {
        let mut acc_sum = 0.0;
        for fold in 0..folds.k() {
            let (fold_train, fold_test) = folds.split(&masked, fold)?;
            let mut model = init_model::<S>(
                MlpLayout::classifier(masked.n_genes(), h)?,
                derive_seed(cfg.seed, "tune-mlp-init", &[mask_hash, h as u64, fold as u64]),
            );
            let tcfg = cfg.mlp_train.clone().with_seed(derive_seed(
                cfg.seed,
                "tune-mlp-shuffle",
                &[mask_hash, h as u64, fold as u64],
            ));
            train(&mut model, &fold_train, &tcfg)?;
            let cm = confusion(&predict_batch(&model, &fold_test)?, fold_test.require_labels()?)?;
            acc_sum += accuracy(&cm)?;
        }
        let mean = acc_sum / folds.k() as f64;
        if mean > best.1 {
            best = (h, mean);
        }
    }
    Ok(best.0)
}

/// Run the holdout protocol in the configured bias mode.
pub fn evaluate_protocol<S: Scalar>(
    ds: &ExpressionDataset<S>,
    cfg: &PipelineConfig,
) -> Result<EvaluationReport> {
    evaluate_modes(ds, cfg, &[cfg.bias_mode])
}

/// Run the holdout protocol once per requested mode and assemble one report.
/// Run indices, and therefore holdout partitions, are shared across modes,
/// so mode columns are directly comparable.
pub fn evaluate_modes<S: Scalar>(
    ds: &ExpressionDataset<S>,
    cfg: &PipelineConfig,
    modes: &[BiasMode],
) -> Result<EvaluationReport> {
    cfg.validate()?;
    ds.require_labels()?;
    if modes.is_empty() {
        return Err(Error::Config("no bias modes requested".into()));
    }
    let mut mode_reports = Vec::with_capacity(modes.len());
    for &mode in modes {
        mode_reports.push(evaluate_one_mode(ds, cfg, mode)?);
    }
    let mut snapshot = cfg.clone();
    snapshot.ga.chromosome_length = ds.n_genes();
    Ok(EvaluationReport {
        schema: REPORT_SCHEMA,
        manifest: None,
        config: snapshot,
        modes: mode_reports,
        references: reference_rows(),
    })
}

fn evaluate_one_mode<S: Scalar>(
    ds: &ExpressionDataset<S>,
    cfg: &PipelineConfig,
    mode: BiasMode,
) -> Result<ModeReport> {
    let labels = ds.require_labels()?.to_vec();
    let top_count = ds.n_genes().min(3);

    // Full-data-selection: one scaled view of everything, one mask, and one
    // separation ranking, all reused by every run.
    let full_context = match mode {
        BiasMode::FullDataSelection => {
            let scaled = if ds.is_scaled() {
                ds.clone()
            } else {
                ds.scale_features()?.0
            };
            let sel_cfg = cfg
                .clone()
                .with_bias_mode(mode)
                .with_seed(selection_seed_full(cfg.seed));
            let selection = run_selection(&scaled, &sel_cfg)?;
            let top_mask =
                FeatureMask::from_indices(ds.n_genes(), &top_separating_genes(&scaled, top_count)?)?;
            Some((scaled, selection, top_mask))
        }
        BiasMode::NestedSelection => {
            if ds.is_scaled() {
                return Err(Error::State(
                    "nested-selection needs unscaled data so scaling parameters \
                     can be fitted on each training partition alone"
                        .into(),
                ));
            }
            None
        }
    };

    let mut runs = Vec::with_capacity(cfg.eval_runs);
    for run in 1..=cfg.eval_runs {
        let seed_r = run_seed(cfg.seed, run);
        let (train_idx, test_idx, warnings) =
            stratified_holdout_indices(&labels, cfg.train_fraction, holdout_seed(seed_r))?;

        let (train_s, test_s, selection, top_mask) = match &full_context {
            Some((scaled, selection, top_mask)) => (
                scaled.subset_rows(&train_idx),
                scaled.subset_rows(&test_idx),
                selection.clone(),
                top_mask.clone(),
            ),
            None => {
                let (train_s, params) = ds.subset_rows(&train_idx).scale_features()?;
                let test_s = params.apply_to(&ds.subset_rows(&test_idx), false)?;
                let sel_cfg = cfg
                    .clone()
                    .with_bias_mode(mode)
                    .with_seed(selection_seed_nested(seed_r));
                let selection = run_selection(&train_s, &sel_cfg)?;
                let top_mask = FeatureMask::from_indices(
                    ds.n_genes(),
                    &top_separating_genes(&train_s, top_count)?,
                )?;
                (train_s, test_s, selection, top_mask)
            }
        };

        runs.push(score_run(
            &train_s, &test_s, &selection, &top_mask, cfg, run, seed_r, warnings,
        )?);
    }

    let collect = |f: fn(&RunRecord) -> f64| -> Result<Aggregate> {
        aggregate(&runs.iter().map(f).collect::<Vec<_>>())
    };
    let mlp_accuracy = collect(|r| r.mlp_accuracy)?;
    let gnb_accuracy = collect(|r| r.gnb_accuracy)?;
    let gnb_top_accuracy = collect(|r| r.gnb_top_accuracy)?;
    let knn_accuracy = collect(|r| r.knn_accuracy)?;
    let mean_popcount =
        runs.iter().map(|r| r.mask_popcount as f64).sum::<f64>() / runs.len() as f64;
    Ok(ModeReport {
        bias_mode: mode,
        selection: full_context.map(|(_, sel, _)| SelectionSummary {
            selected_indices: sel.mask.ones(),
            selected_genes: sel.selected_gene_ids.clone(),
            popcount: sel.mask.popcount(),
            fitness: sel.fitness,
            evaluations: sel.evaluations,
        }),
        runs,
        mlp_accuracy,
        gnb_accuracy,
        gnb_top_accuracy,
        knn_accuracy,
        mean_popcount,
        top_gene_count: top_count,
    })
}

/// Tune, train, and score one run's models on its train/test partitions.
#[allow(clippy::too_many_arguments)]
fn score_run<S: Scalar>(
    train_s: &ExpressionDataset<S>,
    test_s: &ExpressionDataset<S>,
    selection: &SelectionResult,
    top_mask: &FeatureMask,
    cfg: &PipelineConfig,
    run: usize,
    seed_r: u64,
    warnings: Vec<String>,
) -> Result<RunRecord> {
    let run_cfg = cfg.clone().with_seed(seed_r);
    let hidden = tune_hidden(train_s, &selection.mask, &run_cfg)?;

    let masked_train = train_s.apply_mask(&selection.mask)?;
    let masked_test = test_s.apply_mask(&selection.mask)?;
    let mut model = init_model::<S>(
        MlpLayout::classifier(masked_train.n_genes(), hidden)?,
        derive_seed(seed_r, "final-init", &[]),
    );
    let tcfg = cfg
        .mlp_train
        .clone()
        .with_seed(derive_seed(seed_r, "final-shuffle", &[]));
    train(&mut model, &masked_train, &tcfg)?;
    let actual = masked_test.require_labels()?;
    let cm = confusion(&predict_batch(&model, &masked_test)?, actual)?;
    let mlp_accuracy = accuracy(&cm)?;

    let gnb = gnb_fit(&masked_train)?;
    let gnb_accuracy = accuracy(&confusion(&gnb_predict_batch(&gnb, &masked_test)?, actual)?)?;

    let top_train = train_s.apply_mask(top_mask)?;
    let top_test = test_s.apply_mask(top_mask)?;
    let gnb_top = gnb_fit(&top_train)?;
    let gnb_top_accuracy =
        accuracy(&confusion(&gnb_predict_batch(&gnb_top, &top_test)?, actual)?)?;

    let knn = KnnModel::new(masked_train, cfg.knn_k)?;
    let knn_accuracy = accuracy(&confusion(&knn_predict_batch(&knn, &masked_test)?, actual)?)?;

    Ok(RunRecord {
        run,
        seed: seed_r,
        hidden,
        mask_popcount: selection.mask.popcount(),
        selected_indices: selection.mask.ones(),
        selected_genes: selection.selected_gene_ids.clone(),
        mlp_accuracy,
        confusion: cm,
        gnb_accuracy,
        gnb_top_accuracy,
        knn_accuracy,
        warnings,
    })
}
