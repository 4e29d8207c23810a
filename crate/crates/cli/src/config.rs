//! Config-file handling: TOML with `[ga]`, `[mlp]`, and `[pipeline]`
//! sections. Every key is optional and defaults to the corresponding module
//! default, so a config file only needs to name what it changes.

use std::path::Path;

use anyhow::{Context, Result};
use evofs::{BiasMode, PipelineConfig};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    ga: GaSection,
    #[serde(default)]
    mlp: MlpSection,
    #[serde(default)]
    pipeline: PipelineSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaSection {
    population_size: Option<usize>,
    generations: Option<usize>,
    init_one_prob: Option<f64>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    tournament_size: Option<usize>,
    elite_count: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MlpSection {
    learning_rate: Option<f64>,
    max_epochs: Option<usize>,
    error_goal: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PipelineSection {
    hidden_min: Option<usize>,
    hidden_max: Option<usize>,
    fitness_hidden: Option<usize>,
    inner_folds: Option<usize>,
    parsimony_weight: Option<f64>,
    eval_runs: Option<usize>,
    train_fraction: Option<f64>,
    bias_mode: Option<String>,
    knn_k: Option<usize>,
    seed: Option<u64>,
}

/// Module defaults overlaid with whatever the config file sets.
pub fn load(path: Option<&Path>) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let Some(path) = path else {
        return Ok(cfg);
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let file: ConfigFile = toml::from_str(&text)
        .with_context(|| format!("parsing config file {}", path.display()))?;

    macro_rules! overlay {
        ($target:expr, $value:expr) => {
            if let Some(v) = $value {
                $target = v;
            }
        };
    }
    overlay!(cfg.ga.population_size, file.ga.population_size);
    overlay!(cfg.ga.generations, file.ga.generations);
    overlay!(cfg.ga.init_one_prob, file.ga.init_one_prob);
    overlay!(cfg.ga.crossover_rate, file.ga.crossover_rate);
    if file.ga.mutation_rate.is_some() {
        cfg.ga.mutation_rate = file.ga.mutation_rate;
    }
    overlay!(cfg.ga.tournament_size, file.ga.tournament_size);
    overlay!(cfg.ga.elite_count, file.ga.elite_count);

    overlay!(cfg.mlp_train.learning_rate, file.mlp.learning_rate);
    overlay!(cfg.mlp_train.max_epochs, file.mlp.max_epochs);
    overlay!(cfg.mlp_train.error_goal, file.mlp.error_goal);

    overlay!(cfg.hidden_min, file.pipeline.hidden_min);
    overlay!(cfg.hidden_max, file.pipeline.hidden_max);
    overlay!(cfg.fitness_hidden, file.pipeline.fitness_hidden);
    overlay!(cfg.inner_folds, file.pipeline.inner_folds);
    overlay!(cfg.parsimony_weight, file.pipeline.parsimony_weight);
    overlay!(cfg.eval_runs, file.pipeline.eval_runs);
    overlay!(cfg.train_fraction, file.pipeline.train_fraction);
    overlay!(cfg.knn_k, file.pipeline.knn_k);
    overlay!(cfg.seed, file.pipeline.seed);
    if let Some(mode) = &file.pipeline.bias_mode {
        cfg.bias_mode = mode
            .parse::<BiasMode>()
            .with_context(|| format!("config key pipeline.bias_mode = {mode:?}"))?;
    }
    Ok(cfg)
}
