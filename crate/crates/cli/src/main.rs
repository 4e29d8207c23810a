//! Command-line front end: ingest raw expression data into the canonical
//! CSV, run gene selection, evaluate the holdout protocol, and re-render
//! saved reports.
//!
//! Every command is deterministic in its inputs and `--seed`; diagnostics
//! and timing go to stderr, data to files and stdout.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use evofs::{
    evaluate_modes, run_selection, selection_seed_full, sha256_hex, BiasMode, Dataset64,
    EvaluationReport, LabelConvention, Orientation, PipelineConfig, RunManifest, SelectionResult,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "evofs",
    version,
    about = "Genetic-algorithm gene selection with an MLP classifier",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw expression matrix + label file into the canonical CSV.
    Ingest(IngestArgs),
    /// Select a gene subset on the full dataset and write the artifacts.
    Select(SelectArgs),
    /// Run the repeated-holdout evaluation protocol and write reports.
    Evaluate(EvaluateArgs),
    /// Re-render a saved JSON report as the comparison table.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    /// One row per sample, one column per gene.
    SamplesByGenes,
    /// One row per gene, one column per sample (transposed on load).
    GenesBySamples,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::SamplesByGenes => Orientation::SamplesByGenes,
            OrientationArg::GenesBySamples => Orientation::GenesBySamples,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// Numeric labels: negative = Tumor, positive = Normal.
    Sign,
    /// Text labels: tumor/normal, case-insensitive.
    Token,
}

impl From<ConventionArg> for LabelConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Sign => LabelConvention::Sign,
            ConventionArg::Token => LabelConvention::Token,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BiasModeArg {
    /// Select once on the full dataset; reuse the mask in every run.
    Full,
    /// Re-select inside every run's training partition.
    Nested,
    /// Evaluate both modes and report them side by side.
    Both,
}

#[derive(Args)]
struct IngestArgs {
    /// Raw expression matrix (whitespace- or comma-delimited).
    #[arg(long)]
    matrix: PathBuf,
    /// Label file, one label per line.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum, default_value = "samples-by-genes")]
    orientation: OrientationArg,
    #[arg(long, value_enum, default_value = "sign")]
    label_convention: ConventionArg,
    /// Canonical CSV to write.
    #[arg(long, default_value = "dataset.csv")]
    out: PathBuf,
}

/// Knobs shared by `select` and `evaluate`.
#[derive(Args)]
struct CommonRunArgs {
    /// Canonical dataset CSV (from `ingest`).
    #[arg(long)]
    data: PathBuf,
    /// TOML config file with [ga], [mlp], and [pipeline] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// GA generations; overrides the config file.
    #[arg(long)]
    generations: Option<usize>,
    /// GA population size; overrides the config file. Tournament size and
    /// elite count are clamped to stay consistent with small populations.
    #[arg(long)]
    population: Option<usize>,
    /// Probability that an initial chromosome bit is set.
    #[arg(long)]
    init_one_prob: Option<f64>,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: CommonRunArgs,
    /// Holdout repetitions; overrides the config file.
    #[arg(long)]
    runs: Option<usize>,
    /// Selection-bias mode; overrides the config file.
    #[arg(long, value_enum)]
    bias_mode: Option<BiasModeArg>,
}

#[derive(Args)]
struct ReportArgs {
    /// Saved report JSON to re-render.
    #[arg(long)]
    json: PathBuf,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<()> {
    let started = Instant::now();
    log_timestamp();
    match Cli::parse().command {
        Command::Ingest(args) => cmd_ingest(args)?,
        Command::Select(args) => cmd_select(args)?,
        Command::Evaluate(args) => cmd_evaluate(args)?,
        Command::Report(args) => cmd_report(args)?,
    }
    eprintln!("done in {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}

/// Wall-clock context goes to stderr only; emitted files stay byte-identical
/// across reruns.
fn log_timestamp() {
    if let Ok(now) = SystemTime::now().duration_since(UNIX_EPOCH) {
        eprintln!("started at unix time {}", now.as_secs());
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let matrix = evofs::load_matrix::<f64>(&args.matrix, args.orientation.into())
        .with_context(|| format!("loading matrix {}", args.matrix.display()))?;
    let labels = evofs::load_labels(&args.labels, args.label_convention.into())
        .with_context(|| format!("loading labels {}", args.labels.display()))?;
    let ds = matrix.with_labels(labels)?;
    ds.write_canonical(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let (tumor, normal) = ds.class_counts()?;
    println!(
        "{} samples, {} genes, {} Tumor / {} Normal",
        ds.n_samples(),
        ds.n_genes(),
        tumor,
        normal
    );
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

/// Resolve config file + CLI overrides into the final pipeline config.
fn resolve_config(common: &CommonRunArgs) -> Result<PipelineConfig> {
    let mut cfg = config::load(common.config.as_deref())?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(generations) = common.generations {
        cfg.ga.generations = generations;
    }
    if let Some(population) = common.population {
        cfg.ga.population_size = population;
        if cfg.ga.tournament_size > population {
            eprintln!(
                "note: clamping tournament_size {} to population {}",
                cfg.ga.tournament_size, population
            );
            cfg.ga.tournament_size = population;
        }
        if cfg.ga.elite_count >= population {
            eprintln!(
                "note: clamping elite_count {} to {}",
                cfg.ga.elite_count,
                population - 1
            );
            cfg.ga.elite_count = population - 1;
        }
    }
    if let Some(p) = common.init_one_prob {
        cfg.ga.init_one_prob = p;
    }
    Ok(cfg)
}

fn manifest_for(common: &CommonRunArgs, cfg: &PipelineConfig) -> Result<RunManifest> {
    let digest_of = |path: &Path| -> Result<String> {
        let bytes =
            std::fs::read(path).with_context(|| format!("digesting {}", path.display()))?;
        Ok(sha256_hex(&bytes))
    };
    Ok(RunManifest {
        master_seed: cfg.seed,
        dataset_path: Some(common.data.display().to_string()),
        dataset_sha256: Some(digest_of(&common.data)?),
        config_path: common.config.as_ref().map(|p| p.display().to_string()),
        config_sha256: common
            .config
            .as_ref()
            .map(|p| digest_of(p))
            .transpose()?,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

/// Selection artifact: schema tag, provenance, then the selection itself.
#[derive(Serialize)]
struct SelectionDoc {
    schema: u32,
    manifest: RunManifest,
    #[serde(flatten)]
    result: SelectionResult,
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let common = &args.common;
    let cfg = resolve_config(common)?;
    let ds = Dataset64::load_canonical(&common.data)
        .with_context(|| format!("loading dataset {}", common.data.display()))?;
    let (scaled, _) = ds.scale_features()?;
    // The same derivation `evaluate` uses in full-data-selection mode, so
    // both commands agree on the mask for a given seed.
    let sel_cfg = cfg.clone().with_seed(selection_seed_full(cfg.seed));
    let result = run_selection(&scaled, &sel_cfg)?;

    println!(
        "selected {} of {} genes (fitness {:.6}, {} fitness evaluations)",
        result.mask.popcount(),
        scaled.n_genes(),
        result.fitness,
        result.evaluations
    );
    for id in &result.selected_gene_ids {
        println!("  {id}");
    }

    let mut genes = result.selected_gene_ids.join("\n");
    genes.push('\n');
    write_file(&common.out_dir, "selected_genes.txt", &genes)?;
    write_file(&common.out_dir, "ga_trace.csv", &result.trace.to_csv())?;
    let doc = SelectionDoc {
        schema: evofs::REPORT_SCHEMA,
        manifest: manifest_for(common, &cfg)?,
        result,
    };
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    write_file(&common.out_dir, "selection.json", &json)?;
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let common = &args.common;
    let mut cfg = resolve_config(common)?;
    if let Some(runs) = args.runs {
        cfg.eval_runs = runs;
    }
    let modes: Vec<BiasMode> = match args.bias_mode {
        Some(BiasModeArg::Full) => vec![BiasMode::FullDataSelection],
        Some(BiasModeArg::Nested) => vec![BiasMode::NestedSelection],
        Some(BiasModeArg::Both) => {
            vec![BiasMode::FullDataSelection, BiasMode::NestedSelection]
        }
        None => vec![cfg.bias_mode],
    };
    if let Some(&first) = modes.first() {
        cfg.bias_mode = first;
    }

    let ds = Dataset64::load_canonical(&common.data)
        .with_context(|| format!("loading dataset {}", common.data.display()))?;
    let mut report = evaluate_modes(&ds, &cfg, &modes)?;
    report.manifest = Some(manifest_for(common, &cfg)?);

    for mode in &report.modes {
        for run in &mode.runs {
            for warning in &run.warnings {
                eprintln!("{} run {}: {warning}", mode.bias_mode, run.run);
            }
        }
    }

    write_file(&common.out_dir, "report.json", &report.to_json()?)?;
    write_file(&common.out_dir, "report.csv", &report.to_csv())?;
    print!("{}", report.render_table());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.json)
        .with_context(|| format!("reading {}", args.json.display()))?;
    let report = EvaluationReport::from_json(&text)?;
    print!("{}", report.render_table());
    Ok(())
}
