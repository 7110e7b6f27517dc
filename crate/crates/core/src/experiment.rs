//! Experiment orchestration: spec files, the memoized chromosome-evaluation
//! service, result persistence, and front/summary export.
//!
//! Output layout per run: `front.csv` (NSGA-II) or `best.csv` (GA/baseline),
//! `history.csv` (per-generation best and mean per objective),
//! `config.resolved` (full echo of the resolved spec) and `meta` (seeds,
//! wall time, cache statistics, dropped-row counts). Everything except the
//! wall time in `meta` is byte-reproducible from (spec, seed).

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::data::{load_dataset, split, DatasetManifest, EncodedDataset, SplitPair};
use crate::error::{Error, Result};
use crate::evolve::{Chromosome, Evaluate, EvolveConfig, Individual};
use crate::metrics::evaluate_all;
use crate::models::{train, ModelKind, TrainConfig};
use crate::nsga2::{run_nsga2 as nsga2_engine, Nsga2Generation, Nsga2Outcome};
use crate::soga::{run_soga as soga_engine, SogaGeneration, SogaResult};

/// One measured feature subset: the mask, holdout metrics, and training
/// accounting. Failed trainings carry worst-case objectives and the `failed`
/// flag; they are excluded from exported fronts.
#[derive(Clone, Debug)]
pub struct EvaluationRecord {
    pub mask: Chromosome,
    pub n_selected: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub spd_signed: f64,
    pub spd_abs: f64,
    pub train_time: Duration,
    pub failed: bool,
}

impl EvaluationRecord {
    /// Metric fields coincide (mask, selection count, and the four metrics);
    /// `train_time` is accounting, not a result.
    pub fn same_result(&self, other: &EvaluationRecord) -> bool {
        self.mask == other.mask
            && self.n_selected == other.n_selected
            && self.accuracy == other.accuracy
            && self.f1 == other.f1
            && self.spd_signed == other.spd_signed
            && self.spd_abs == other.spd_abs
            && self.failed == other.failed
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub entries: usize,
}

/// Memoization table from mask bits to evaluation records. Concurrent misses
/// on the same key block on a per-key cell, so every distinct mask is
/// trained exactly once per run.
pub struct EvalCache {
    enabled: bool,
    map: DashMap<Chromosome, Arc<OnceLock<EvaluationRecord>>>,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl EvalCache {
    pub fn new(enabled: bool) -> Self {
        Self {
            enabled,
            map: DashMap::new(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        }
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            entries: self.map.len(),
        }
    }
}

/// Chromosome evaluation service: trains the configured model on the masked
/// train view and measures it on the masked holdout view, memoizing by mask.
pub struct EvalService {
    split: SplitPair,
    train_config: TrainConfig,
    cache: EvalCache,
    trainings: AtomicUsize,
}

impl EvalService {
    pub fn new(split: SplitPair, train_config: TrainConfig, cache_enabled: bool) -> Self {
        Self {
            split,
            train_config,
            cache: EvalCache::new(cache_enabled),
            trainings: AtomicUsize::new(0),
        }
    }

    pub fn split(&self) -> &SplitPair {
        &self.split
    }

    pub fn train_config(&self) -> &TrainConfig {
        &self.train_config
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cache.stats()
    }

    pub fn trainings(&self) -> usize {
        self.trainings.load(Ordering::Relaxed)
    }

    fn train_record(&self, mask: &Chromosome) -> EvaluationRecord {
        self.trainings.fetch_add(1, Ordering::Relaxed);
        let started = Instant::now();
        let outcome = (|| {
            let train_view = self.split.train.mask(mask)?;
            let holdout_view = self.split.holdout.mask(mask)?;
            let model = train(&self.train_config, &train_view)?;
            evaluate_all(&model, &holdout_view)
        })();
        let train_time = started.elapsed();
        match outcome {
            Ok(metrics) => EvaluationRecord {
                mask: mask.clone(),
                n_selected: mask.count_ones(),
                accuracy: metrics.accuracy,
                f1: metrics.f1,
                spd_signed: metrics.spd_signed,
                spd_abs: metrics.spd_abs,
                train_time,
                failed: false,
            },
            Err(error) => {
                log::warn!("training failed for mask {}: {error}", mask.mask_string());
                EvaluationRecord {
                    mask: mask.clone(),
                    n_selected: mask.count_ones(),
                    accuracy: 0.0,
                    f1: 0.0,
                    spd_signed: 1.0,
                    spd_abs: 1.0,
                    train_time,
                    failed: true,
                }
            }
        }
    }

    /// Memoized evaluation: a hit returns the stored record; a miss trains,
    /// stores and returns.
    pub fn evaluate_mask(&self, mask: &Chromosome) -> EvaluationRecord {
        if !self.cache.enabled {
            return self.train_record(mask);
        }
        let cell = self.cache.map.entry(mask.clone()).or_default().clone();
        let mut fresh = false;
        let record = cell
            .get_or_init(|| {
                fresh = true;
                self.train_record(mask)
            })
            .clone();
        if fresh {
            self.cache.misses.fetch_add(1, Ordering::Relaxed);
        } else {
            self.cache.hits.fetch_add(1, Ordering::Relaxed);
        }
        record
    }

    /// All-features reference evaluation.
    pub fn baseline(&self) -> EvaluationRecord {
        self.evaluate_mask(&Chromosome::ones(self.split.train.n_features()))
    }
}

impl Evaluate for EvalService {
    fn n_features(&self) -> usize {
        self.split.train.n_features()
    }

    fn protected_index(&self) -> usize {
        self.split.train.dataset().protected_index
    }

    fn evaluate(&self, chromosome: &Chromosome) -> EvaluationRecord {
        self.evaluate_mask(chromosome)
    }
}

/// Memoized train-and-measure for one mask.
pub fn evaluate_chromosome(mask: &Chromosome, service: &EvalService) -> EvaluationRecord {
    service.evaluate_mask(mask)
}

/// Evaluate the all-ones mask (every feature selected).
pub fn run_baseline(service: &EvalService) -> EvaluationRecord {
    service.baseline()
}

// ---------------------------------------------------------------------------
// Experiment specification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Soga,
    Nsga2,
    Baseline,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Soga => "soga",
            Mode::Nsga2 => "nsga2",
            Mode::Baseline => "baseline",
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SplitConfig {
    pub seed: u64,
    pub train_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            train_fraction: 0.7,
        }
    }
}

/// Fully resolved experiment description; serialized verbatim into
/// `config.resolved` so every defaulted value is visible.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub mode: Mode,
    pub manifest: PathBuf,
    pub output: PathBuf,
    pub cache: bool,
    pub split: SplitConfig,
    pub model: TrainConfig,
    pub evolve: EvolveConfig,
}

/// CLI-level field overrides applied while loading a spec file.
#[derive(Clone, Debug, Default)]
pub struct SpecOverrides {
    pub seed: Option<u64>,
    pub generations: Option<usize>,
    pub population_size: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    mode: Mode,
    manifest: PathBuf,
    output: Option<PathBuf>,
    cache: Option<bool>,
    split: Option<RawSplit>,
    model: RawModel,
    evolve: Option<RawEvolve>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSplit {
    seed: Option<u64>,
    train_fraction: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    kind: ModelKind,
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    l2_penalty: Option<f64>,
    n_rounds: Option<usize>,
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolve {
    population_size: Option<usize>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    tournament_size: Option<usize>,
    generations: Option<usize>,
    seed: Option<u64>,
    force_protected: Option<bool>,
}

impl ExperimentSpec {
    /// Parse and resolve a spec file. The manifest path resolves relative to
    /// the spec file's directory; the output directory resolves relative to
    /// the invoking directory and defaults to `results/<name>`.
    pub fn load(path: &Path, overrides: &SpecOverrides) -> Result<Self> {
        let content = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read spec {}: {e}", path.display())))?;
        let raw: RawSpec = toml::from_str(&content)
            .map_err(|e| Error::Config(format!("malformed spec {}: {e}", path.display())))?;

        let name = raw.name.unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "experiment".to_string())
        });

        let spec_dir = path.parent().unwrap_or_else(|| Path::new("."));
        let manifest = if raw.manifest.is_relative() {
            spec_dir.join(&raw.manifest)
        } else {
            raw.manifest
        };

        let output = overrides
            .output
            .clone()
            .or(raw.output)
            .unwrap_or_else(|| PathBuf::from("results").join(&name));

        let mut split = SplitConfig::default();
        if let Some(raw_split) = raw.split {
            if let Some(seed) = raw_split.seed {
                split.seed = seed;
            }
            if let Some(fraction) = raw_split.train_fraction {
                split.train_fraction = fraction;
            }
        }
        if !(split.train_fraction > 0.0 && split.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie strictly inside (0, 1), got {}",
                split.train_fraction
            )));
        }

        let mut model = TrainConfig::for_kind(raw.model.kind);
        if let Some(v) = raw.model.learning_rate {
            model.learning_rate = v;
        }
        if let Some(v) = raw.model.epochs {
            model.epochs = v;
        }
        if let Some(v) = raw.model.l2_penalty {
            model.l2_penalty = v;
        }
        if let Some(v) = raw.model.n_rounds {
            model.n_rounds = v;
        }
        if let Some(v) = raw.model.seed {
            model.seed = v;
        }
        model.validate()?;

        let mut evolve = EvolveConfig {
            // protected-feature forcing replicates the single-objective
            // setup; the multiobjective runs leave subsets unconstrained
            force_protected: raw.mode == Mode::Soga,
            ..EvolveConfig::default()
        };
        if let Some(raw_evolve) = raw.evolve {
            if let Some(v) = raw_evolve.population_size {
                evolve.population_size = v;
            }
            if let Some(v) = raw_evolve.crossover_rate {
                evolve.crossover_rate = v;
            }
            if let Some(v) = raw_evolve.mutation_rate {
                evolve.mutation_rate = v;
            }
            if let Some(v) = raw_evolve.tournament_size {
                evolve.tournament_size = v;
            }
            if let Some(v) = raw_evolve.generations {
                evolve.generations = v;
            }
            if let Some(v) = raw_evolve.seed {
                evolve.seed = v;
            }
            if let Some(v) = raw_evolve.force_protected {
                evolve.force_protected = v;
            }
        }
        if let Some(seed) = overrides.seed {
            evolve.seed = seed;
        }
        if let Some(generations) = overrides.generations {
            evolve.generations = generations;
        }
        if let Some(population_size) = overrides.population_size {
            evolve.population_size = population_size;
        }
        evolve.validate()?;

        Ok(ExperimentSpec {
            name,
            mode: raw.mode,
            manifest,
            output,
            cache: raw.cache.unwrap_or(true),
            split,
            model,
            evolve,
        })
    }
}

// ---------------------------------------------------------------------------
// Run products
// ---------------------------------------------------------------------------

/// Run metadata persisted to the `meta` file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunMeta {
    pub name: String,
    pub mode: Mode,
    pub dataset: String,
    pub model: ModelKind,
    pub split_seed: u64,
    pub evolve_seed: u64,
    pub population_size: usize,
    pub generations: usize,
    pub n_rows: usize,
    pub n_features: usize,
    pub dropped_rows: usize,
    pub train_rows: usize,
    pub holdout_rows: usize,
    pub evaluations: usize,
    pub trainings: usize,
    pub cache_hits: usize,
    pub cache_misses: usize,
    pub wall_ms: u64,
    pub front_size: Option<usize>,
}

/// Exported first Pareto front: rank-0 records sorted by |SPD| ascending,
/// failed sentinels excluded, plus run metadata.
#[derive(Clone, Debug)]
pub struct FrontReport {
    pub records: Vec<EvaluationRecord>,
    pub meta: RunMeta,
}

/// Order and deduplicate rank-0 individuals into exportable records.
pub fn front_records(front: &[Individual]) -> Vec<EvaluationRecord> {
    let mut records: Vec<EvaluationRecord> = front
        .iter()
        .filter_map(|ind| ind.record.clone())
        .filter(|r| !r.failed)
        .collect();
    records.sort_by(|a, b| {
        a.spd_abs
            .total_cmp(&b.spd_abs)
            .then(a.f1.total_cmp(&b.f1))
            .then_with(|| a.mask.cmp(&b.mask))
    });
    records.dedup_by(|a, b| a.mask == b.mask);
    records
}

/// What a finished run produced, beyond the files on disk.
#[derive(Debug)]
pub enum RunArtifacts {
    Baseline(EvaluationRecord),
    Soga(SogaResult),
    Nsga2 {
        outcome: Box<Nsga2Outcome>,
        report: FrontReport,
    },
}

#[derive(Debug)]
pub struct RunOutcome {
    pub spec: ExperimentSpec,
    pub meta: RunMeta,
    pub artifacts: RunArtifacts,
}

/// Load the dataset a spec points at and build its evaluation service.
pub fn prepare_service(spec: &ExperimentSpec) -> Result<(Arc<EncodedDataset>, EvalService)> {
    let manifest = DatasetManifest::load(&spec.manifest)?;
    let dataset = Arc::new(load_dataset(&manifest, None)?);
    let pair = split(&dataset, spec.split.seed, spec.split.train_fraction)?;
    let service = EvalService::new(pair, spec.model.clone(), spec.cache);
    Ok((dataset, service))
}

/// Run a spec end to end and persist its outputs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunOutcome> {
    let started = Instant::now();
    let (dataset, service) = prepare_service(spec)?;

    fs::create_dir_all(&spec.output)
        .map_err(|e| Error::Runtime(format!("cannot create {}: {e}", spec.output.display())))?;
    let resolved = toml::to_string_pretty(spec)
        .map_err(|e| Error::Runtime(format!("cannot serialize resolved config: {e}")))?;
    write_text(&spec.output.join("config.resolved"), &resolved)?;

    let mut meta = RunMeta {
        name: spec.name.clone(),
        mode: spec.mode,
        dataset: DatasetManifest::load(&spec.manifest)?.name,
        model: spec.model.kind,
        split_seed: spec.split.seed,
        evolve_seed: spec.evolve.seed,
        population_size: spec.evolve.population_size,
        generations: spec.evolve.generations,
        n_rows: dataset.n_rows(),
        n_features: dataset.n_features(),
        dropped_rows: dataset.dropped_rows,
        train_rows: service.split().train.n_rows(),
        holdout_rows: service.split().holdout.n_rows(),
        evaluations: 0,
        trainings: 0,
        cache_hits: 0,
        cache_misses: 0,
        wall_ms: 0,
        front_size: None,
    };

    enum Stage {
        Baseline(EvaluationRecord),
        Soga(SogaResult),
        Nsga2(Box<Nsga2Outcome>, Vec<EvaluationRecord>),
    }

    let stage = match spec.mode {
        Mode::Baseline => {
            meta.evaluations = 1;
            Stage::Baseline(run_baseline(&service))
        }
        Mode::Soga => {
            let result = soga_engine(&spec.evolve, &service)
                .map_err(|e| Error::Runtime(format!("ga stage failed: {e}")))?;
            meta.evaluations = result.evaluations_used;
            Stage::Soga(result)
        }
        Mode::Nsga2 => {
            let outcome = nsga2_engine(&spec.evolve, &service)
                .map_err(|e| Error::Runtime(format!("nsga2 stage failed: {e}")))?;
            meta.evaluations = outcome.evaluations_used;
            let records = front_records(&outcome.front);
            meta.front_size = Some(records.len());
            Stage::Nsga2(Box::new(outcome), records)
        }
    };

    let stats = service.cache_stats();
    meta.trainings = service.trainings();
    meta.cache_hits = stats.hits;
    meta.cache_misses = stats.misses;
    meta.wall_ms = started.elapsed().as_millis() as u64;
    let meta_text = toml::to_string_pretty(&meta)
        .map_err(|e| Error::Runtime(format!("cannot serialize meta: {e}")))?;
    write_text(&spec.output.join("meta"), &meta_text)?;

    let artifacts = match stage {
        Stage::Baseline(record) => {
            export_records_csv(std::slice::from_ref(&record), &spec.output.join("best.csv"))?;
            RunArtifacts::Baseline(record)
        }
        Stage::Soga(result) => {
            let best = result
                .best
                .record
                .clone()
                .ok_or_else(|| Error::Runtime("ga best individual has no record".into()))?;
            export_records_csv(std::slice::from_ref(&best), &spec.output.join("best.csv"))?;
            write_soga_history(&result.history, &spec.output.join("history.csv"))?;
            RunArtifacts::Soga(result)
        }
        Stage::Nsga2(outcome, records) => {
            let report = FrontReport {
                records,
                meta: meta.clone(),
            };
            export_front_csv(&report, &spec.output.join("front.csv"))?;
            write_nsga2_history(&outcome.history, &spec.output.join("history.csv"))?;
            RunArtifacts::Nsga2 { outcome, report }
        }
    };

    Ok(RunOutcome {
        spec: spec.clone(),
        meta,
        artifacts,
    })
}

/// Run every `*.toml` spec in a directory, in file-name order.
pub fn run_all(dir: &Path, overrides: &SpecOverrides) -> Result<Vec<RunOutcome>> {
    let mut spec_files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Config(format!("cannot read spec directory {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    spec_files.sort();
    if spec_files.is_empty() {
        return Err(Error::Config(format!(
            "no .toml spec files found in {}",
            dir.display()
        )));
    }
    let mut outcomes = Vec::with_capacity(spec_files.len());
    for file in spec_files {
        let mut per_run = overrides.clone();
        // a common --out is a root directory; each run gets a subdirectory
        if let Some(root) = &overrides.output {
            let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned());
            per_run.output = Some(root.join(stem.unwrap_or_else(|| "run".into())));
        }
        let spec = ExperimentSpec::load(&file, &per_run)?;
        log::info!("running {} ({})", spec.name, spec.mode.label());
        outcomes.push(run_experiment(&spec)?);
    }
    Ok(outcomes)
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

pub const RECORD_CSV_HEADER: &str = "mask,n_selected,f1,spd_abs,spd_signed,accuracy";

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)
        .map_err(|e| Error::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Render records as delimited text. Reals use the shortest representation
/// that round-trips exactly, so re-parsing the file reproduces the values
/// bit for bit.
pub fn records_to_csv(records: &[EvaluationRecord]) -> String {
    let mut out = String::from(RECORD_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.mask.mask_string(),
            r.n_selected,
            r.f1,
            r.spd_abs,
            r.spd_signed,
            r.accuracy
        ));
    }
    out
}

pub fn export_records_csv(records: &[EvaluationRecord], path: &Path) -> Result<()> {
    write_text(path, &records_to_csv(records))
}

/// Write a front report: one row per rank-0 member, |SPD| ascending.
pub fn export_front_csv(report: &FrontReport, path: &Path) -> Result<()> {
    if report.records.is_empty() {
        return Err(Error::Runtime("refusing to export an empty front".into()));
    }
    export_records_csv(&report.records, path)
}

/// Parse a `front.csv`/`best.csv` file back into records.
pub fn parse_records_csv(path: &Path) -> Result<Vec<EvaluationRecord>> {
    let content = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = content.lines();
    let header = lines.next().unwrap_or_default();
    if header != RECORD_CSV_HEADER {
        return Err(Error::Data(format!(
            "unexpected header in {}: {header:?}",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: format!("bad real {s:?}"),
            })
        };
        records.push(EvaluationRecord {
            mask: Chromosome::from_mask_str(fields[0])?,
            n_selected: fields[1].parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: format!("bad count {:?}", fields[1]),
            })?,
            f1: parse_f64(fields[2])?,
            spd_abs: parse_f64(fields[3])?,
            spd_signed: parse_f64(fields[4])?,
            accuracy: parse_f64(fields[5])?,
            train_time: Duration::ZERO,
            failed: false,
        });
    }
    Ok(records)
}

fn write_soga_history(history: &[SogaGeneration], path: &Path) -> Result<()> {
    let mut out = String::from("generation,best_spd_abs,mean_spd_abs\n");
    for h in history {
        out.push_str(&format!(
            "{},{},{}\n",
            h.generation, h.best_spd_abs, h.mean_spd_abs
        ));
    }
    write_text(path, &out)
}

fn write_nsga2_history(history: &[Nsga2Generation], path: &Path) -> Result<()> {
    let mut out = String::from("generation,best_f1_loss,mean_f1_loss,best_spd_abs,mean_spd_abs\n");
    for h in history {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            h.generation, h.best_f1_loss, h.mean_f1_loss, h.best_spd_abs, h.mean_spd_abs
        ));
    }
    write_text(path, &out)
}

// ---------------------------------------------------------------------------
// Result summaries
// ---------------------------------------------------------------------------

/// One line of the rendered summary table.
#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub run: String,
    pub dataset: String,
    pub model: String,
    pub mode: String,
    pub point: String,
    pub accuracy: f64,
    pub f1: f64,
    pub spd_abs: f64,
    pub n_selected: usize,
    pub n_features: usize,
}

/// Collect summary rows from every run directory (any directory containing a
/// `meta` file) under `dir`, including `dir` itself.
pub fn summarize_results(dir: &Path) -> Result<Vec<SummaryRow>> {
    let mut run_dirs: Vec<PathBuf> = Vec::new();
    if dir.join("meta").is_file() {
        run_dirs.push(dir.to_path_buf());
    }
    if dir.is_dir() {
        let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", dir.display())))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_dir() && p.join("meta").is_file())
            .collect();
        subdirs.sort();
        run_dirs.extend(subdirs);
    }
    if run_dirs.is_empty() {
        return Err(Error::Data(format!(
            "no run directories (containing a `meta` file) under {}",
            dir.display()
        )));
    }

    let mut rows = Vec::new();
    for run_dir in run_dirs {
        let meta_text = fs::read_to_string(run_dir.join("meta"))
            .map_err(|e| Error::Data(format!("cannot read meta in {}: {e}", run_dir.display())))?;
        let meta: RunMeta = toml::from_str(&meta_text)
            .map_err(|e| Error::Data(format!("malformed meta in {}: {e}", run_dir.display())))?;
        let push_row = |rows: &mut Vec<SummaryRow>, point: &str, r: &EvaluationRecord| {
            rows.push(SummaryRow {
                run: meta.name.clone(),
                dataset: meta.dataset.clone(),
                model: meta.model.label().to_string(),
                mode: meta.mode.label().to_string(),
                point: point.to_string(),
                accuracy: r.accuracy,
                f1: r.f1,
                spd_abs: r.spd_abs,
                n_selected: r.n_selected,
                n_features: meta.n_features,
            });
        };
        match meta.mode {
            Mode::Baseline | Mode::Soga => {
                let records = parse_records_csv(&run_dir.join("best.csv"))?;
                if let Some(record) = records.first() {
                    let point = if meta.mode == Mode::Baseline {
                        "all_features"
                    } else {
                        "best"
                    };
                    push_row(&mut rows, point, record);
                }
            }
            Mode::Nsga2 => {
                let records = parse_records_csv(&run_dir.join("front.csv"))?;
                // records are sorted by |SPD| ascending, so the extremes sit
                // at the ends: first = fairest, last = best-performing
                if let Some(fairest) = records.first() {
                    push_row(&mut rows, "max_fairness", fairest);
                }
                if records.len() > 1 {
                    push_row(&mut rows, "max_performance", records.last().unwrap());
                }
            }
        }
    }
    Ok(rows)
}

/// Render summary rows as a fixed-width text table, reals at 3 decimals.
pub fn render_summary(rows: &[SummaryRow]) -> String {
    let headers = [
        "run", "dataset", "model", "mode", "point", "accuracy", "f1", "spd_abs", "selected",
    ];
    let mut cells: Vec<[String; 9]> = Vec::with_capacity(rows.len());
    for r in rows {
        cells.push([
            r.run.clone(),
            r.dataset.clone(),
            r.model.clone(),
            r.mode.clone(),
            r.point.clone(),
            format!("{:.3}", r.accuracy),
            format!("{:.3}", r.f1),
            format!("{:.3}", r.spd_abs),
            format!("{}/{}", r.n_selected, r.n_features),
        ]);
    }
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in &cells {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let render_line = |fields: &[String], widths: &[usize]| -> String {
        fields
            .iter()
            .zip(widths)
            .map(|(f, w)| format!("{f:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let header_fields: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    out.push_str(&render_line(&header_fields, &widths));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in &cells {
        out.push_str(&render_line(row.as_slice(), &widths));
        out.push('\n');
    }
    out
}
