//! Fairness-aware wrapper feature selection.
//!
//! A lightweight classifier (logistic regression, linear SVM, or boosted
//! stumps) is trained on candidate feature subsets encoded as binary
//! chromosomes; holdout F1 and statistical parity difference drive either a
//! single-objective genetic algorithm (fairness only) or NSGA-II (fairness
//! and performance jointly), producing first-front trade-off reports.

pub mod data;
pub mod error;
pub mod evolve;
pub mod experiment;
pub mod metrics;
pub mod models;
pub mod nsga2;
pub mod rng;
pub mod soga;

pub use data::{
    encode, load_csv, load_dataset, mask_view, parse_csv, split, ColumnKind, ColumnSchema,
    DataView, DatasetManifest, EncodeOptions, EncodedDataset, LoadOptions, RawTable, SplitPair,
};
pub use error::{Error, Result};
pub use evolve::{
    crossover_hux, crossover_single_point, eliminate_duplicates, eliminate_duplicates_refill,
    mutate_bitflip, random_population, repair, tournament_select, Chromosome, Evaluate,
    EvolveConfig, Individual,
};
pub use experiment::{
    evaluate_chromosome, export_front_csv, parse_records_csv, render_summary, run_all,
    run_baseline, run_experiment, summarize_results, CacheStats, EvalCache, EvalService,
    EvaluationRecord, ExperimentSpec, FrontReport, Mode, RunMeta, RunOutcome, SpecOverrides,
};
pub use metrics::{
    accuracy, confusion, evaluate_all, f1_score, group_rates, statistical_parity_difference,
    ConfusionCounts, GroupRates, HoldoutMetrics,
};
pub use models::{predict, train, ModelKind, TrainConfig, TrainedModel};
pub use nsga2::{
    crowding_distance, dominates, environmental_selection, fast_non_dominated_sort, run_nsga2,
    Front, Nsga2Outcome, ObjectiveVector,
};
pub use soga::{fitness_spd, run_soga, SogaResult};
