//! `fairsel`: run fairness-aware feature-selection experiments from spec
//! files and summarize their results.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fairsel_core::experiment::{
    render_summary, run_all, run_experiment, summarize_results, ExperimentSpec, Mode, RunArtifacts,
    RunOutcome, SpecOverrides,
};
use fairsel_core::EvaluationRecord;

#[derive(Parser)]
#[command(
    name = "fairsel",
    version,
    about = "Fairness-aware wrapper feature selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct OverrideArgs {
    /// Override the evolutionary seed from the spec file.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the generation budget.
    #[arg(long)]
    generations: Option<usize>,
    /// Override the population size.
    #[arg(long, value_name = "N")]
    pop_size: Option<usize>,
    /// Override the output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl OverrideArgs {
    fn to_overrides(&self) -> SpecOverrides {
        SpecOverrides {
            seed: self.seed,
            generations: self.generations,
            population_size: self.pop_size,
            output: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment spec (soga, nsga2, or baseline mode).
    Run {
        /// Path to the experiment spec file.
        spec: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Evaluate the all-features baseline of a spec, whatever its mode.
    Baseline {
        spec: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Run every .toml spec in a directory, in file-name order.
    RunAll {
        dir: PathBuf,
        #[command(flatten)]
        overrides: OverrideArgs,
    },
    /// Render a summary table over finished run directories.
    Report {
        /// A run directory or a directory of run directories.
        results_dir: PathBuf,
    },
}

fn describe_record(label: &str, record: &EvaluationRecord) {
    println!(
        "{label}: mask={} selected={} f1={:.4} |spd|={:.4} accuracy={:.4}",
        record.mask.mask_string(),
        record.n_selected,
        record.f1,
        record.spd_abs,
        record.accuracy
    );
}

fn describe_outcome(outcome: &RunOutcome) {
    println!(
        "run {} ({} on {} / {}), {} evaluations, {} trainings, {} ms -> {}",
        outcome.spec.name,
        outcome.spec.mode.label(),
        outcome.meta.dataset,
        outcome.meta.model.label(),
        outcome.meta.evaluations,
        outcome.meta.trainings,
        outcome.meta.wall_ms,
        outcome.spec.output.display()
    );
    match &outcome.artifacts {
        RunArtifacts::Baseline(record) => describe_record("baseline", record),
        RunArtifacts::Soga(result) => {
            if let Some(record) = &result.best.record {
                describe_record("best", record);
            }
        }
        RunArtifacts::Nsga2 { report, .. } => {
            println!("front: {} members", report.records.len());
            if let Some(fairest) = report.records.first() {
                describe_record("  max fairness   ", fairest);
            }
            if report.records.len() > 1 {
                describe_record("  max performance", report.records.last().unwrap());
            }
        }
    }
}

fn execute(cli: Cli) -> fairsel_core::Result<()> {
    match cli.command {
        Command::Run { spec, overrides } => {
            let spec = ExperimentSpec::load(&spec, &overrides.to_overrides())?;
            let outcome = run_experiment(&spec)?;
            describe_outcome(&outcome);
        }
        Command::Baseline { spec, overrides } => {
            let mut spec = ExperimentSpec::load(&spec, &overrides.to_overrides())?;
            spec.mode = Mode::Baseline;
            spec.name = format!("{}-baseline", spec.name);
            if overrides.out.is_none() {
                spec.output = PathBuf::from("results").join(&spec.name);
            }
            let outcome = run_experiment(&spec)?;
            describe_outcome(&outcome);
        }
        Command::RunAll { dir, overrides } => {
            let outcomes = run_all(&dir, &overrides.to_overrides())?;
            for outcome in &outcomes {
                describe_outcome(outcome);
            }
            println!("{} runs finished", outcomes.len());
        }
        Command::Report { results_dir } => {
            let rows = summarize_results(&results_dir)?;
            print!("{}", render_summary(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
