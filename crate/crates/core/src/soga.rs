//! Single-objective genetic algorithm: minimize the wrapped classifier's
//! |SPD| over feature subsets with tournament selection, single-point
//! crossover, bit-flip mutation, repair, and best-ever elitism.

use crate::error::Result;
use crate::evolve::{
    crossover_single_point, evaluate_population, mutate_bitflip, random_population, repair,
    tournament_select, Chromosome, Evaluate, EvolveConfig, Individual,
};
use crate::experiment::EvaluationRecord;
use crate::rng::stream;

/// Scalar fitness of one evaluation: |SPD|, with failed trainings mapped to
/// +infinity so the optimizer can move past degenerate subsets.
pub fn fitness_from_record(record: &EvaluationRecord) -> f64 {
    if record.failed {
        f64::INFINITY
    } else {
        record.spd_abs
    }
}

fn soga_objectives(record: &EvaluationRecord) -> Vec<f64> {
    vec![fitness_from_record(record)]
}

/// Train-and-measure fitness of a single chromosome (memoized by the
/// evaluator).
pub fn fitness_spd<E: Evaluate>(chromosome: &Chromosome, evaluator: &E) -> f64 {
    fitness_from_record(&evaluator.evaluate(chromosome))
}

/// Per-generation trace entry; `best_spd_abs` is the best-ever fitness.
#[derive(Clone, Copy, Debug)]
pub struct SogaGeneration {
    pub generation: usize,
    pub best_spd_abs: f64,
    pub mean_spd_abs: f64,
}

/// Outcome of a GA run: the best individual ever evaluated plus the
/// generation trace.
#[derive(Clone, Debug)]
pub struct SogaResult {
    pub best: Individual,
    pub history: Vec<SogaGeneration>,
    pub evaluations_used: usize,
}

fn fitness_of(individual: &Individual) -> f64 {
    individual.objectives[0]
}

fn mean_record_spd(population: &[Individual]) -> f64 {
    let total: f64 = population
        .iter()
        .map(|ind| ind.record.as_ref().map_or(1.0, |r| r.spd_abs))
        .sum();
    total / population.len() as f64
}

const STREAM_INIT: u64 = 11;
const STREAM_VARIATION: u64 = 12;

/// Run the generational GA. Each generation breeds `population_size - 1`
/// offspring and carries the best-ever individual forward unchanged, so the
/// reported best is reproducible from any run and the best-ever trace is
/// non-increasing.
pub fn run_soga<E: Evaluate>(config: &EvolveConfig, evaluator: &E) -> Result<SogaResult> {
    config.validate()?;
    let n_features = evaluator.n_features();
    let protected_index = evaluator.protected_index();
    let seed = config.seed;

    let chromosomes = random_population(
        config,
        n_features,
        protected_index,
        &mut stream(seed, &[STREAM_INIT]),
    )?;
    let mut population = evaluate_population(chromosomes, evaluator, soga_objectives);
    let mut evaluations = population.len();

    let mut best = population
        .iter()
        .min_by(|a, b| fitness_of(a).total_cmp(&fitness_of(b)))
        .expect("population is non-empty")
        .clone();
    let mut history = vec![SogaGeneration {
        generation: 1,
        best_spd_abs: fitness_of(&best),
        mean_spd_abs: mean_record_spd(&population),
    }];

    let lower_fitness = |a: &Individual, b: &Individual| fitness_of(a) < fitness_of(b);

    for generation in 2..=config.generations {
        let mut offspring: Vec<Chromosome> = Vec::with_capacity(config.population_size);
        for pair in 0..config.population_size / 2 {
            let mut rng = stream(seed, &[STREAM_VARIATION, generation as u64, pair as u64]);
            let p1 =
                tournament_select(&population, config.tournament_size, lower_fitness, &mut rng)?;
            let p2 =
                tournament_select(&population, config.tournament_size, lower_fitness, &mut rng)?;
            let (c1, c2) = crossover_single_point(
                &population[p1].chromosome,
                &population[p2].chromosome,
                config.crossover_rate,
                &mut rng,
            )?;
            for child in [c1, c2] {
                let mutated = mutate_bitflip(&child, config.mutation_rate, &mut rng);
                offspring.push(repair(
                    mutated,
                    config.force_protected,
                    protected_index,
                    &mut rng,
                ));
            }
        }
        offspring.truncate(config.population_size - 1);

        let mut next = evaluate_population(offspring, evaluator, soga_objectives);
        evaluations += next.len();
        next.push(best.clone()); // elitism: best-ever always survives
        population = next;

        if let Some(challenger) = population
            .iter()
            .min_by(|a, b| fitness_of(a).total_cmp(&fitness_of(b)))
        {
            if fitness_of(challenger) < fitness_of(&best) {
                best = challenger.clone();
            }
        }
        history.push(SogaGeneration {
            generation,
            best_spd_abs: fitness_of(&best),
            mean_spd_abs: mean_record_spd(&population),
        });
    }

    Ok(SogaResult {
        best,
        history,
        evaluations_used: evaluations,
    })
}
