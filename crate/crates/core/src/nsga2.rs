//! NSGA-II engine: fast non-dominated sorting, crowding distance,
//! crowded-comparison tournament, duplicate elimination and the (mu + lambda)
//! generational loop minimizing [1 - F1, |SPD|].

use rand::Rng;

use crate::error::{Error, Result};
pub use crate::evolve::eliminate_duplicates;
use crate::evolve::{
    crossover_hux, eliminate_duplicates_refill, evaluate_population, mutate_bitflip,
    random_population, repair, tournament_select, Chromosome, Evaluate, EvolveConfig, Individual,
};
use crate::experiment::EvaluationRecord;
use crate::rng::stream;

/// Objective vector for the bi-objective problem, both components minimized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveVector {
    /// 1 - F1 score.
    pub f1_loss: f64,
    /// |statistical parity difference|.
    pub spd_abs: f64,
}

impl ObjectiveVector {
    pub fn as_array(&self) -> [f64; 2] {
        [self.f1_loss, self.spd_abs]
    }
}

impl From<&EvaluationRecord> for ObjectiveVector {
    fn from(record: &EvaluationRecord) -> Self {
        Self {
            f1_loss: 1.0 - record.f1,
            spd_abs: record.spd_abs,
        }
    }
}

/// Objectives handed to the engine for one evaluation record. Failed
/// trainings carry the worst-case sentinel (f1 = 0, |SPD| = 1) and therefore
/// map to (1, 1).
pub fn objectives_from_record(record: &EvaluationRecord) -> Vec<f64> {
    ObjectiveVector::from(record).as_array().to_vec()
}

/// True iff `a` is no worse than `b` in every objective and strictly better
/// in at least one (minimization).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly_better = false;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > bi {
            return false;
        }
        if ai < bi {
            strictly_better = true;
        }
    }
    strictly_better
}

/// One Pareto front: member indices into the population, all sharing `rank`.
#[derive(Clone, Debug)]
pub struct Front {
    pub rank: usize,
    pub members: Vec<usize>,
}

/// Deb's O(M N^2) dominance-count sort. Partitions the population into
/// ranked fronts and assigns `Individual::rank`.
pub fn fast_non_dominated_sort(population: &mut [Individual]) -> Result<Vec<Front>> {
    if let Some(bad) = population.iter().position(|ind| !ind.is_evaluated()) {
        return Err(Error::Runtime(format!(
            "non-dominated sort reached unevaluated individual {bad}"
        )));
    }
    let n = population.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    let mut current: Vec<usize> = Vec::new();

    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&population[p].objectives, &population[q].objectives) {
                dominated[p].push(q);
                domination_count[q] += 1;
            } else if dominates(&population[q].objectives, &population[p].objectives) {
                dominated[q].push(p);
                domination_count[p] += 1;
            }
        }
        if domination_count[p] == 0 {
            current.push(p);
        }
    }

    let mut fronts = Vec::new();
    let mut rank = 0;
    while !current.is_empty() {
        for &i in &current {
            population[i].rank = Some(rank);
        }
        let mut next: Vec<usize> = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                domination_count[q] -= 1;
                if domination_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        fronts.push(Front {
            rank,
            members: current,
        });
        current = next;
        rank += 1;
    }
    Ok(fronts)
}

/// Assign crowding distances within one front. Boundary members per
/// objective get +infinity; interior members accumulate the normalized gap
/// between their neighbors; a zero-range objective contributes nothing.
pub fn crowding_distance(population: &mut [Individual], front: &[usize]) {
    for &i in front {
        population[i].crowding = Some(0.0);
    }
    if front.is_empty() {
        return;
    }
    let n_objectives = population[front[0]].objectives.len();
    for m in 0..n_objectives {
        let mut by_objective: Vec<usize> = front.to_vec();
        by_objective.sort_by(|&a, &b| {
            population[a].objectives[m]
                .total_cmp(&population[b].objectives[m])
                .then(a.cmp(&b))
        });
        let first = by_objective[0];
        let last = *by_objective.last().unwrap();
        population[first].crowding = Some(f64::INFINITY);
        population[last].crowding = Some(f64::INFINITY);
        let range = population[last].objectives[m] - population[first].objectives[m];
        if range <= 0.0 || !range.is_finite() {
            continue;
        }
        for w in 0..by_objective.len().saturating_sub(2) {
            let prev = population[by_objective[w]].objectives[m];
            let next = population[by_objective[w + 2]].objectives[m];
            let mid = by_objective[w + 1];
            let current = population[mid].crowding.unwrap_or(0.0);
            population[mid].crowding = Some(current + (next - prev) / range);
        }
    }
}

/// Crowded-comparison: lower rank first, then higher crowding distance.
pub fn crowded_better(a: &Individual, b: &Individual) -> bool {
    match (a.rank, b.rank) {
        (Some(ra), Some(rb)) if ra != rb => ra < rb,
        _ => a.crowding.unwrap_or(0.0) > b.crowding.unwrap_or(0.0),
    }
}

/// NSGA-II survivor selection: fill by ascending rank; truncate the
/// splitting front by descending crowding distance, breaking ties by the
/// chromosome bits read as an unsigned big-endian integer, ascending.
pub fn environmental_selection(
    mut combined: Vec<Individual>,
    target_size: usize,
) -> Result<Vec<Individual>> {
    if combined.len() < target_size {
        return Err(Error::Runtime(format!(
            "environmental selection needs at least {target_size} candidates, got {}",
            combined.len()
        )));
    }
    let fronts = fast_non_dominated_sort(&mut combined)?;
    for front in &fronts {
        crowding_distance(&mut combined, &front.members);
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(target_size);
    for front in &fronts {
        let remaining = target_size - chosen.len();
        if remaining == 0 {
            break;
        }
        if front.members.len() <= remaining {
            chosen.extend(&front.members);
        } else {
            let mut split = front.members.clone();
            split.sort_by(|&a, &b| {
                combined[b]
                    .crowding
                    .unwrap_or(0.0)
                    .total_cmp(&combined[a].crowding.unwrap_or(0.0))
                    .then_with(|| combined[a].chromosome.cmp(&combined[b].chromosome))
            });
            chosen.extend(split.into_iter().take(remaining));
        }
    }

    let mut keep = vec![false; combined.len()];
    for &i in &chosen {
        keep[i] = true;
    }
    let mut survivors: Vec<Individual> = Vec::with_capacity(target_size);
    for (i, individual) in combined.into_iter().enumerate() {
        if keep[i] {
            survivors.push(individual);
        }
    }
    Ok(survivors)
}

/// Per-generation objective statistics over the current population.
#[derive(Clone, Debug)]
pub struct Nsga2Generation {
    pub generation: usize,
    pub best_f1_loss: f64,
    pub mean_f1_loss: f64,
    pub best_spd_abs: f64,
    pub mean_spd_abs: f64,
}

/// Engine output: the final first front plus run accounting.
#[derive(Clone, Debug)]
pub struct Nsga2Outcome {
    /// Rank-0 individuals of the final population.
    pub front: Vec<Individual>,
    pub history: Vec<Nsga2Generation>,
    pub evaluations_used: usize,
    /// Final merged parent+child pool, for dominance auditing.
    pub final_pool: Vec<Individual>,
}

fn generation_stats(generation: usize, population: &[Individual]) -> Nsga2Generation {
    let n = population.len() as f64;
    let mut stats = Nsga2Generation {
        generation,
        best_f1_loss: f64::INFINITY,
        mean_f1_loss: 0.0,
        best_spd_abs: f64::INFINITY,
        mean_spd_abs: 0.0,
    };
    for ind in population {
        stats.best_f1_loss = stats.best_f1_loss.min(ind.objectives[0]);
        stats.best_spd_abs = stats.best_spd_abs.min(ind.objectives[1]);
        stats.mean_f1_loss += ind.objectives[0] / n;
        stats.mean_spd_abs += ind.objectives[1] / n;
    }
    stats
}

const STREAM_INIT: u64 = 1;
const STREAM_VARIATION: u64 = 2;
const STREAM_DEDUP: u64 = 3;

/// Full NSGA-II run against the given evaluator.
pub fn run_nsga2<E: Evaluate>(config: &EvolveConfig, evaluator: &E) -> Result<Nsga2Outcome> {
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
    let chromosomes = eliminate_duplicates_refill(
        chromosomes,
        &[],
        config,
        protected_index,
        &mut stream(seed, &[STREAM_DEDUP, 0]),
    );
    let mut population = evaluate_population(chromosomes, evaluator, objectives_from_record);
    let mut evaluations = population.len();

    let fronts = fast_non_dominated_sort(&mut population)?;
    for front in &fronts {
        crowding_distance(&mut population, &front.members);
    }
    let mut history = vec![generation_stats(1, &population)];
    let mut final_pool = population.clone();

    for generation in 2..=config.generations {
        let mut children: Vec<Chromosome> = Vec::with_capacity(config.population_size);
        for pair in 0..config.population_size / 2 {
            let mut rng = stream(seed, &[STREAM_VARIATION, generation as u64, pair as u64]);
            let p1 = tournament_select(
                &population,
                config.tournament_size,
                crowded_better,
                &mut rng,
            )?;
            let p2 = tournament_select(
                &population,
                config.tournament_size,
                crowded_better,
                &mut rng,
            )?;
            let (c1, c2) = if rng.random::<f64>() < config.crossover_rate {
                crossover_hux(
                    &population[p1].chromosome,
                    &population[p2].chromosome,
                    &mut rng,
                )?
            } else {
                (
                    population[p1].chromosome.clone(),
                    population[p2].chromosome.clone(),
                )
            };
            for child in [c1, c2] {
                let mutated = mutate_bitflip(&child, config.mutation_rate, &mut rng);
                children.push(repair(
                    mutated,
                    config.force_protected,
                    protected_index,
                    &mut rng,
                ));
            }
        }
        // offspring must be novel within themselves and against the parents
        let parent_chromosomes: Vec<Chromosome> =
            population.iter().map(|p| p.chromosome.clone()).collect();
        let children = eliminate_duplicates_refill(
            children,
            &parent_chromosomes,
            config,
            protected_index,
            &mut stream(seed, &[STREAM_DEDUP, generation as u64]),
        );
        let child_individuals = evaluate_population(children, evaluator, objectives_from_record);
        evaluations += child_individuals.len();

        let mut merged = population;
        merged.extend(child_individuals);
        final_pool = merged.clone();
        population = environmental_selection(merged, config.population_size)?;
        history.push(generation_stats(generation, &population));
    }

    // ranks come from the last sort (initial evaluation or the final
    // environmental selection over the merged pool)
    let front: Vec<Individual> = population
        .iter()
        .filter(|ind| ind.rank == Some(0))
        .cloned()
        .collect();

    Ok(Nsga2Outcome {
        front,
        history,
        evaluations_used: evaluations,
        final_pool,
    })
}
