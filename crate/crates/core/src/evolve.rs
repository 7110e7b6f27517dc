//! Chromosome representation and the genetic operators shared by the
//! single-objective GA and NSGA-II: random initialization, tournament
//! selection, single-point and half-uniform crossover, bit-flip mutation,
//! and chromosome repair.

use rand::Rng;

use crate::error::{Error, Result};
use crate::experiment::EvaluationRecord;
use crate::rng::shuffle;

/// Fixed-length bit vector selecting a feature subset: bit `i` set means
/// feature `i` is fed to the model.
///
/// The derived `Ord` compares bit 0 first, which equals numeric order of the
/// mask read as an unsigned big-endian integer; selection tie-breaks rely on
/// this.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome {
    bits: Vec<bool>,
}

impl Chromosome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// All-ones mask of the given length.
    pub fn ones(len: usize) -> Self {
        Self {
            bits: vec![true; len],
        }
    }

    /// Uniform i.i.d. random bits.
    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..len).map(|_| rng.random::<bool>()).collect(),
        }
    }

    /// Parse a `0`/`1` string in feature order.
    pub fn from_mask_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Data(format!("invalid mask character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_all_zero(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    /// Indices of selected features, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i]).collect()
    }

    /// Render as a `0`/`1` string in feature order.
    pub fn mask_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Number of positions at which `self` and `other` differ.
    pub fn hamming_distance(&self, other: &Chromosome) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// A chromosome together with its objective vector and the NSGA-II ranking
/// state. `objectives` has length 1 for the single-objective GA (|SPD|) and
/// length 2 for NSGA-II ([1 - F1, |SPD|]).
#[derive(Clone, Debug)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub objectives: Vec<f64>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
    pub record: Option<EvaluationRecord>,
}

impl Individual {
    pub fn new(chromosome: Chromosome) -> Self {
        Self {
            chromosome,
            objectives: Vec::new(),
            rank: None,
            crowding: None,
            record: None,
        }
    }

    pub fn is_evaluated(&self) -> bool {
        !self.objectives.is_empty()
    }
}

/// Shared configuration for both evolutionary engines.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EvolveConfig {
    pub population_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub generations: usize,
    pub seed: u64,
    /// Keep the protected feature selected in every chromosome.
    pub force_protected: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            population_size: 40,
            crossover_rate: 0.5,
            mutation_rate: 0.05,
            tournament_size: 2,
            generations: 50,
            seed: 0,
            force_protected: true,
        }
    }
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if !self.population_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population_size must be even for pairing, got {}",
                self.population_size
            )));
        }
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
                return Err(Error::Config(format!(
                    "{name} must lie in [0, 1], got {rate}"
                )));
            }
        }
        if self.tournament_size == 0 {
            return Err(Error::Config("tournament_size must be positive".into()));
        }
        if self.generations == 0 {
            return Err(Error::Config("generations must be positive".into()));
        }
        Ok(())
    }
}

/// Chromosome evaluation service used by both engines. Implementations are
/// expected to be deterministic per chromosome and safe to call from many
/// threads at once.
pub trait Evaluate: Sync {
    /// Chromosome length for this problem.
    fn n_features(&self) -> usize;
    /// Column index of the protected feature (repair target).
    fn protected_index(&self) -> usize;
    /// Train the wrapped model on the masked view and measure it. Must not
    /// panic on degenerate masks; failures are reported in the record.
    fn evaluate(&self, chromosome: &Chromosome) -> EvaluationRecord;
}

/// Random initial population: `population_size` chromosomes of i.i.d. uniform
/// bits, each repaired afterwards.
pub fn random_population<R: Rng>(
    config: &EvolveConfig,
    n_features: usize,
    protected_index: usize,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    if n_features == 0 {
        return Err(Error::Config(
            "cannot build chromosomes over zero features".into(),
        ));
    }
    Ok((0..config.population_size)
        .map(|_| {
            let c = Chromosome::random(n_features, rng);
            repair(c, config.force_protected, protected_index, rng)
        })
        .collect())
}

/// Deterministic core of tournament selection: the best of the given
/// candidate indices under `better`.
pub fn tournament_winner(
    population: &[Individual],
    candidates: &[usize],
    better: impl Fn(&Individual, &Individual) -> bool,
) -> Result<usize> {
    let mut winner = *candidates
        .first()
        .ok_or_else(|| Error::Runtime("tournament drew no candidates".into()))?;
    for &i in &candidates[1..] {
        if !population[i].is_evaluated() || !population[winner].is_evaluated() {
            return Err(Error::Runtime(
                "tournament selection reached an unevaluated individual".into(),
            ));
        }
        if better(&population[i], &population[winner]) {
            winner = i;
        }
    }
    if !population[winner].is_evaluated() {
        return Err(Error::Runtime(
            "tournament selection reached an unevaluated individual".into(),
        ));
    }
    Ok(winner)
}

/// Draw `k` individuals uniformly with replacement and return the index of
/// the best one under `better`.
pub fn tournament_select<R: Rng>(
    population: &[Individual],
    k: usize,
    better: impl Fn(&Individual, &Individual) -> bool,
    rng: &mut R,
) -> Result<usize> {
    if population.is_empty() {
        return Err(Error::Runtime("tournament over an empty population".into()));
    }
    let candidates: Vec<usize> = (0..k.max(1))
        .map(|_| rng.random_range(0..population.len()))
        .collect();
    tournament_winner(population, &candidates, better)
}

/// Deterministic core of single-point crossover: keep the first `cut` bits,
/// swap the suffixes.
pub fn single_point_at(a: &Chromosome, b: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    debug_assert!(cut >= 1 && cut < a.len());
    let mut child_a = a.clone();
    let mut child_b = b.clone();
    for i in cut..a.len() {
        child_a.bits[i] = b.bits[i];
        child_b.bits[i] = a.bits[i];
    }
    (child_a, child_b)
}

/// With probability `rate`, cut at a uniform point in `1..=len-1` and swap
/// suffixes; otherwise return copies of the parents.
pub fn crossover_single_point<R: Rng>(
    a: &Chromosome,
    b: &Chromosome,
    rate: f64,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::Runtime(format!(
            "crossover length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Runtime(
            "single-point crossover needs length >= 2".into(),
        ));
    }
    if rng.random::<f64>() < rate {
        let cut = rng.random_range(1..a.len());
        Ok(single_point_at(a, b, cut))
    } else {
        Ok((a.clone(), b.clone()))
    }
}

/// Half-uniform crossover: of the `d` positions where the parents differ,
/// exactly `floor(d / 2)` (chosen uniformly without replacement) are
/// exchanged; identical positions are untouched.
pub fn crossover_hux<R: Rng>(
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::Runtime(format!(
            "crossover length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut differing: Vec<usize> = (0..a.len()).filter(|&i| a.bits[i] != b.bits[i]).collect();
    let exchanges = differing.len() / 2;
    shuffle(&mut differing, rng);
    let mut child_a = a.clone();
    let mut child_b = b.clone();
    for &i in differing.iter().take(exchanges) {
        child_a.bits[i] = b.bits[i];
        child_b.bits[i] = a.bits[i];
    }
    Ok((child_a, child_b))
}

/// Flip each bit independently with probability `rate`.
pub fn mutate_bitflip<R: Rng>(c: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    debug_assert!((0.0..=1.0).contains(&rate));
    let mut out = c.clone();
    for bit in out.bits.iter_mut() {
        if rng.random::<f64>() < rate {
            *bit = !*bit;
        }
    }
    out
}

/// Make a chromosome valid: force the protected bit when requested, and give
/// all-zero chromosomes one uniformly random set bit (a model cannot train on
/// zero features). Idempotent on already-valid input.
pub fn repair<R: Rng>(
    mut c: Chromosome,
    force_protected: bool,
    protected_index: usize,
    rng: &mut R,
) -> Chromosome {
    if force_protected {
        c.bits[protected_index] = true;
    }
    if c.is_all_zero() {
        let i = rng.random_range(0..c.len());
        c.bits[i] = true;
    }
    c
}

/// Remove bit-identical chromosomes, keeping the first occurrence of each.
pub fn eliminate_duplicates(population: &[Chromosome]) -> Vec<Chromosome> {
    let mut seen = std::collections::HashSet::new();
    population
        .iter()
        .filter(|c| seen.insert((*c).clone()))
        .cloned()
        .collect()
}

/// Duplicate elimination with constant population size: chromosomes that
/// repeat an earlier slot or any member of `existing` (the parent
/// population, matching eliminate-duplicates-against-population semantics)
/// are replaced with mutated copies of the survivors before evaluation.
/// Output chromosomes are pairwise distinct whenever the feature space is
/// large enough to permit it.
pub fn eliminate_duplicates_refill<R: Rng>(
    population: Vec<Chromosome>,
    existing: &[Chromosome],
    config: &EvolveConfig,
    protected_index: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    let target = population.len();
    let mut seen: std::collections::HashSet<Chromosome> = existing.iter().cloned().collect();
    let mut unique: Vec<Chromosome> = Vec::with_capacity(target);
    for c in population {
        if !seen.contains(&c) {
            seen.insert(c.clone());
            unique.push(c);
        }
    }
    // mutation donors: the surviving novel chromosomes, or the existing
    // population when every offspring collided with it
    let survivors: Vec<Chromosome> = if unique.is_empty() {
        existing.to_vec()
    } else {
        unique.clone()
    };
    let mut donor = 0usize;
    while unique.len() < target {
        let base = &survivors[donor % survivors.len()];
        donor += 1;
        // at least one expected flip, escalating when mutants keep colliding
        let mut rate = config.mutation_rate.max(1.0 / base.len() as f64);
        let mut accepted = None;
        for _ in 0..32 {
            let candidate = repair(
                mutate_bitflip(base, rate, rng),
                config.force_protected,
                protected_index,
                rng,
            );
            if !seen.contains(&candidate) {
                accepted = Some(candidate);
                break;
            }
            rate = (rate * 1.5).min(0.5);
        }
        // feature space exhausted: accept a duplicate rather than spin
        let fresh = accepted.unwrap_or_else(|| base.clone());
        seen.insert(fresh.clone());
        unique.push(fresh);
    }
    unique
}

/// Evaluate a batch of chromosomes in parallel. `objectives` turns each
/// evaluation record into the engine's objective vector.
pub fn evaluate_population<E: Evaluate>(
    chromosomes: Vec<Chromosome>,
    evaluator: &E,
    objectives: fn(&EvaluationRecord) -> Vec<f64>,
) -> Vec<Individual> {
    use rayon::prelude::*;
    chromosomes
        .into_par_iter()
        .map(|chromosome| {
            let record = evaluator.evaluate(&chromosome);
            let mut individual = Individual::new(chromosome);
            individual.objectives = objectives(&record);
            individual.record = Some(record);
            individual
        })
        .collect()
}
