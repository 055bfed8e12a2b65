//! Evolutionary search over per-digest leaf budgets.
//!
//! A genome assigns each digest group a leaf budget. Fitness is the
//! validation accuracy of a judge tree trained on the genome's count
//! matrix, minus a small penalty on the total budget, so the search
//! prefers the coarsest vocabulary that still separates the classes.
//!
//! The predicate space is taken by shared reference: nothing in the loop
//! can refit a master tree. Fitness values are cached by genome, and all
//! randomness flows from one seeded generator, so a run is a pure
//! function of its inputs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::error::ModelError;
use crate::graph::stratified_split_indices;
use crate::predicates::{Genome, PredicateSpace};
use crate::tree::fit_tree;

#[derive(Debug, Clone)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: usize,
    pub lambda_max: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 100,
            generations: 5,
            lambda_max: 16,
            tournament_size: 3,
            crossover_prob: 0.7,
            mutation_rate: 0.1,
            elitism: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitnessParams {
    /// Penalty per unit of total leaf budget.
    pub gamma: f64,
    pub judge_max_leaves: usize,
    pub judge_ccp_alpha: f64,
    pub validation_fraction: f64,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams {
            gamma: 1e-4,
            judge_max_leaves: 48,
            judge_ccp_alpha: 0.001,
            validation_fraction: 0.25,
        }
    }
}

/// Evaluates genomes against a fixed stratified hold-out of the training
/// graphs, caching by genome.
pub struct FitnessEvaluator<'a> {
    space: &'a PredicateSpace,
    labels: &'a [usize],
    n_classes: usize,
    params: FitnessParams,
    train_idx: Vec<usize>,
    val_idx: Vec<usize>,
    cache: HashMap<Genome, f64>,
    pub evaluations: usize,
    pub cache_hits: usize,
}

impl<'a> FitnessEvaluator<'a> {
    pub fn new(
        space: &'a PredicateSpace,
        labels: &'a [usize],
        n_classes: usize,
        params: FitnessParams,
        seed: u64,
    ) -> Result<Self, ModelError> {
        let (train_idx, val_idx) =
            stratified_split_indices(labels, 1.0 - params.validation_fraction, seed)?;
        Ok(FitnessEvaluator {
            space,
            labels,
            n_classes,
            params,
            train_idx,
            val_idx,
            cache: HashMap::new(),
            evaluations: 0,
            cache_hits: 0,
        })
    }

    fn compute(&mut self, genome: &Genome) -> f64 {
        self.evaluations += 1;
        let matrix = self.space.count_matrix(genome);
        let tx: Vec<Vec<f64>> = self.train_idx.iter().map(|&i| matrix[i].clone()).collect();
        let ty: Vec<usize> = self.train_idx.iter().map(|&i| self.labels[i]).collect();
        let judge = fit_tree(&tx, &ty, self.n_classes, self.params.judge_max_leaves, None)
            .ccp_pruned(self.params.judge_ccp_alpha);
        let correct = self
            .val_idx
            .iter()
            .filter(|&&i| judge.predict_row(&matrix[i]) == self.labels[i])
            .count();
        let accuracy = correct as f64 / self.val_idx.len() as f64;
        let budget: usize = genome.iter().sum();
        accuracy - self.params.gamma * budget as f64
    }

    pub fn fitness(&mut self, genome: &Genome) -> f64 {
        if let Some(&f) = self.cache.get(genome) {
            self.cache_hits += 1;
            return f;
        }
        let f = self.compute(genome);
        self.cache.insert(genome.clone(), f);
        f
    }
}

fn tournament_select(
    scored: &[(Genome, f64)],
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Genome {
    let mut best: Option<usize> = None;
    for _ in 0..size {
        let i = rng.gen_range(0..scored.len());
        best = Some(match best {
            None => i,
            // Ties go to the lower population index.
            Some(b) if scored[i].1 > scored[b].1 || (scored[i].1 == scored[b].1 && i < b) => i,
            Some(b) => b,
        });
    }
    scored[best.unwrap()].0.clone()
}

fn uniform_crossover(a: &Genome, b: &Genome, rng: &mut ChaCha8Rng) -> Genome {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
        .collect()
}

fn creep_mutate(g: &mut Genome, rate: f64, lambda_max: usize, rng: &mut ChaCha8Rng) {
    for v in g.iter_mut() {
        if rng.gen_bool(rate) {
            let delta: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            *v = (*v as i64 + delta).clamp(1, lambda_max as i64) as usize;
        }
    }
}

/// Per-generation search statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// L1 norm of the generation's best genome.
    pub best_l1: usize,
}

/// Result of an evolutionary run.
#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub best_genome: Genome,
    pub best_fitness: f64,
    /// Stats for the initial population and after each generation.
    pub history: Vec<GenerationStats>,
    pub evaluations: usize,
    pub cache_hits: usize,
}

impl EvolveOutcome {
    /// Fitness trace as CSV: `generation,best,mean,best_l1`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("generation,best,mean,best_l1\n");
        for s in &self.history {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.generation, s.best_fitness, s.mean_fitness, s.best_l1
            ));
        }
        out
    }
}

/// Runs the genetic search. The first population member is the all-ones
/// genome (pure digest histograms), so the search can never end worse
/// than that baseline.
pub fn evolve(
    space: &PredicateSpace,
    labels: &[usize],
    n_classes: usize,
    ga: &GaParams,
    fitness_params: &FitnessParams,
) -> Result<EvolveOutcome, ModelError> {
    let k = space.group_count();
    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed);
    let mut eval = FitnessEvaluator::new(space, labels, n_classes, fitness_params.clone(), ga.seed)?;
    let mut population: Vec<Genome> = Vec::with_capacity(ga.population_size);
    population.push(vec![1; k]);
    while population.len() < ga.population_size {
        population.push((0..k).map(|_| rng.gen_range(1..=ga.lambda_max)).collect());
    }
    let mut history = Vec::new();
    let mut scored: Vec<(Genome, f64)> = Vec::new();
    for generation in 0..=ga.generations {
        scored = population
            .iter()
            .map(|g| (g.clone(), eval.fitness(g)))
            .collect();
        // Descending fitness; ties resolved by genome for determinism.
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0))
        });
        history.push(GenerationStats {
            generation,
            best_fitness: scored[0].1,
            mean_fitness: scored.iter().map(|&(_, f)| f).sum::<f64>() / scored.len() as f64,
            best_l1: scored[0].0.iter().sum(),
        });
        if generation == ga.generations {
            break;
        }
        let mut next: Vec<Genome> = scored
            .iter()
            .take(ga.elitism.min(scored.len()))
            .map(|(g, _)| g.clone())
            .collect();
        while next.len() < ga.population_size {
            let p1 = tournament_select(&scored, ga.tournament_size, &mut rng);
            let p2 = tournament_select(&scored, ga.tournament_size, &mut rng);
            let mut child = if rng.gen_bool(ga.crossover_prob) {
                uniform_crossover(&p1, &p2, &mut rng)
            } else {
                p1
            };
            creep_mutate(&mut child, ga.mutation_rate, ga.lambda_max, &mut rng);
            next.push(child);
        }
        population = next;
    }
    let (best_genome, best_fitness) = scored[0].clone();
    Ok(EvolveOutcome {
        best_genome,
        best_fitness,
        history,
        evaluations: eval.evaluations,
        cache_hits: eval.cache_hits,
    })
}
