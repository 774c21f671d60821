//! Genetic optimization of link weights (SDNGALB).
//!
//! Each generation the population is evaluated and ranked by max link load,
//! consecutive ranked individuals are paired for one-point crossover, every
//! child may be mutated, and the best individual of the previous generation
//! replaces the worst child. The loop ends when the best-ever fitness has not
//! improved for `stagnation_limit` generations or after `max_generations`.
//!
//! All random draws come from one [`ChaCha8Rng`] in a fixed order, so a run is
//! reproducible from its seed.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{FlowSet, ModelError, NetworkGraph, WeightVector};
use crate::routing::{Evaluator, RoutingError, RoutingTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("population size must be a positive even number, got {0}")]
    PopulationSize(usize),
    #[error("mutation probability {0} is outside [0, 1]")]
    MutationProbability(f64),
    #[error("max_generations must be positive")]
    ZeroGenerations,
    #[error("stagnation limit must be in 1..={max_generations}, got {stagnation_limit}")]
    StagnationLimit {
        stagnation_limit: usize,
        max_generations: usize,
    },
    #[error("weight_max must be at least 1")]
    ZeroWeightMax,
    #[error("graph has no edges to weight")]
    NoEdges,
    #[error("crossover point {point} outside 1..{len}")]
    CrossoverPoint { point: usize, len: usize },
    #[error("chromosomes differ in length ({0} vs {1})")]
    ParentLengths(usize, usize),
    #[error("individual {0} has not been evaluated")]
    Unevaluated(usize),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

impl From<ModelError> for GaError {
    fn from(e: ModelError) -> Self {
        GaError::Routing(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_prob: f64,
    pub max_generations: usize,
    pub stagnation_limit: usize,
    pub weight_max: u32,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            mutation_prob: 0.10,
            max_generations: 500,
            stagnation_limit: 100,
            weight_max: 9,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size == 0 || !self.population_size.is_multiple_of(2) {
            return Err(GaError::PopulationSize(self.population_size));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(GaError::MutationProbability(self.mutation_prob));
        }
        if self.max_generations == 0 {
            return Err(GaError::ZeroGenerations);
        }
        if self.stagnation_limit == 0 || self.stagnation_limit > self.max_generations {
            return Err(GaError::StagnationLimit {
                stagnation_limit: self.stagnation_limit,
                max_generations: self.max_generations,
            });
        }
        if self.weight_max == 0 {
            return Err(GaError::ZeroWeightMax);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    pub chromosome: Vec<u32>,
    pub fitness: Option<u64>,
}

impl Individual {
    pub fn new(chromosome: Vec<u32>) -> Self {
        Individual {
            chromosome,
            fitness: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Stagnation,
    MaxGenerations,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Stagnation => "stagnation",
            StopReason::MaxGenerations => "max_generations",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_weights: WeightVector,
    pub best_fitness: u64,
    pub routing_table: RoutingTable,
    pub generations_run: usize,
    pub stop_reason: StopReason,
    /// Best-ever fitness after each generation.
    pub fitness_history: Vec<u64>,
    pub elapsed: Duration,
}

/// `n` random chromosomes with genes uniform over `[1, v]`.
pub fn init_population<R: Rng>(config: &GaConfig, edge_count: usize, rng: &mut R) -> Vec<Individual> {
    (0..config.population_size)
        .map(|_| {
            Individual::new(
                (0..edge_count)
                    .map(|_| rng.gen_range(1..=config.weight_max))
                    .collect(),
            )
        })
        .collect()
}

/// Stable sort by ascending fitness.
pub fn rank(mut population: Vec<Individual>) -> Result<Vec<Individual>, GaError> {
    if let Some(i) = population.iter().position(|ind| ind.fitness.is_none()) {
        return Err(GaError::Unevaluated(i));
    }
    population.sort_by_key(|ind| ind.fitness);
    Ok(population)
}

/// One-point crossover: the genes from `point` on are exchanged.
pub fn crossover(
    parent_a: &Individual,
    parent_b: &Individual,
    point: usize,
) -> Result<(Individual, Individual), GaError> {
    let len = parent_a.chromosome.len();
    if parent_b.chromosome.len() != len {
        return Err(GaError::ParentLengths(len, parent_b.chromosome.len()));
    }
    if point == 0 || point >= len {
        return Err(GaError::CrossoverPoint { point, len });
    }
    let (a_head, a_tail) = parent_a.chromosome.split_at(point);
    let (b_head, b_tail) = parent_b.chromosome.split_at(point);
    Ok((
        Individual::new([a_head, b_tail].concat()),
        Individual::new([b_head, a_tail].concat()),
    ))
}

/// With probability `mutation_prob`, redraws one uniformly chosen gene.
pub fn mutate<R: Rng>(mut individual: Individual, config: &GaConfig, rng: &mut R) -> Individual {
    if individual.chromosome.is_empty() || !rng.gen_bool(config.mutation_prob) {
        return individual;
    }
    let gene = rng.gen_range(0..individual.chromosome.len());
    individual.chromosome[gene] = rng.gen_range(1..=config.weight_max);
    individual.fitness = None;
    individual
}

fn evaluate_all(
    evaluator: &Evaluator<'_>,
    population: &mut [Individual],
) -> Result<(), GaError> {
    let mut ws = evaluator.workspace();
    for ind in population.iter_mut().filter(|ind| ind.fitness.is_none()) {
        ind.fitness = Some(evaluator.max_load(&ind.chromosome, &mut ws)?);
    }
    Ok(())
}

/// Produces the next generation from a ranked population.
fn breed<R: Rng>(ranked: &[Individual], config: &GaConfig, rng: &mut R) -> Vec<Individual> {
    let len = ranked[0].chromosome.len();
    let mut next = Vec::with_capacity(ranked.len());
    for pair in ranked.chunks_exact(2) {
        let (a, b) = if len >= 2 {
            let point = rng.gen_range(1..len);
            crossover(&pair[0], &pair[1], point).expect("point in range")
        } else {
            // a single gene has no interior crossing point
            (
                Individual::new(pair[0].chromosome.clone()),
                Individual::new(pair[1].chromosome.clone()),
            )
        };
        next.push(a);
        next.push(b);
    }
    next.into_iter().map(|c| mutate(c, config, rng)).collect()
}

pub fn optimize(
    graph: &NetworkGraph,
    flows: &FlowSet,
    config: &GaConfig,
) -> Result<OptimizationResult, GaError> {
    let start = Instant::now();
    config.validate()?;
    if graph.edge_count() == 0 {
        return Err(GaError::NoEdges);
    }
    let evaluator = Evaluator::new(graph, flows)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut population = init_population(config, graph.edge_count(), &mut rng);
    evaluate_all(&evaluator, &mut population)?;
    population = rank(population)?;

    let mut best = population[0].clone();
    let mut history = vec![best.fitness.expect("evaluated")];
    let mut generations = 1;
    let mut stagnation = 0;

    let stop_reason = loop {
        if generations >= config.max_generations {
            break StopReason::MaxGenerations;
        }
        if stagnation >= config.stagnation_limit {
            break StopReason::Stagnation;
        }

        let mut offspring = breed(&population, config, &mut rng);
        evaluate_all(&evaluator, &mut offspring)?;
        let worst = offspring
            .iter()
            .enumerate()
            .max_by_key(|(i, ind)| (ind.fitness, std::cmp::Reverse(*i)))
            .map(|(i, _)| i)
            .expect("non-empty population");
        offspring[worst] = population[0].clone();
        population = rank(offspring)?;
        generations += 1;

        if population[0].fitness < best.fitness {
            best = population[0].clone();
            stagnation = 0;
        } else {
            stagnation += 1;
        }
        history.push(best.fitness.expect("evaluated"));
    };

    let best_weights = WeightVector::new(best.chromosome, config.weight_max)?;
    let full = evaluator.evaluate(&best_weights)?;
    debug_assert_eq!(Some(full.max_load), best.fitness);

    Ok(OptimizationResult {
        best_weights,
        best_fitness: full.max_load,
        routing_table: full.routing_table,
        generations_run: generations,
        stop_reason,
        fitness_history: history,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_graph, Demand};

    fn evaluated(fitness: &[u64]) -> Vec<Individual> {
        fitness
            .iter()
            .enumerate()
            .map(|(i, &f)| Individual {
                chromosome: vec![i as u32 + 1],
                fitness: Some(f),
            })
            .collect()
    }

    fn fitnesses(pop: &[Individual]) -> Vec<u64> {
        pop.iter().map(|i| i.fitness.unwrap()).collect()
    }

    #[test]
    fn documented_defaults() {
        let c = GaConfig::default();
        assert_eq!(c.population_size, 50);
        assert_eq!(c.mutation_prob, 0.10);
        assert_eq!(c.max_generations, 500);
        assert_eq!(c.stagnation_limit, 100);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn config_validation() {
        let odd = GaConfig {
            population_size: 7,
            ..GaConfig::default()
        };
        assert_eq!(odd.validate(), Err(GaError::PopulationSize(7)));
        let sz = GaConfig {
            max_generations: 10,
            stagnation_limit: 11,
            ..GaConfig::default()
        };
        assert!(matches!(sz.validate(), Err(GaError::StagnationLimit { .. })));
        let mp = GaConfig {
            mutation_prob: 1.5,
            ..GaConfig::default()
        };
        assert!(mp.validate().is_err());
    }

    #[test]
    fn init_degenerate_range_is_all_ones() {
        let c = GaConfig {
            weight_max: 1,
            ..GaConfig::default()
        };
        let pop = init_population(&c, 6, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(pop.iter().all(|i| i.chromosome == vec![1; 6]));
    }

    #[test]
    fn init_n10e39_shape() {
        let c = GaConfig::default();
        let pop = init_population(&c, 39, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(pop.len(), 50);
        assert!(pop
            .iter()
            .all(|i| i.chromosome.len() == 39 && i.chromosome.iter().all(|g| (1..=9).contains(g))));
        let again = init_population(&c, 39, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(pop, again);
    }

    #[test]
    fn rank_orders_ascending_and_stably() {
        assert_eq!(fitnesses(&rank(evaluated(&[5, 2, 9])).unwrap()), vec![2, 5, 9]);

        let same = evaluated(&[4, 4, 4]);
        assert_eq!(rank(same.clone()).unwrap(), same);

        let r = rank(evaluated(&[3, 3, 1])).unwrap();
        assert_eq!(fitnesses(&r), vec![1, 3, 3]);
        assert_eq!(r[1].chromosome, vec![1]);
        assert_eq!(r[2].chromosome, vec![2]);

        let mut pop = evaluated(&[1, 2]);
        pop[1].fitness = None;
        assert_eq!(rank(pop), Err(GaError::Unevaluated(1)));
    }

    #[test]
    fn one_point_crossover() {
        let a = Individual::new(vec![1, 1, 1, 1]);
        let b = Individual::new(vec![2, 2, 2, 2]);
        let (c, d) = crossover(&a, &b, 2).unwrap();
        assert_eq!(c.chromosome, vec![1, 1, 2, 2]);
        assert_eq!(d.chromosome, vec![2, 2, 1, 1]);

        for p in 1..4 {
            let (c, d) = crossover(&a, &a, p).unwrap();
            assert_eq!(c.chromosome, a.chromosome);
            assert_eq!(d.chromosome, a.chromosome);
        }

        assert_eq!(
            crossover(&a, &b, 4),
            Err(GaError::CrossoverPoint { point: 4, len: 4 })
        );
        assert!(crossover(&a, &b, 0).is_err());
    }

    #[test]
    fn mutation_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let never = GaConfig {
            mutation_prob: 0.0,
            ..GaConfig::default()
        };
        let ind = Individual::new(vec![3, 4, 5]);
        for _ in 0..100 {
            assert_eq!(mutate(ind.clone(), &never, &mut rng).chromosome, ind.chromosome);
        }

        let ones = GaConfig {
            mutation_prob: 1.0,
            weight_max: 1,
            ..GaConfig::default()
        };
        let ind = Individual::new(vec![1, 1, 1]);
        assert_eq!(mutate(ind.clone(), &ones, &mut rng).chromosome, ind.chromosome);
    }

    #[test]
    fn seeded_single_gene_mutation_regression() {
        let always = GaConfig {
            mutation_prob: 1.0,
            weight_max: 9,
            ..GaConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = mutate(Individual::new(vec![1]), &always, &mut rng);
        // recorded once from ChaCha8Rng seed 42
        assert_eq!(m.chromosome, vec![4]);
        assert_eq!(m.fitness, None);
    }

    #[test]
    fn one_generation_stops_on_max_generations() {
        let g = build_graph(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 2, 1)]).unwrap();
        let c = GaConfig {
            max_generations: 1,
            stagnation_limit: 1,
            ..GaConfig::default()
        };
        let r = optimize(&g, &flows, &c).unwrap();
        assert_eq!(r.generations_run, 1);
        assert_eq!(r.stop_reason, StopReason::MaxGenerations);
        assert_eq!(r.fitness_history.len(), 1);
    }

    #[test]
    fn disjoint_chains_are_optimal_immediately() {
        let g = build_graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 2, 2), Demand::new(3, 5, 3)]).unwrap();
        let r = optimize(&g, &flows, &GaConfig::default()).unwrap();
        assert_eq!(r.best_fitness, 3);
        assert_eq!(r.fitness_history[0], 3);
        assert_eq!(r.stop_reason, StopReason::Stagnation);
        assert_eq!(r.generations_run, 101);
    }

    #[test]
    fn rejects_odd_population_and_unreachable() {
        let g = build_graph(2, [(0, 1)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(1, 0, 1)]).unwrap();
        let odd = GaConfig {
            population_size: 3,
            ..GaConfig::default()
        };
        assert_eq!(optimize(&g, &flows, &odd).unwrap_err(), GaError::PopulationSize(3));
        assert_eq!(
            optimize(&g, &flows, &GaConfig::default()).unwrap_err(),
            GaError::Routing(RoutingError::Unreachable { src: 1, dst: 0 })
        );
    }

    #[test]
    fn single_edge_graph_runs() {
        let g = build_graph(2, [(0, 1)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 1, 4)]).unwrap();
        let r = optimize(&g, &flows, &GaConfig::default()).unwrap();
        assert_eq!(r.best_fitness, 4);
    }
}
