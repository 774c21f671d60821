//! Comparison optimizers: exhaustive search, an ant-colony route builder and
//! random-weight shortest paths.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{FlowSet, ModelError, NetworkGraph, NodeId, WeightVector};
use crate::routing::{Evaluator, Path, RoutingError, RoutingTable};

/// Largest weight space [`brute_force`] will enumerate.
pub const BRUTE_FORCE_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("search space of {candidates} weight vectors exceeds the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error("invalid ant colony configuration: {0}")]
    AcoConfig(&'static str),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

impl From<ModelError> for BaselineError {
    fn from(e: ModelError) -> Self {
        BaselineError::Routing(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    BruteForce,
    AntColony,
    Dspa,
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::BruteForce => "BF",
            BaselineKind::AntColony => "ACOLB",
            BaselineKind::Dspa => "DSPA",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Weights(WeightVector),
    Routes(RoutingTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub kind: BaselineKind,
    pub max_load: u64,
    pub solution: Solution,
    pub elapsed: Duration,
}

impl BaselineResult {
    pub fn weights(&self) -> Option<&WeightVector> {
        match &self.solution {
            Solution::Weights(w) => Some(w),
            Solution::Routes(_) => None,
        }
    }

    pub fn routes(&self) -> Option<&RoutingTable> {
        match &self.solution {
            Solution::Routes(r) => Some(r),
            Solution::Weights(_) => None,
        }
    }
}

/// Number of weight vectors in `[1, v]^edge_count`, saturating.
pub fn search_space(edge_count: usize, weight_max: u32) -> u128 {
    let mut n: u128 = 1;
    for _ in 0..edge_count {
        n = n.saturating_mul(u128::from(weight_max));
    }
    n
}

pub fn brute_force(
    graph: &NetworkGraph,
    flows: &FlowSet,
    weight_max: u32,
) -> Result<BaselineResult, BaselineError> {
    brute_force_with_budget(graph, flows, weight_max, BRUTE_FORCE_BUDGET)
}

/// Enumerates every weight vector in lexicographic order (last gene fastest)
/// and keeps the first one reaching the minimum, i.e. the lexicographically
/// smallest optimum.
pub fn brute_force_with_budget(
    graph: &NetworkGraph,
    flows: &FlowSet,
    weight_max: u32,
    budget: u128,
) -> Result<BaselineResult, BaselineError> {
    let start = Instant::now();
    if weight_max == 0 {
        return Err(ModelError::ZeroWeightMax.into());
    }
    let candidates = search_space(graph.edge_count(), weight_max);
    if candidates > budget {
        return Err(BaselineError::BudgetExceeded { candidates, budget });
    }
    let evaluator = Evaluator::new(graph, flows)?;
    let mut ws = evaluator.workspace();

    // no weighting can push the busiest edge below the largest single demand
    let floor = flows
        .demands()
        .iter()
        .map(|d| u64::from(d.units))
        .max()
        .unwrap_or(0);

    let mut current = vec![1u32; graph.edge_count()];
    let mut best = current.clone();
    let mut best_load = evaluator.max_load(&current, &mut ws)?;
    while best_load > floor && advance(&mut current, weight_max) {
        let load = evaluator.max_load(&current, &mut ws)?;
        if load < best_load {
            best_load = load;
            best.copy_from_slice(&current);
        }
    }

    Ok(BaselineResult {
        kind: BaselineKind::BruteForce,
        max_load: best_load,
        solution: Solution::Weights(WeightVector::new(best, weight_max)?),
        elapsed: start.elapsed(),
    })
}

/// Odometer step; false once every vector has been visited.
fn advance(genes: &mut [u32], weight_max: u32) -> bool {
    for g in genes.iter_mut().rev() {
        if *g < weight_max {
            *g += 1;
            return true;
        }
        *g = 1;
    }
    false
}

/// One uniform weight draw, evaluated once.
pub fn dspa_route(
    graph: &NetworkGraph,
    flows: &FlowSet,
    weight_max: u32,
    seed: u64,
) -> Result<BaselineResult, BaselineError> {
    let start = Instant::now();
    if weight_max == 0 {
        return Err(ModelError::ZeroWeightMax.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = WeightVector::new(random_weights(graph.edge_count(), weight_max, &mut rng), weight_max)?;
    let evaluator = Evaluator::new(graph, flows)?;
    let max_load = evaluator.max_load(weights.weights(), &mut evaluator.workspace())?;
    Ok(BaselineResult {
        kind: BaselineKind::Dspa,
        max_load,
        solution: Solution::Weights(weights),
        elapsed: start.elapsed(),
    })
}

/// Draws `len` genes uniform over `[1, weight_max]`; the draw used by [`dspa_route`].
pub fn random_weights<R: Rng>(len: usize, weight_max: u32, rng: &mut R) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(1..=weight_max)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcoConfig {
    pub ant_count: usize,
    pub iterations: usize,
    pub evaporation_rate: f64,
    /// α
    pub pheromone_exponent: f64,
    /// β
    pub heuristic_exponent: f64,
    pub seed: u64,
}

impl Default for AcoConfig {
    fn default() -> Self {
        AcoConfig {
            ant_count: 10,
            iterations: 10,
            evaporation_rate: 0.5,
            pheromone_exponent: 1.0,
            heuristic_exponent: 2.0,
            seed: 0,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.ant_count == 0 {
            return Err(BaselineError::AcoConfig("ant_count must be at least 1"));
        }
        if self.iterations == 0 {
            return Err(BaselineError::AcoConfig("iterations must be at least 1"));
        }
        if !(self.evaporation_rate > 0.0 && self.evaporation_rate < 1.0) {
            return Err(BaselineError::AcoConfig("evaporation_rate must be in (0, 1)"));
        }
        if !(self.pheromone_exponent >= 0.0 && self.heuristic_exponent >= 0.0) {
            return Err(BaselineError::AcoConfig("exponents must be non-negative"));
        }
        Ok(())
    }
}

/// Walks longer than this fall back to a hop-count shortest path from the
/// ant's current node.
fn step_cap(graph: &NetworkGraph) -> usize {
    4 * graph.node_count() * graph.node_count()
}

struct Colony<'a> {
    graph: &'a NetworkGraph,
    flows: &'a FlowSet,
    config: &'a AcoConfig,
    pheromone: Vec<f64>,
    // hops_to[table_of_dest[d]][u]: hop distance from u to d, u32::MAX if unreachable
    table_of_dest: Vec<usize>,
    hops_to: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Default)]
struct AntSolution {
    // concatenated routes; route i is steps[ends[i - 1]..ends[i]]
    steps: Vec<usize>,
    ends: Vec<usize>,
    max_load: u64,
}

impl AntSolution {
    fn routes(&self) -> impl Iterator<Item = &[usize]> {
        let mut begin = 0;
        self.ends.iter().map(move |&end| {
            let r = &self.steps[begin..end];
            begin = end;
            r
        })
    }
}

#[derive(Default)]
struct Scratch {
    loads: Vec<u64>,
    probs: Vec<f64>,
}

impl<'a> Colony<'a> {
    fn new(graph: &'a NetworkGraph, flows: &'a FlowSet, config: &'a AcoConfig) -> Result<Self, BaselineError> {
        let n = graph.node_count();
        let mut table_of_dest = vec![usize::MAX; n];
        let mut hops_to = Vec::new();
        for d in flows.demands() {
            if table_of_dest[d.dst] == usize::MAX {
                table_of_dest[d.dst] = hops_to.len();
                hops_to.push(reverse_hops(graph, d.dst));
            }
            if hops_to[table_of_dest[d.dst]][d.src] == u32::MAX {
                return Err(RoutingError::Unreachable { src: d.src, dst: d.dst }.into());
            }
        }
        Ok(Colony {
            graph,
            flows,
            config,
            pheromone: vec![1.0; graph.edge_count()],
            table_of_dest,
            hops_to,
        })
    }

    /// Builds one ant's route set into `out`.
    fn construct<R: Rng>(&self, rng: &mut R, scratch: &mut Scratch, out: &mut AntSolution) {
        let edges = self.graph.edges();
        let cap = step_cap(self.graph);
        let (alpha, beta) = (self.config.pheromone_exponent, self.config.heuristic_exponent);
        let loads = &mut scratch.loads;
        loads.clear();
        loads.resize(self.graph.edge_count(), 0);
        out.steps.clear();
        out.ends.clear();
        for d in self.flows.demands() {
            let hops = &self.hops_to[self.table_of_dest[d.dst]];
            let mut cur = d.src;
            let mut taken = 0;
            while cur != d.dst {
                let range = self.graph.out_edge_range(cur);
                let idx = if taken < cap {
                    scratch.probs.clear();
                    scratch.probs.extend(range.clone().map(|e| {
                        if hops[edges[e].dst] == u32::MAX {
                            0.0
                        } else {
                            pow(self.pheromone[e], alpha) * pow(1.0 / (loads[e] as f64 + 1.0), beta)
                        }
                    }));
                    range.start + roulette(&scratch.probs, rng)
                } else {
                    range.min_by_key(|&e| hops[edges[e].dst]).expect("cur reaches dst")
                };
                loads[idx] += u64::from(d.units);
                out.steps.push(idx);
                taken += 1;
                cur = edges[idx].dst;
            }
            out.ends.push(out.steps.len());
        }
        out.max_load = loads.iter().copied().max().unwrap_or(0);
    }

    fn update(&mut self, best: &AntSolution) {
        let keep = 1.0 - self.config.evaporation_rate;
        for t in &mut self.pheromone {
            *t *= keep;
        }
        let deposit = 1.0 / best.max_load.max(1) as f64;
        for &e in &best.steps {
            self.pheromone[e] += deposit;
        }
    }

    fn to_table(&self, solution: &AntSolution) -> RoutingTable {
        let edges = self.graph.edges();
        RoutingTable {
            rows: self
                .flows
                .demands()
                .iter()
                .zip(solution.routes())
                .map(|(d, r)| Path {
                    demand: *d,
                    edges: r.iter().map(|&e| edges[e]).collect(),
                    total_weight: r.len() as u64,
                })
                .collect(),
        }
    }
}

fn pow(x: f64, exponent: f64) -> f64 {
    if exponent == 1.0 {
        x
    } else if exponent == 2.0 {
        x * x
    } else {
        x.powf(exponent)
    }
}

fn roulette<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.gen_range(0..weights.len());
    }
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

/// Hop distance from every node to `dest` (u32::MAX when unreachable).
fn reverse_hops(graph: &NetworkGraph, dest: NodeId) -> Vec<u32> {
    let n = graph.node_count();
    let mut incoming: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for e in graph.edges() {
        incoming[e.dst].push(e.src);
    }
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[dest] = 0;
    queue.push_back(dest);
    while let Some(v) = queue.pop_front() {
        for &u in &incoming[v] {
            if dist[u] == u32::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Ant-system route construction.
///
/// Every ant builds one route per demand by walking from the source and
/// choosing each outgoing edge with probability proportional to
/// `τ^α · (1 / (load + 1))^β`, where `τ` is the edge's pheromone trail and
/// `load` is the traffic the ant has already placed on the edge. Edges leading
/// to nodes that cannot reach the destination are never chosen; walks are not
/// otherwise loop-free. After each iteration all trails evaporate by
/// `evaporation_rate` and the iteration's best ant deposits `1 / max_load`
/// on every edge of its routes. The best route set seen is returned.
pub fn aco_optimize(
    graph: &NetworkGraph,
    flows: &FlowSet,
    config: &AcoConfig,
) -> Result<BaselineResult, BaselineError> {
    let start = Instant::now();
    config.validate()?;
    flows.check_for(graph)?;
    let mut colony = Colony::new(graph, flows, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut scratch = Scratch::default();

    let mut ant = AntSolution::default();
    let mut iteration_best = AntSolution::default();
    let mut best: Option<AntSolution> = None;
    for _ in 0..config.iterations {
        for k in 0..config.ant_count {
            colony.construct(&mut rng, &mut scratch, &mut ant);
            if k == 0 || ant.max_load < iteration_best.max_load {
                std::mem::swap(&mut ant, &mut iteration_best);
            }
        }
        colony.update(&iteration_best);
        if best.as_ref().is_none_or(|b| iteration_best.max_load < b.max_load) {
            best = Some(iteration_best.clone());
        }
    }
    let best = best.expect("iterations >= 1");

    Ok(BaselineResult {
        kind: BaselineKind::AntColony,
        max_load: best.max_load,
        solution: Solution::Routes(colony.to_table(&best)),
        elapsed: start.elapsed(),
    })
}

/// Max load of an explicit route set; used to re-check route-based results.
pub fn route_max_load(graph: &NetworkGraph, routes: &RoutingTable) -> Result<u64, ModelError> {
    Ok(routes.loads(graph)?.max())
}
