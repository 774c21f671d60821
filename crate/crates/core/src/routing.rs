//! Shortest-path routing and the max-link-load fitness function.
//!
//! Dijkstra settles nodes by `(distance, node index)` and only replaces a
//! predecessor on strict improvement, so among equal-weight paths the result
//! is fully determined by the graph's canonical edge order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::model::{Demand, Edge, FlowSet, LoadMatrix, ModelError, NetworkGraph, NodeId, WeightVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("no directed path from {src} to {dst}")]
    Unreachable { src: NodeId, dst: NodeId },
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Route taken by one demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub demand: Demand,
    pub edges: Vec<Edge>,
    /// Sum of the traversed edge weights; hop count for routes built without weights.
    pub total_weight: u64,
}

impl Path {
    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }

    /// Checks that the edges form a walk from the demand's source to its
    /// destination using only edges of `graph`.
    pub fn is_valid_in(&self, graph: &NetworkGraph) -> bool {
        let Some(first) = self.edges.first() else {
            return false;
        };
        let last = self.edges[self.edges.len() - 1];
        first.src == self.demand.src
            && last.dst == self.demand.dst
            && self.edges.windows(2).all(|w| w[0].dst == w[1].src)
            && self.edges.iter().all(|e| graph.has_edge(e.src, e.dst))
    }
}

/// One path per demand, in the order of the flow set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoutingTable {
    pub rows: Vec<Path>,
}

impl RoutingTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Accumulates each row's units along its edges.
    pub fn loads(&self, graph: &NetworkGraph) -> Result<LoadMatrix, ModelError> {
        let mut loads = LoadMatrix::zeros(graph.node_count());
        for row in &self.rows {
            loads.accumulate(graph, &row.edges, row.demand.units)?;
        }
        Ok(loads)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitnessResult {
    pub max_load: u64,
    pub loads: LoadMatrix,
    pub routing_table: RoutingTable,
}

/// Row-major load vector `VL` of length `N²`.
pub fn flatten_loads(result: &FitnessResult) -> Vec<u64> {
    result.loads.as_vector().to_vec()
}

const UNSETTLED: u64 = u64::MAX;
const NO_PRED: usize = usize::MAX;

/// Reusable Dijkstra state.
#[derive(Debug, Clone)]
pub(crate) struct Dijkstra {
    dist: Vec<u64>,
    pred: Vec<usize>,
    settled: Vec<bool>,
    wanted: Vec<bool>,
    heap: BinaryHeap<Reverse<(u64, NodeId)>>,
}

impl Dijkstra {
    pub(crate) fn new(node_count: usize) -> Self {
        Dijkstra {
            dist: vec![UNSETTLED; node_count],
            pred: vec![NO_PRED; node_count],
            settled: vec![false; node_count],
            wanted: vec![false; node_count],
            heap: BinaryHeap::new(),
        }
    }

    /// Grows the shortest-path tree from `source` until every node in
    /// `targets` is settled or the reachable set is exhausted.
    pub(crate) fn run(
        &mut self,
        graph: &NetworkGraph,
        weights: &[u32],
        source: NodeId,
        targets: &[NodeId],
    ) {
        self.dist.fill(UNSETTLED);
        self.pred.fill(NO_PRED);
        self.settled.fill(false);
        self.heap.clear();

        let mut remaining = 0;
        for &t in targets {
            if !self.wanted[t] {
                self.wanted[t] = true;
                remaining += 1;
            }
        }

        let edges = graph.edges();
        self.dist[source] = 0;
        self.heap.push(Reverse((0, source)));
        while let Some(Reverse((d, u))) = self.heap.pop() {
            if self.settled[u] {
                continue;
            }
            self.settled[u] = true;
            if self.wanted[u] {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            for idx in graph.out_edge_range(u) {
                let v = edges[idx].dst;
                if self.settled[v] {
                    continue;
                }
                let nd = d + u64::from(weights[idx]);
                if nd < self.dist[v] {
                    self.dist[v] = nd;
                    self.pred[v] = idx;
                    self.heap.push(Reverse((nd, v)));
                }
            }
        }

        for &t in targets {
            self.wanted[t] = false;
        }
    }

    pub(crate) fn reached(&self, node: NodeId) -> bool {
        self.settled[node]
    }

    pub(crate) fn distance(&self, node: NodeId) -> u64 {
        self.dist[node]
    }

    /// Calls `f` with each edge index on the tree path to `node`, from `node` backwards.
    pub(crate) fn walk_back(&self, graph: &NetworkGraph, node: NodeId, mut f: impl FnMut(usize)) {
        let edges = graph.edges();
        let mut cur = node;
        while self.pred[cur] != NO_PRED {
            let idx = self.pred[cur];
            f(idx);
            cur = edges[idx].src;
        }
    }

    fn path_to(&self, graph: &NetworkGraph, node: NodeId) -> Vec<Edge> {
        let mut path = Vec::new();
        self.walk_back(graph, node, |idx| path.push(graph.edges()[idx]));
        path.reverse();
        path
    }
}

/// Minimum-weight directed path from `source` to `dest`.
pub fn shortest_path(
    graph: &NetworkGraph,
    weights: &WeightVector,
    source: NodeId,
    dest: NodeId,
) -> Result<Path, RoutingError> {
    weights.check_for(graph)?;
    let n = graph.node_count();
    if source >= n || dest >= n {
        return Err(ModelError::DemandOutOfRange {
            src: source,
            dst: dest,
            node_count: n,
        }
        .into());
    }
    if source == dest {
        return Err(RoutingError::SameEndpoints(source));
    }
    let mut dj = Dijkstra::new(n);
    dj.run(graph, weights.weights(), source, &[dest]);
    if !dj.reached(dest) {
        return Err(RoutingError::Unreachable {
            src: source,
            dst: dest,
        });
    }
    Ok(Path {
        demand: Demand::new(source, dest, 1),
        edges: dj.path_to(graph, dest),
        total_weight: dj.distance(dest),
    })
}

#[derive(Debug, Clone)]
struct SourceGroup {
    source: NodeId,
    targets: Vec<NodeId>,
    // (index into the flow set, units)
    members: Vec<(usize, u32)>,
}

/// Scratch buffers for [`Evaluator::max_load`]; one per worker.
#[derive(Debug, Clone)]
pub struct Workspace {
    dijkstra: Dijkstra,
    edge_loads: Vec<u64>,
}

/// Fitness evaluation for a fixed graph and flow set.
///
/// Demands sharing a source are served from a single shortest-path tree.
/// The tree path to each destination is identical to what a per-demand
/// search would return, because settle order does not depend on the target.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    graph: &'a NetworkGraph,
    flows: &'a FlowSet,
    groups: Vec<SourceGroup>,
}

impl<'a> Evaluator<'a> {
    pub fn new(graph: &'a NetworkGraph, flows: &'a FlowSet) -> Result<Self, RoutingError> {
        flows.check_for(graph)?;
        let mut by_source: Vec<Option<SourceGroup>> = vec![None; graph.node_count()];
        for (i, d) in flows.demands().iter().enumerate() {
            let g = by_source[d.src].get_or_insert_with(|| SourceGroup {
                source: d.src,
                targets: Vec::new(),
                members: Vec::new(),
            });
            g.targets.push(d.dst);
            g.members.push((i, d.units));
        }
        Ok(Evaluator {
            graph,
            flows,
            groups: by_source.into_iter().flatten().collect(),
        })
    }

    pub fn graph(&self) -> &NetworkGraph {
        self.graph
    }

    pub fn flows(&self) -> &FlowSet {
        self.flows
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            dijkstra: Dijkstra::new(self.graph.node_count()),
            edge_loads: vec![0; self.graph.edge_count()],
        }
    }

    /// `max(l_ij)` under `weights`, without building the routing table.
    pub fn max_load(&self, weights: &[u32], ws: &mut Workspace) -> Result<u64, RoutingError> {
        if weights.len() != self.graph.edge_count() {
            return Err(ModelError::LengthMismatch {
                expected: self.graph.edge_count(),
                actual: weights.len(),
            }
            .into());
        }
        ws.edge_loads.fill(0);
        for g in &self.groups {
            ws.dijkstra.run(self.graph, weights, g.source, &g.targets);
            for (&t, &(_, units)) in g.targets.iter().zip(&g.members) {
                if !ws.dijkstra.reached(t) {
                    return Err(RoutingError::Unreachable {
                        src: g.source,
                        dst: t,
                    });
                }
                let loads = &mut ws.edge_loads;
                ws.dijkstra
                    .walk_back(self.graph, t, |idx| loads[idx] += u64::from(units));
            }
        }
        Ok(ws.edge_loads.iter().copied().max().unwrap_or(0))
    }

    /// Full evaluation: routing table, load matrix and maximum load.
    pub fn evaluate(&self, weights: &WeightVector) -> Result<FitnessResult, RoutingError> {
        weights.check_for(self.graph)?;
        let demands = self.flows.demands();
        let mut rows: Vec<Option<Path>> = vec![None; demands.len()];
        let mut dj = Dijkstra::new(self.graph.node_count());
        let mut edge_loads = vec![0u64; self.graph.edge_count()];
        for g in &self.groups {
            dj.run(self.graph, weights.weights(), g.source, &g.targets);
            for (&t, &(i, units)) in g.targets.iter().zip(&g.members) {
                if !dj.reached(t) {
                    return Err(RoutingError::Unreachable {
                        src: g.source,
                        dst: t,
                    });
                }
                let edges = dj.path_to(self.graph, t);
                for e in &edges {
                    let idx = self.graph.edge_index(e.src, e.dst).expect("tree edge");
                    edge_loads[idx] += u64::from(units);
                }
                rows[i] = Some(Path {
                    demand: demands[i],
                    edges,
                    total_weight: dj.distance(t),
                });
            }
        }
        let loads = LoadMatrix::from_edge_loads(self.graph, &edge_loads);
        Ok(FitnessResult {
            max_load: loads.max(),
            loads,
            routing_table: RoutingTable {
                rows: rows.into_iter().map(|r| r.expect("every demand routed")).collect(),
            },
        })
    }
}

/// Routes every demand along its shortest path under `weights` and returns
/// the resulting loads. Flows are routed independently of each other.
pub fn evaluate_fitness(
    graph: &NetworkGraph,
    weights: &WeightVector,
    flows: &FlowSet,
) -> Result<FitnessResult, RoutingError> {
    Evaluator::new(graph, flows)?.evaluate(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_graph;

    fn unit(graph: &NetworkGraph) -> WeightVector {
        WeightVector::uniform(graph.edge_count(), 9).unwrap()
    }

    fn pairs(p: &Path) -> Vec<(usize, usize)> {
        p.edges.iter().map(|e| (e.src, e.dst)).collect()
    }

    #[test]
    fn chain_has_unique_path() {
        let g = build_graph(3, [(0, 1), (1, 2)]).unwrap();
        let w = WeightVector::new(vec![7, 3], 9).unwrap();
        let p = shortest_path(&g, &w, 0, 2).unwrap();
        assert_eq!(pairs(&p), vec![(0, 1), (1, 2)]);
        assert_eq!(p.total_weight, 10);
        assert!(p.is_valid_in(&g));
    }

    #[test]
    fn dominated_alternative_is_skipped() {
        let g = build_graph(4, [(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        // canonical order: (0,1) (0,2) (1,3) (2,3)
        let w = WeightVector::new(vec![1, 5, 1, 5], 9).unwrap();
        let p = shortest_path(&g, &w, 0, 3).unwrap();
        assert_eq!(pairs(&p), vec![(0, 1), (1, 3)]);
        assert_eq!(p.total_weight, 2);
    }

    #[test]
    fn directed_asymmetry_is_unreachable() {
        let g = build_graph(2, [(0, 1)]).unwrap();
        assert_eq!(
            shortest_path(&g, &unit(&g), 1, 0),
            Err(RoutingError::Unreachable { src: 1, dst: 0 })
        );
        assert_eq!(
            shortest_path(&g, &unit(&g), 0, 0),
            Err(RoutingError::SameEndpoints(0))
        );
    }

    #[test]
    fn equal_weight_tie_goes_to_lower_index_predecessor() {
        // 0->1->3 and 0->2->3 both cost 2; node 1 settles first and claims 3.
        let g = build_graph(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let p = shortest_path(&g, &unit(&g), 0, 3).unwrap();
        assert_eq!(pairs(&p), vec![(0, 1), (1, 3)]);
        // a direct edge found first is kept against an equal-cost detour
        let g = build_graph(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let w = WeightVector::new(vec![1, 2, 1], 9).unwrap();
        let p = shortest_path(&g, &w, 0, 2).unwrap();
        assert_eq!(pairs(&p), vec![(0, 2)]);
    }

    #[test]
    fn single_flow_on_chain() {
        let g = build_graph(3, [(0, 1), (1, 2)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 2, 1)]).unwrap();
        let r = evaluate_fitness(&g, &unit(&g), &flows).unwrap();
        assert_eq!(r.max_load, 1);
        assert_eq!(r.loads.get(0, 1), 1);
        assert_eq!(r.loads.get(1, 2), 1);
        assert_eq!(r.routing_table.len(), 1);
        let vl = flatten_loads(&r);
        assert_eq!(vl.len(), 9);
        assert_eq!(vl.iter().filter(|&&x| x == 1).count(), 2);
        assert_eq!(vl.iter().sum::<u64>(), 2);
    }

    #[test]
    fn overlapping_flows_add_up() {
        let g = build_graph(3, [(0, 1), (1, 2)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 2, 1), Demand::new(1, 2, 1)]).unwrap();
        let r = evaluate_fitness(&g, &unit(&g), &flows).unwrap();
        assert_eq!(r.loads.get(1, 2), 2);
        assert_eq!(r.max_load, 2);
    }

    #[test]
    fn units_weight_the_load() {
        let g = build_graph(3, [(0, 1), (1, 2)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 2, 3), Demand::new(1, 2, 2)]).unwrap();
        let r = evaluate_fitness(&g, &unit(&g), &flows).unwrap();
        assert_eq!(r.loads.get(0, 1), 3);
        assert_eq!(r.loads.get(1, 2), 5);
        assert_eq!(r.max_load, 5);
    }

    #[test]
    fn unreachable_demand_is_reported() {
        let g = build_graph(3, [(0, 1), (1, 2)]).unwrap();
        let flows = FlowSet::new(vec![Demand::new(0, 2, 1), Demand::new(2, 0, 1)]).unwrap();
        assert_eq!(
            evaluate_fitness(&g, &unit(&g), &flows),
            Err(RoutingError::Unreachable { src: 2, dst: 0 })
        );
    }

    #[test]
    fn flatten_definition() {
        let g = build_graph(2, [(0, 1), (1, 0)]).unwrap();
        let flows = FlowSet::new(vec![
            Demand::new(0, 1, 3),
            Demand::new(1, 0, 1),
        ])
        .unwrap();
        let r = evaluate_fitness(&g, &unit(&g), &flows).unwrap();
        assert_eq!(flatten_loads(&r), vec![0, 3, 1, 0]);

        let empty = evaluate_fitness(&g, &unit(&g), &FlowSet::empty()).unwrap();
        assert_eq!(flatten_loads(&empty), vec![0; 4]);
        assert_eq!(empty.max_load, 0);
    }

    #[test]
    fn fast_path_matches_full_evaluation() {
        let g = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let flows = FlowSet::new(vec![
            Demand::new(0, 2, 1),
            Demand::new(0, 3, 1),
            Demand::new(3, 2, 2),
            Demand::new(1, 0, 1),
        ])
        .unwrap();
        let ev = Evaluator::new(&g, &flows).unwrap();
        let mut ws = ev.workspace();
        for w in [[1, 1, 1, 1, 1], [5, 1, 1, 2, 3], [1, 5, 1, 1, 1]] {
            let wv = WeightVector::new(w.to_vec(), 5).unwrap();
            let full = ev.evaluate(&wv).unwrap();
            assert_eq!(ev.max_load(&w, &mut ws).unwrap(), full.max_load);
            assert_eq!(full.routing_table.loads(&g).unwrap(), full.loads);
        }
    }
}
