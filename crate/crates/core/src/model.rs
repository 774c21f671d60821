//! Graph, weight, flow and load representations.
//!
//! Nodes are dense indices `0..node_count`. Edges are kept in canonical
//! lexicographic `(src, dst)` order, and that order is the gene order of
//! every chromosome: weight `i` always belongs to `graph.edges()[i]`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = usize;

/// A directed link `src -> dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId) -> Self {
        Edge { src, dst }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({},{})", self.src, self.dst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("self-loop ({0},{0}) is not allowed")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({src},{dst})")]
    DuplicateEdge { src: NodeId, dst: NodeId },
    #[error("edge ({src},{dst}) has an endpoint outside 0..{node_count}")]
    EdgeOutOfRange {
        src: NodeId,
        dst: NodeId,
        node_count: usize,
    },
    #[error("weight_max must be at least 1")]
    ZeroWeightMax,
    #[error("weight {weight} at gene {index} is outside [1, {weight_max}]")]
    WeightOutOfRange {
        index: usize,
        weight: u32,
        weight_max: u32,
    },
    #[error("weight vector has {actual} genes but the graph has {expected} edges")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("demand ({0},{0}) has identical source and destination")]
    SelfDemand(NodeId),
    #[error("demand ({src},{dst}) has zero units")]
    ZeroUnits { src: NodeId, dst: NodeId },
    #[error("more than one demand for pair ({src},{dst})")]
    DuplicateDemand { src: NodeId, dst: NodeId },
    #[error("demand ({src},{dst}) references a node outside 0..{node_count}")]
    DemandOutOfRange {
        src: NodeId,
        dst: NodeId,
        node_count: usize,
    },
    #[error("flow granularity must be positive")]
    ZeroGranularity,
    #[error("edge ({src},{dst}) is not in the graph")]
    UnknownEdge { src: NodeId, dst: NodeId },
}

/// Directed network topology (adjacency matrix `M`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGraph {
    node_count: usize,
    edges: Vec<Edge>,
    // edges of node u are edges[out_offsets[u]..out_offsets[u + 1]]
    out_offsets: Vec<usize>,
    // row-major N x N, usize::MAX where no edge
    lookup: Vec<usize>,
}

const NO_EDGE: usize = usize::MAX;

/// Builds a graph from a list of directed pairs, rejecting self-loops,
/// duplicates and out-of-range endpoints.
pub fn build_graph<I>(node_count: usize, edge_list: I) -> Result<NetworkGraph, ModelError>
where
    I: IntoIterator<Item = (NodeId, NodeId)>,
{
    if node_count == 0 {
        return Err(ModelError::NoNodes);
    }
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (src, dst) in edge_list {
        if src >= node_count || dst >= node_count {
            return Err(ModelError::EdgeOutOfRange {
                src,
                dst,
                node_count,
            });
        }
        if src == dst {
            return Err(ModelError::SelfLoop(src));
        }
        if !seen.insert((src, dst)) {
            return Err(ModelError::DuplicateEdge { src, dst });
        }
        edges.push(Edge::new(src, dst));
    }
    edges.sort_unstable();

    let mut out_offsets = vec![0; node_count + 1];
    for e in &edges {
        out_offsets[e.src + 1] += 1;
    }
    for u in 0..node_count {
        out_offsets[u + 1] += out_offsets[u];
    }
    let mut lookup = vec![NO_EDGE; node_count * node_count];
    for (idx, e) in edges.iter().enumerate() {
        lookup[e.src * node_count + e.dst] = idx;
    }

    Ok(NetworkGraph {
        node_count,
        edges,
        out_offsets,
        lookup,
    })
}

impl NetworkGraph {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical (chromosome) order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Canonical index of edge `(src, dst)`, if present.
    pub fn edge_index(&self, src: NodeId, dst: NodeId) -> Option<usize> {
        if src >= self.node_count || dst >= self.node_count {
            return None;
        }
        match self.lookup[src * self.node_count + dst] {
            NO_EDGE => None,
            idx => Some(idx),
        }
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.edge_index(src, dst).is_some()
    }

    /// Range of canonical edge indices leaving `node`, in ascending destination order.
    pub fn out_edge_range(&self, node: NodeId) -> std::ops::Range<usize> {
        self.out_offsets[node]..self.out_offsets[node + 1]
    }

    /// 0/1 adjacency matrix, row-major.
    pub fn adjacency(&self) -> Vec<u8> {
        self.lookup.iter().map(|&i| u8::from(i != NO_EDGE)).collect()
    }
}

/// One weight per edge in canonical order (the chromosome `VW`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    weights: Vec<u32>,
    weight_max: u32,
}

impl WeightVector {
    pub fn new(weights: Vec<u32>, weight_max: u32) -> Result<Self, ModelError> {
        if weight_max == 0 {
            return Err(ModelError::ZeroWeightMax);
        }
        if let Some((index, &weight)) = weights
            .iter()
            .enumerate()
            .find(|(_, &w)| w == 0 || w > weight_max)
        {
            return Err(ModelError::WeightOutOfRange {
                index,
                weight,
                weight_max,
            });
        }
        Ok(WeightVector {
            weights,
            weight_max,
        })
    }

    /// All-ones vector (hop-count routing).
    pub fn uniform(len: usize, weight_max: u32) -> Result<Self, ModelError> {
        Self::new(vec![1; len], weight_max)
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight_max(&self) -> u32 {
        self.weight_max
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn check_for(&self, graph: &NetworkGraph) -> Result<(), ModelError> {
        if self.weights.len() != graph.edge_count() {
            return Err(ModelError::LengthMismatch {
                expected: graph.edge_count(),
                actual: self.weights.len(),
            });
        }
        Ok(())
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.weights
    }
}

/// `M ∘ W`: entry `(i, j)` is `w_ij` where an edge exists and 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAdjacency {
    node_count: usize,
    values: Vec<u32>,
}

impl WeightedAdjacency {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn get(&self, src: NodeId, dst: NodeId) -> u32 {
        self.values[src * self.node_count + dst]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

pub fn hadamard(
    graph: &NetworkGraph,
    weights: &WeightVector,
) -> Result<WeightedAdjacency, ModelError> {
    weights.check_for(graph)?;
    let n = graph.node_count();
    let mut values = vec![0; n * n];
    for (e, &w) in graph.edges().iter().zip(weights.weights()) {
        values[e.src * n + e.dst] = w;
    }
    Ok(WeightedAdjacency {
        node_count: n,
        values,
    })
}

/// A demand of `units` flow quanta from `src` to `dst`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Demand {
    pub src: NodeId,
    pub dst: NodeId,
    pub units: u32,
}

impl Demand {
    pub fn new(src: NodeId, dst: NodeId, units: u32) -> Self {
        Demand { src, dst, units }
    }
}

/// The flow matrix `F_sd` as a list of non-zero demands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSet {
    demands: Vec<Demand>,
    granularity: u32,
}

impl FlowSet {
    pub fn new(demands: Vec<Demand>) -> Result<Self, ModelError> {
        Self::with_granularity(demands, 1)
    }

    /// `granularity` is the size of one flow unit `f` (e.g. 64 kb); loads are
    /// always counted in units, so it only affects [`FlowSet::volume`].
    pub fn with_granularity(demands: Vec<Demand>, granularity: u32) -> Result<Self, ModelError> {
        if granularity == 0 {
            return Err(ModelError::ZeroGranularity);
        }
        let mut seen = HashSet::new();
        for d in &demands {
            if d.src == d.dst {
                return Err(ModelError::SelfDemand(d.src));
            }
            if d.units == 0 {
                return Err(ModelError::ZeroUnits {
                    src: d.src,
                    dst: d.dst,
                });
            }
            if !seen.insert((d.src, d.dst)) {
                return Err(ModelError::DuplicateDemand {
                    src: d.src,
                    dst: d.dst,
                });
            }
        }
        Ok(FlowSet {
            demands,
            granularity,
        })
    }

    pub fn empty() -> Self {
        FlowSet {
            demands: Vec::new(),
            granularity: 1,
        }
    }

    pub fn demands(&self) -> &[Demand] {
        &self.demands
    }

    pub fn granularity(&self) -> u32 {
        self.granularity
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    /// Total traffic `p_sd = m * f` of a demand.
    pub fn volume(&self, demand: &Demand) -> u64 {
        u64::from(demand.units) * u64::from(self.granularity)
    }

    pub fn check_for(&self, graph: &NetworkGraph) -> Result<(), ModelError> {
        let n = graph.node_count();
        match self.demands.iter().find(|d| d.src >= n || d.dst >= n) {
            Some(d) => Err(ModelError::DemandOutOfRange {
                src: d.src,
                dst: d.dst,
                node_count: n,
            }),
            None => Ok(()),
        }
    }
}

/// Per-edge load `L` in flow units, stored as an `N x N` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadMatrix {
    node_count: usize,
    loads: Vec<u64>,
}

impl LoadMatrix {
    pub fn zeros(node_count: usize) -> Self {
        LoadMatrix {
            node_count,
            loads: vec![0; node_count * node_count],
        }
    }

    /// Adds `units` to every edge of `path`. Nothing is modified if any edge
    /// is missing from `graph`.
    pub fn accumulate(
        &mut self,
        graph: &NetworkGraph,
        path: &[Edge],
        units: u32,
    ) -> Result<(), ModelError> {
        if let Some(e) = path.iter().find(|e| !graph.has_edge(e.src, e.dst)) {
            return Err(ModelError::UnknownEdge {
                src: e.src,
                dst: e.dst,
            });
        }
        for e in path {
            self.loads[e.src * self.node_count + e.dst] += u64::from(units);
        }
        Ok(())
    }

    pub(crate) fn from_edge_loads(graph: &NetworkGraph, edge_loads: &[u64]) -> Self {
        let mut m = Self::zeros(graph.node_count());
        for (e, &l) in graph.edges().iter().zip(edge_loads) {
            m.loads[e.src * m.node_count + e.dst] = l;
        }
        m
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn get(&self, src: NodeId, dst: NodeId) -> u64 {
        self.loads[src * self.node_count + dst]
    }

    pub fn max(&self) -> u64 {
        self.loads.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.loads.iter().sum()
    }

    /// Row-major flattening, the load vector `VL`.
    pub fn as_vector(&self) -> &[u64] {
        &self.loads
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n4e5() -> NetworkGraph {
        build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap()
    }

    #[test]
    fn builds_n4e5_in_canonical_order() {
        let g = n4e5();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 5);
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(g.edge_index(0, 2), Some(1));
        assert_eq!(g.edge_index(2, 0), None);
        assert_eq!(g.out_edge_range(0), 0..2);
        assert_eq!(g.out_edge_range(3), 4..5);
    }

    #[test]
    fn single_edge_graph() {
        let g = build_graph(2, [(0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(WeightVector::uniform(g.edge_count(), 9).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(build_graph(3, [(0, 0)]), Err(ModelError::SelfLoop(0)));
        assert_eq!(
            build_graph(3, [(0, 1), (0, 1)]),
            Err(ModelError::DuplicateEdge { src: 0, dst: 1 })
        );
        assert_eq!(
            build_graph(3, [(0, 3)]),
            Err(ModelError::EdgeOutOfRange {
                src: 0,
                dst: 3,
                node_count: 3
            })
        );
        assert_eq!(build_graph(0, []), Err(ModelError::NoNodes));
        let msg = build_graph(3, [(1, 2), (1, 2)]).unwrap_err().to_string();
        assert!(msg.contains("(1,2)"), "{msg}");
    }

    #[test]
    fn adjacency_is_not_symmetric() {
        let g = build_graph(2, [(0, 1)]).unwrap();
        assert_eq!(g.adjacency(), vec![0, 1, 0, 0]);
    }

    #[test]
    fn hadamard_with_unit_weights_is_adjacency() {
        let g = n4e5();
        let w = WeightVector::uniform(5, 5).unwrap();
        let mw = hadamard(&g, &w).unwrap();
        let adj: Vec<u32> = g.adjacency().into_iter().map(u32::from).collect();
        assert_eq!(mw.values(), adj.as_slice());
    }

    #[test]
    fn hadamard_places_weights_in_canonical_order() {
        let g = n4e5();
        let w = WeightVector::new(vec![2, 3, 1, 4, 5], 5).unwrap();
        let mw = hadamard(&g, &w).unwrap();
        assert_eq!(mw.get(0, 1), 2);
        assert_eq!(mw.get(0, 2), 3);
        assert_eq!(mw.get(1, 2), 1);
        assert_eq!(mw.get(2, 3), 4);
        assert_eq!(mw.get(3, 0), 5);
        assert_eq!(mw.values().iter().filter(|&&v| v > 0).count(), 5);
    }

    #[test]
    fn hadamard_rejects_length_mismatch() {
        let g = n4e5();
        let w = WeightVector::new(vec![1, 1, 1, 1], 5).unwrap();
        assert_eq!(
            hadamard(&g, &w),
            Err(ModelError::LengthMismatch {
                expected: 5,
                actual: 4
            })
        );
    }

    #[test]
    fn weight_range_is_inclusive() {
        assert!(WeightVector::new(vec![1, 9], 9).is_ok());
        assert!(matches!(
            WeightVector::new(vec![1, 10], 9),
            Err(ModelError::WeightOutOfRange { index: 1, .. })
        ));
        assert!(WeightVector::new(vec![0], 9).is_err());
        assert_eq!(WeightVector::new(vec![], 0), Err(ModelError::ZeroWeightMax));
    }

    #[test]
    fn flow_set_validation() {
        assert_eq!(
            FlowSet::new(vec![Demand::new(1, 1, 1)]),
            Err(ModelError::SelfDemand(1))
        );
        assert_eq!(
            FlowSet::new(vec![Demand::new(0, 1, 1), Demand::new(0, 1, 2)]),
            Err(ModelError::DuplicateDemand { src: 0, dst: 1 })
        );
        assert!(FlowSet::new(vec![Demand::new(0, 1, 0)]).is_err());
        let fs = FlowSet::with_granularity(vec![Demand::new(0, 1, 3)], 64).unwrap();
        assert_eq!(fs.volume(&fs.demands()[0]), 192);
        let g = build_graph(2, [(0, 1)]).unwrap();
        assert!(FlowSet::new(vec![Demand::new(0, 5, 1)])
            .unwrap()
            .check_for(&g)
            .is_err());
    }

    #[test]
    fn accumulate_load_along_path() {
        let g = build_graph(7, [(6, 5), (5, 3), (3, 1), (1, 0)]).unwrap();
        let path = [
            Edge::new(6, 5),
            Edge::new(5, 3),
            Edge::new(3, 1),
            Edge::new(1, 0),
        ];
        let mut l = LoadMatrix::zeros(7);
        l.accumulate(&g, &[], 1).unwrap();
        assert_eq!(l.total(), 0);

        l.accumulate(&g, &path, 1).unwrap();
        for e in &path {
            assert_eq!(l.get(e.src, e.dst), 1);
        }
        assert_eq!(l.total(), 4);

        l.accumulate(&g, &path, 1).unwrap();
        for e in &path {
            assert_eq!(l.get(e.src, e.dst), 2);
        }
        assert_eq!(l.total(), 8);
    }

    #[test]
    fn accumulate_rejects_unknown_edge() {
        let g = build_graph(3, [(0, 1)]).unwrap();
        let mut l = LoadMatrix::zeros(3);
        let err = l
            .accumulate(&g, &[Edge::new(0, 1), Edge::new(1, 2)], 1)
            .unwrap_err();
        assert_eq!(err, ModelError::UnknownEdge { src: 1, dst: 2 });
        assert_eq!(l.total(), 0);
    }
}
