//! Random strongly connected topologies, random demand sets and the
//! connectivity measure `Cn`.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{build_graph, Demand, FlowSet, ModelError, NetworkGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("{edges} edges cannot form a strongly connected simple digraph on {nodes} nodes (need {nodes}..={max})")]
    InfeasibleEdgeCount { nodes: usize, edges: usize, max: usize },
    #[error("{requested} flows requested but only {available} ordered pairs exist")]
    TooManyFlows { requested: usize, available: usize },
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Network scale used by the experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyProfile {
    pub name: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub weight_max: u32,
    pub flow_count: usize,
    /// Reference connectivity recorded for the profile, if any.
    pub reported_connectivity: Option<f64>,
}

impl fmt::Display for TopologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The six reference profiles: name, |N|, |E|, v, |F_sd|, reported Cn.
const BUILTIN: [(&str, usize, usize, u32, usize, f64); 6] = [
    ("n4e5", 4, 5, 5, 5, 31.0),
    ("n5e11", 5, 11, 5, 10, 44.0),
    ("n6e15", 6, 15, 5, 15, 42.0),
    ("n10e39", 10, 39, 9, 20, 39.0),
    ("n25e219", 25, 219, 9, 45, 35.0),
    ("n50e872", 50, 872, 9, 100, 35.0),
];

impl TopologyProfile {
    pub fn new(
        node_count: usize,
        edge_count: usize,
        weight_max: u32,
        flow_count: usize,
    ) -> Result<Self, TopologyError> {
        let max = node_count * node_count.saturating_sub(1);
        if node_count < 2 || edge_count < node_count || edge_count > max {
            return Err(TopologyError::InfeasibleEdgeCount {
                nodes: node_count,
                edges: edge_count,
                max,
            });
        }
        if weight_max == 0 {
            return Err(ModelError::ZeroWeightMax.into());
        }
        Ok(TopologyProfile {
            name: format!("n{node_count}e{edge_count}"),
            node_count,
            edge_count,
            weight_max,
            flow_count,
            reported_connectivity: None,
        })
    }

    /// All built-in profiles, smallest first.
    pub fn builtin() -> Vec<TopologyProfile> {
        BUILTIN
            .iter()
            .map(|&(name, n, e, v, f, cn)| TopologyProfile {
                name: name.to_string(),
                node_count: n,
                edge_count: e,
                weight_max: v,
                flow_count: f,
                reported_connectivity: Some(cn),
            })
            .collect()
    }

    pub fn by_name(name: &str) -> Result<TopologyProfile, TopologyError> {
        Self::builtin()
            .into_iter()
            .find(|p| p.name == name)
            .ok_or_else(|| TopologyError::UnknownProfile(name.to_string()))
    }

    /// `100 · |E| / (|N|·(|N|−1))`.
    pub fn connectivity(&self) -> f64 {
        connectivity_of(self.node_count, self.edge_count)
    }
}

fn connectivity_of(nodes: usize, edges: usize) -> f64 {
    let denom = nodes * nodes.saturating_sub(1);
    if denom == 0 {
        return 0.0;
    }
    100.0 * edges as f64 / denom as f64
}

/// Share of directed edges present relative to the complete digraph, in percent.
pub fn connectivity(graph: &NetworkGraph) -> f64 {
    connectivity_of(graph.node_count(), graph.edge_count())
}

/// A directed cycle through a random permutation of all nodes, plus
/// `edge_count - node_count` further distinct edges drawn uniformly.
pub fn generate_topology(
    profile: &TopologyProfile,
    seed: u64,
) -> Result<NetworkGraph, TopologyError> {
    let n = profile.node_count;
    let max = n * n.saturating_sub(1);
    if n < 2 || profile.edge_count < n || profile.edge_count > max {
        return Err(TopologyError::InfeasibleEdgeCount {
            nodes: n,
            edges: profile.edge_count,
            max,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut edges: Vec<(NodeId, NodeId)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
    let backbone: HashSet<_> = edges.iter().copied().collect();
    let mut rest: Vec<(NodeId, NodeId)> = all_pairs(n).filter(|p| !backbone.contains(p)).collect();
    rest.shuffle(&mut rng);
    edges.extend(rest.into_iter().take(profile.edge_count - n));

    Ok(build_graph(n, edges)?)
}

fn all_pairs(n: usize) -> impl Iterator<Item = (NodeId, NodeId)> {
    (0..n).flat_map(move |s| (0..n).filter(move |&d| d != s).map(move |d| (s, d)))
}

/// `flow_count` unit flows as demands sorted by `(src, dst)`.
///
/// Up to one flow per ordered pair, the pairs are distinct and every demand
/// has one unit. Larger counts fill every pair in whole rounds and spread the
/// remainder over randomly chosen distinct pairs, so units differ by at most
/// one between pairs.
pub fn generate_flows(
    graph: &NetworkGraph,
    flow_count: usize,
    seed: u64,
) -> Result<FlowSet, TopologyError> {
    let n = graph.node_count();
    let available = n * n.saturating_sub(1);
    if available == 0 {
        if flow_count == 0 {
            return Ok(FlowSet::empty());
        }
        return Err(TopologyError::TooManyFlows {
            requested: flow_count,
            available,
        });
    }
    let rounds = flow_count / available;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = all_pairs(n).collect();
    let extra: HashSet<_> = pairs
        .choose_multiple(&mut rng, flow_count % available)
        .copied()
        .collect();
    let demands = pairs
        .into_iter()
        .map(|p| (p, rounds + usize::from(extra.contains(&p))))
        .filter(|&(_, units)| units > 0)
        .map(|((s, d), units)| Demand::new(s, d, units as u32))
        .collect();
    Ok(FlowSet::new(demands)?)
}

fn reach(graph: &NetworkGraph, start: NodeId, forward: bool) -> usize {
    let n = graph.node_count();
    let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for e in graph.edges() {
        if forward {
            adj[e.src].push(e.dst);
        } else {
            adj[e.dst].push(e.src);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count
}

/// Every node reaches and is reached from node 0.
pub fn is_strongly_connected(graph: &NetworkGraph) -> bool {
    let n = graph.node_count();
    reach(graph, 0, true) == n && reach(graph, 0, false) == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_profiles() {
        let names: Vec<_> = TopologyProfile::builtin().into_iter().map(|p| p.name).collect();
        assert_eq!(names, ["n4e5", "n5e11", "n6e15", "n10e39", "n25e219", "n50e872"]);
        let p = TopologyProfile::by_name("n10e39").unwrap();
        assert_eq!((p.node_count, p.edge_count, p.weight_max, p.flow_count), (10, 39, 9, 20));
        assert!(TopologyProfile::by_name("n7e7").is_err());
    }

    #[test]
    fn n4e5_generation() {
        let p = TopologyProfile::by_name("n4e5").unwrap();
        let g = generate_topology(&p, 1).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 5);
        assert!(is_strongly_connected(&g));
        assert_eq!(p.connectivity().round(), 42.0);
        assert_eq!(p.reported_connectivity, Some(31.0));
    }

    #[test]
    fn minimal_is_a_cycle() {
        let p = TopologyProfile::new(6, 6, 9, 0).unwrap();
        let g = generate_topology(&p, 3).unwrap();
        assert!(is_strongly_connected(&g));
        for u in 0..6 {
            assert_eq!(g.out_edge_range(u).len(), 1);
        }
    }

    #[test]
    fn maximal_is_complete() {
        let p = TopologyProfile::new(5, 20, 9, 0).unwrap();
        let g = generate_topology(&p, 3).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert_eq!(connectivity(&g), 100.0);
    }

    #[test]
    fn infeasible_counts() {
        assert!(matches!(
            TopologyProfile::new(4, 3, 5, 1),
            Err(TopologyError::InfeasibleEdgeCount { .. })
        ));
        assert!(TopologyProfile::new(4, 13, 5, 1).is_err());
        // more flows than ordered pairs is fine: pairs carry several units
        assert!(TopologyProfile::new(4, 5, 5, 13).is_ok());
        let bad = TopologyProfile {
            edge_count: 2,
            ..TopologyProfile::by_name("n4e5").unwrap()
        };
        assert!(generate_topology(&bad, 0).is_err());
    }

    #[test]
    fn connectivity_values() {
        let cycle = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(connectivity(&cycle), 25.0);
        let big = TopologyProfile::by_name("n50e872").unwrap();
        assert_eq!(format!("{:.1}", big.connectivity()), "35.6");
    }

    #[test]
    fn flow_generation() {
        let p = TopologyProfile::by_name("n10e39").unwrap();
        let g = generate_topology(&p, 9).unwrap();
        assert!(generate_flows(&g, 0, 1).unwrap().is_empty());

        let f = generate_flows(&g, 20, 1).unwrap();
        assert_eq!(f.len(), 20);
        assert!(f.demands().iter().all(|d| d.units == 1 && d.src != d.dst));

        let all = generate_flows(&g, 90, 1).unwrap();
        assert_eq!(all.len(), 90);
        assert!(all.demands().iter().all(|d| d.units == 1));

        let more = generate_flows(&g, 200, 1).unwrap();
        assert_eq!(more.len(), 90);
        assert_eq!(more.demands().iter().map(|d| d.units).sum::<u32>(), 200);
        assert_eq!(more.demands().iter().filter(|d| d.units == 3).count(), 20);
        assert!(more.demands().iter().all(|d| d.units == 2 || d.units == 3));

        let single = build_graph(1, Vec::<(usize, usize)>::new()).unwrap();
        assert!(generate_flows(&single, 0, 1).unwrap().is_empty());
        assert!(matches!(
            generate_flows(&single, 1, 1),
            Err(TopologyError::TooManyFlows { requested: 1, available: 0 })
        ));
        assert_eq!(generate_flows(&g, 20, 1).unwrap(), f);
    }

    #[test]
    fn seed_determinism() {
        let p = TopologyProfile::by_name("n25e219").unwrap();
        assert_eq!(generate_topology(&p, 77).unwrap(), generate_topology(&p, 77).unwrap());
        assert_ne!(generate_topology(&p, 77).unwrap(), generate_topology(&p, 78).unwrap());
    }
}
