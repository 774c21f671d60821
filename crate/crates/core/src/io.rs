//! JSON documents for topologies, flows and weights.
//!
//! ```text
//! topology: {"nodes": 4, "edges": [[0, 1], [0, 2], ...]}
//! flows:    [{"src": 0, "dst": 2, "units": 1}, ...]
//! weights:  [{"src": 0, "dst": 1, "weight": 3}, ...]
//! ```
//!
//! Writers emit edges and weights in canonical edge order. Readers reject
//! unknown fields and validate against the model invariants.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{build_graph, Demand, FlowSet, ModelError, NetworkGraph, NodeId, WeightVector};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {kind} document: {source}")]
    Parse {
        kind: &'static str,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid {kind} document: {source}")]
    Invalid {
        kind: &'static str,
        #[source]
        source: ModelError,
    },
    #[error("weights document: edge ({src},{dst}) is not in the topology")]
    UnknownWeightEdge { src: NodeId, dst: NodeId },
    #[error("weights document: edge ({src},{dst}) listed twice")]
    DuplicateWeightEdge { src: NodeId, dst: NodeId },
    #[error("weights document: no weight for edge ({src},{dst})")]
    MissingWeightEdge { src: NodeId, dst: NodeId },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    nodes: usize,
    edges: Vec<[NodeId; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowDoc {
    src: NodeId,
    dst: NodeId,
    units: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    src: NodeId,
    dst: NodeId,
    weight: u32,
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<'de, T: Deserialize<'de>>(kind: &'static str, text: &'de str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|source| FormatError::Parse { kind, source })
}

fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn topology_to_json(graph: &NetworkGraph) -> String {
    render(&TopologyDoc {
        nodes: graph.node_count(),
        edges: graph.edges().iter().map(|e| [e.src, e.dst]).collect(),
    })
}

pub fn topology_from_json(text: &str) -> Result<NetworkGraph, FormatError> {
    let doc: TopologyDoc = parse("topology", text)?;
    build_graph(doc.nodes, doc.edges.into_iter().map(|[s, d]| (s, d))).map_err(|source| {
        FormatError::Invalid {
            kind: "topology",
            source,
        }
    })
}

pub fn flows_to_json(flows: &FlowSet) -> String {
    let docs: Vec<_> = flows
        .demands()
        .iter()
        .map(|d| FlowDoc {
            src: d.src,
            dst: d.dst,
            units: d.units,
        })
        .collect();
    render(&docs)
}

/// Parses a flows document and checks every endpoint against `graph`.
pub fn flows_from_json(text: &str, graph: &NetworkGraph) -> Result<FlowSet, FormatError> {
    let docs: Vec<FlowDoc> = parse("flows", text)?;
    let invalid = |source| FormatError::Invalid {
        kind: "flows",
        source,
    };
    let flows = FlowSet::new(
        docs.into_iter()
            .map(|f| Demand::new(f.src, f.dst, f.units))
            .collect(),
    )
    .map_err(invalid)?;
    flows.check_for(graph).map_err(invalid)?;
    Ok(flows)
}

pub fn weights_to_json(graph: &NetworkGraph, weights: &WeightVector) -> Result<String, ModelError> {
    weights.check_for(graph)?;
    let docs: Vec<_> = graph
        .edges()
        .iter()
        .zip(weights.weights())
        .map(|(e, &w)| WeightDoc {
            src: e.src,
            dst: e.dst,
            weight: w,
        })
        .collect();
    Ok(render(&docs))
}

/// Parses a weights document; entries may come in any order but must cover
/// every edge of `graph` exactly once.
pub fn weights_from_json(
    text: &str,
    graph: &NetworkGraph,
    weight_max: u32,
) -> Result<WeightVector, FormatError> {
    let docs: Vec<WeightDoc> = parse("weights", text)?;
    let mut genes: Vec<Option<u32>> = vec![None; graph.edge_count()];
    for w in docs {
        let idx = graph
            .edge_index(w.src, w.dst)
            .ok_or(FormatError::UnknownWeightEdge { src: w.src, dst: w.dst })?;
        if genes[idx].replace(w.weight).is_some() {
            return Err(FormatError::DuplicateWeightEdge { src: w.src, dst: w.dst });
        }
    }
    let genes = genes
        .into_iter()
        .zip(graph.edges())
        .map(|(g, e)| g.ok_or(FormatError::MissingWeightEdge { src: e.src, dst: e.dst }))
        .collect::<Result<Vec<_>, _>>()?;
    WeightVector::new(genes, weight_max).map_err(|source| FormatError::Invalid {
        kind: "weights",
        source,
    })
}

pub fn read_topology(path: impl AsRef<Path>) -> Result<NetworkGraph, FormatError> {
    topology_from_json(&read(path.as_ref())?)
}

pub fn write_topology(graph: &NetworkGraph, path: impl AsRef<Path>) -> Result<(), FormatError> {
    write(path.as_ref(), &topology_to_json(graph))
}

pub fn read_flows(path: impl AsRef<Path>, graph: &NetworkGraph) -> Result<FlowSet, FormatError> {
    flows_from_json(&read(path.as_ref())?, graph)
}

pub fn write_flows(flows: &FlowSet, path: impl AsRef<Path>) -> Result<(), FormatError> {
    write(path.as_ref(), &flows_to_json(flows))
}

pub fn read_weights(
    path: impl AsRef<Path>,
    graph: &NetworkGraph,
    weight_max: u32,
) -> Result<WeightVector, FormatError> {
    weights_from_json(&read(path.as_ref())?, graph, weight_max)
}

pub fn write_weights(
    graph: &NetworkGraph,
    weights: &WeightVector,
    path: impl AsRef<Path>,
) -> Result<(), FormatError> {
    let text = weights_to_json(graph, weights).map_err(|source| FormatError::Invalid {
        kind: "weights",
        source,
    })?;
    write(path.as_ref(), &text)
}
