//! Min-max link load balancing by genetic optimization of integer link weights.
//!
//! Traffic is a set of homogeneous demands routed independently along
//! Dijkstra shortest paths under a weight vector; the objective is the load
//! of the busiest directed link. [`ga::optimize`] evolves weight vectors
//! against that objective, and [`baseline`] holds the exhaustive, ant-colony
//! and random-weight comparison methods.

pub mod baseline;
pub mod ga;
pub mod io;
pub mod model;
pub mod routing;
pub mod topology;

pub use baseline::{
    aco_optimize, brute_force, dspa_route, AcoConfig, BaselineError, BaselineKind, BaselineResult,
};
pub use ga::{optimize, GaConfig, GaError, OptimizationResult, StopReason};
pub use model::{
    build_graph, hadamard, Demand, Edge, FlowSet, LoadMatrix, ModelError, NetworkGraph, NodeId,
    WeightVector, WeightedAdjacency,
};
pub use routing::{
    evaluate_fitness, flatten_loads, shortest_path, Evaluator, FitnessResult, Path, RoutingError,
    RoutingTable,
};
pub use topology::{
    connectivity, generate_flows, generate_topology, TopologyError, TopologyProfile,
};
