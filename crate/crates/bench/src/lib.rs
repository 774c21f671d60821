//! Experiment harness and command-line front end for the `galb` optimizer.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod report;
pub mod seeds;

pub use error::BenchError;
pub use report::{Aggregate, ExperimentReport, RunRecord};
