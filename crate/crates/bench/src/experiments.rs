//! Experiment suites: optimization effectiveness against the random-weight
//! starting point, optimization time across network scales, and a three-way
//! comparison against the ant-colony and random-weight baselines.
//!
//! Runs execute sequentially so that recorded times are not distorted by
//! sharing the machine with other runs.

use galb::{
    aco_optimize, dspa_route, generate_flows, generate_topology, optimize, AcoConfig, FlowSet,
    GaConfig, NetworkGraph, TopologyProfile,
};

use crate::error::BenchError;
use crate::report::{round_micros, ExperimentReport, RunRecord};
use crate::seeds::{self, derive_seed};

pub const SDNGALB: &str = "SDNGALB";
pub const ACOLB: &str = "ACOLB";
pub const DSPA: &str = "DSPA";

/// Ant counts swept by default in [`compare`].
pub const DEFAULT_ANTS: [usize; 7] = [1, 5, 10, 25, 50, 100, 500];

fn run_index(group: usize, run: usize) -> u64 {
    ((group as u64) << 24) | run as u64
}

fn ga_record(
    profile: &TopologyProfile,
    graph: &NetworkGraph,
    flows: &FlowSet,
    config: &GaConfig,
    run: usize,
    before: Option<u64>,
) -> Result<RunRecord, BenchError> {
    let result = optimize(graph, flows, config)?;
    Ok(RunRecord {
        profile: profile.name.clone(),
        algorithm: SDNGALB.into(),
        variant: String::new(),
        flow_count: flows.demands().iter().map(|d| d.units as usize).sum(),
        run,
        seed: config.seed,
        before_max_load: before,
        after_max_load: result.best_fitness,
        elapsed_s: round_micros(result.elapsed.as_secs_f64()),
        generations: Some(result.generations_run),
        stop_reason: Some(result.stop_reason),
    })
}

/// For each flow count, `runs` fresh demand sets on one fixed topology; the
/// random-weight evaluation is "before", the optimized result "after".
pub fn effectiveness(
    profile: &TopologyProfile,
    flow_counts: &[usize],
    runs: usize,
    ga: &GaConfig,
    master_seed: u64,
) -> Result<ExperimentReport, BenchError> {
    if runs == 0 || flow_counts.is_empty() {
        return Err(BenchError::EmptyExperiment);
    }
    let graph = generate_topology(profile, derive_seed(master_seed, seeds::TOPOLOGY, 0))?;
    let mut records = Vec::new();
    for (fi, &count) in flow_counts.iter().enumerate() {
        for run in 0..runs {
            let idx = run_index(fi, run);
            let flows = generate_flows(&graph, count, derive_seed(master_seed, seeds::FLOWS, idx))?;
            let before = dspa_route(
                &graph,
                &flows,
                ga.weight_max,
                derive_seed(master_seed, seeds::DSPA, idx),
            )?;
            let config = GaConfig {
                seed: derive_seed(master_seed, seeds::GA, idx),
                ..ga.clone()
            };
            records.push(ga_record(profile, &graph, &flows, &config, run, Some(before.max_load))?);
        }
    }
    Ok(ExperimentReport::new("effectiveness", records))
}

/// Optimization time per profile. The topology is fixed per profile and the
/// demands are regenerated for every run; each profile uses its own weight
/// range unless `weight_max` overrides it.
pub fn timing(
    profiles: &[TopologyProfile],
    runs: usize,
    ga: &GaConfig,
    weight_max: Option<u32>,
    master_seed: u64,
) -> Result<ExperimentReport, BenchError> {
    if runs == 0 || profiles.is_empty() {
        return Err(BenchError::EmptyExperiment);
    }
    let mut records = Vec::new();
    for (pi, profile) in profiles.iter().enumerate() {
        let graph = generate_topology(profile, derive_seed(master_seed, seeds::TOPOLOGY, pi as u64))?;
        for run in 0..runs {
            let idx = run_index(pi, run);
            let flows =
                generate_flows(&graph, profile.flow_count, derive_seed(master_seed, seeds::FLOWS, idx))?;
            let config = GaConfig {
                seed: derive_seed(master_seed, seeds::GA, idx),
                weight_max: weight_max.unwrap_or(profile.weight_max),
                ..ga.clone()
            };
            records.push(ga_record(profile, &graph, &flows, &config, run, None)?);
        }
    }
    Ok(ExperimentReport::new("timing", records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcoSweep {
    pub ant_counts: Vec<usize>,
    pub iterations: usize,
}

impl Default for AcoSweep {
    fn default() -> Self {
        AcoSweep {
            ant_counts: DEFAULT_ANTS.to_vec(),
            iterations: AcoConfig::default().iterations,
        }
    }
}

/// SDNGALB, ACOLB (once per ant count) and DSPA on the same demand sets.
pub fn compare(
    profile: &TopologyProfile,
    flow_count: usize,
    runs: usize,
    ga: &GaConfig,
    aco: &AcoSweep,
    master_seed: u64,
) -> Result<ExperimentReport, BenchError> {
    if runs == 0 || aco.ant_counts.is_empty() {
        return Err(BenchError::EmptyExperiment);
    }
    let graph = generate_topology(profile, derive_seed(master_seed, seeds::TOPOLOGY, 0))?;
    let mut records = Vec::new();
    for run in 0..runs {
        let idx = run as u64;
        let flows = generate_flows(&graph, flow_count, derive_seed(master_seed, seeds::FLOWS, idx))?;
        let base = RunRecord {
            profile: profile.name.clone(),
            algorithm: String::new(),
            variant: String::new(),
            flow_count,
            run,
            seed: 0,
            before_max_load: None,
            after_max_load: 0,
            elapsed_s: 0.0,
            generations: None,
            stop_reason: None,
        };

        let config = GaConfig {
            seed: derive_seed(master_seed, seeds::GA, idx),
            ..ga.clone()
        };
        records.push(ga_record(profile, &graph, &flows, &config, run, None)?);

        let aco_seed = derive_seed(master_seed, seeds::ACO, idx);
        for &ants in &aco.ant_counts {
            let cfg = AcoConfig {
                ant_count: ants,
                iterations: aco.iterations,
                seed: aco_seed,
                ..AcoConfig::default()
            };
            let r = aco_optimize(&graph, &flows, &cfg)?;
            records.push(RunRecord {
                algorithm: ACOLB.into(),
                variant: format!("ants={ants}"),
                seed: aco_seed,
                after_max_load: r.max_load,
                elapsed_s: round_micros(r.elapsed.as_secs_f64()),
                ..base.clone()
            });
        }

        let dspa_seed = derive_seed(master_seed, seeds::DSPA, idx);
        let r = dspa_route(&graph, &flows, ga.weight_max, dspa_seed)?;
        records.push(RunRecord {
            algorithm: DSPA.into(),
            seed: dspa_seed,
            after_max_load: r.max_load,
            elapsed_s: round_micros(r.elapsed.as_secs_f64()),
            ..base
        });
    }
    Ok(ExperimentReport::new("compare", records))
}
