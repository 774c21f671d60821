//! `galb` command line.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use galb::io;
use galb::{brute_force, dspa_route, evaluate_fitness, generate_flows, generate_topology, optimize, GaConfig, TopologyProfile};

use crate::error::BenchError;
use crate::experiments::{self, AcoSweep, DEFAULT_ANTS};
use crate::report::ExperimentReport;
use crate::seeds::{self, derive_seed};

#[derive(Debug, Parser)]
#[command(name = "galb", version, about = "Link-weight optimization for min-max link load")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize link weights for a topology and demand set.
    Optimize(OptimizeArgs),
    /// Exhaustively search all weight vectors for the optimum.
    Bruteforce(BruteforceArgs),
    /// SDNGALB vs ACOLB vs DSPA on one profile.
    Compare(CompareArgs),
    /// Max load before and after optimization for several demand counts.
    Effectiveness(EffectivenessArgs),
    /// Optimization time across profiles.
    Timing(TimingArgs),
    /// Write a random topology and demand set.
    Generate(GenerateArgs),
}

#[derive(Debug, Args, Clone)]
pub struct GaArgs {
    #[arg(long, default_value_t = 50)]
    pub pop_size: usize,
    #[arg(long, default_value_t = 0.10)]
    pub mutation_prob: f64,
    #[arg(long, default_value_t = 500)]
    pub generations: usize,
    #[arg(long, default_value_t = 100)]
    pub stagnation: usize,
    /// Largest link weight; defaults to 9, or to the profile's range in experiments.
    #[arg(long)]
    pub weight_max: Option<u32>,
}

impl GaArgs {
    fn config(&self, weight_max: u32, seed: u64) -> GaConfig {
        GaConfig {
            population_size: self.pop_size,
            mutation_prob: self.mutation_prob,
            max_generations: self.generations,
            stagnation_limit: self.stagnation,
            weight_max: self.weight_max.unwrap_or(weight_max),
            seed,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct ProfileArgs {
    /// Built-in profile (n4e5, n5e11, n6e15, n10e39, n25e219, n50e872).
    #[arg(long, default_value = "n10e39")]
    pub profile: String,
    /// Custom node count; requires --edges and replaces --profile.
    #[arg(long, requires = "edges")]
    pub nodes: Option<usize>,
    #[arg(long, requires = "nodes")]
    pub edges: Option<usize>,
}

impl ProfileArgs {
    fn resolve(&self, flow_count: Option<usize>) -> Result<TopologyProfile, BenchError> {
        let mut p = match (self.nodes, self.edges) {
            (Some(n), Some(e)) => TopologyProfile::new(n, e, 9, 0)?,
            _ => TopologyProfile::by_name(&self.profile)?,
        };
        if let Some(f) = flow_count {
            p = TopologyProfile {
                flow_count: f,
                ..p
            };
        }
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub topology: PathBuf,
    #[arg(long)]
    pub flows: PathBuf,
    /// Current weights; without it "before" is a random weight draw.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weights document destination (standard output if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Args)]
pub struct BruteforceArgs {
    #[arg(long)]
    pub topology: PathBuf,
    #[arg(long)]
    pub flows: PathBuf,
    #[arg(long, default_value_t = 9)]
    pub weight_max: u32,
    /// Also write the witness weights document here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 20)]
    pub flow_count: usize,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Comma-separated ant counts.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ANTS)]
    pub ants: Vec<usize>,
    #[arg(long, default_value_t = galb::AcoConfig::default().iterations)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Args)]
pub struct EffectivenessArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Comma-separated demand counts.
    #[arg(long, value_delimiter = ',', default_values_t = [20usize, 30, 40, 50, 100, 200])]
    pub flow_counts: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Comma-separated built-in profile names.
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = ["n4e5", "n5e11", "n6e15", "n10e39", "n25e219", "n50e872"].map(String::from)
    )]
    pub profiles: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Number of demands (defaults to the profile's).
    #[arg(long)]
    pub flow_count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Topology document destination.
    #[arg(long)]
    pub topology: PathBuf,
    /// Flows document destination.
    #[arg(long)]
    pub flows: PathBuf,
}

fn write_file(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), BenchError> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(out: Option<&Path>, report: &ExperimentReport) -> Result<(), BenchError> {
    for a in &report.aggregates {
        let eff = a
            .effectiveness_pct()
            .map(|e| format!(" effectiveness {e}%"))
            .unwrap_or_default();
        let before = a.mean_before.map(|b| format!(" before {b:.3}")).unwrap_or_default();
        eprintln!(
            "{} {} {} |F|={} runs={}{} after {:.3}{} time {:.6}s",
            a.profile, a.algorithm, a.variant, a.flow_count, a.runs, before, a.mean_after, eff, a.mean_elapsed_s
        );
    }
    emit(out, &report.to_csv()?)
}

pub fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Optimize(a) => {
            let graph = io::read_topology(&a.topology)?;
            let flows = io::read_flows(&a.flows, &graph)?;
            let config = a.ga.config(9, a.seed);
            config.validate()?;
            let before = match &a.weights {
                Some(p) => evaluate_fitness(&graph, &io::read_weights(p, &graph, config.weight_max)?, &flows)?.max_load,
                None => dspa_route(&graph, &flows, config.weight_max, derive_seed(a.seed, seeds::DSPA, 0))?.max_load,
            };
            let result = optimize(&graph, &flows, &config)?;
            let doc = io::weights_to_json(&graph, &result.best_weights).expect("weights fit graph");
            emit(a.out.as_deref(), &doc)?;
            eprintln!(
                "before {} after {} elapsed {:.6}s generations {} stop {}",
                before,
                result.best_fitness,
                result.elapsed.as_secs_f64(),
                result.generations_run,
                result.stop_reason
            );
        }
        Command::Bruteforce(a) => {
            let graph = io::read_topology(&a.topology)?;
            let flows = io::read_flows(&a.flows, &graph)?;
            let r = brute_force(&graph, &flows, a.weight_max)?;
            let w = r.weights().expect("brute force yields weights");
            if let Some(p) = &a.out {
                write_file(p, &io::weights_to_json(&graph, w).expect("weights fit graph"))?;
            }
            let genes: Vec<String> = w.weights().iter().map(u32::to_string).collect();
            println!("optimum {} witness {}", r.max_load, genes.join(","));
            eprintln!("elapsed {:.6}s", r.elapsed.as_secs_f64());
        }
        Command::Compare(a) => {
            let profile = a.profile.resolve(None)?;
            let ga = a.ga.config(profile.weight_max, 0);
            let sweep = AcoSweep {
                ant_counts: a.ants.clone(),
                iterations: a.iterations,
            };
            let report = experiments::compare(&profile, a.flow_count, a.runs, &ga, &sweep, a.seed)?;
            emit_report(a.out.as_deref(), &report)?;
        }
        Command::Effectiveness(a) => {
            let profile = a.profile.resolve(None)?;
            let ga = a.ga.config(profile.weight_max, 0);
            let report = experiments::effectiveness(&profile, &a.flow_counts, a.runs, &ga, a.seed)?;
            emit_report(a.out.as_deref(), &report)?;
        }
        Command::Timing(a) => {
            let profiles = a
                .profiles
                .iter()
                .map(|n| TopologyProfile::by_name(n))
                .collect::<Result<Vec<_>, _>>()?;
            let ga = a.ga.config(9, 0);
            let report = experiments::timing(&profiles, a.runs, &ga, a.ga.weight_max, a.seed)?;
            emit_report(a.out.as_deref(), &report)?;
        }
        Command::Generate(a) => {
            let profile = a.profile.resolve(a.flow_count)?;
            let graph = generate_topology(&profile, derive_seed(a.seed, seeds::TOPOLOGY, 0))?;
            let flows = generate_flows(&graph, profile.flow_count, derive_seed(a.seed, seeds::FLOWS, 0))?;
            write_file(&a.topology, &io::topology_to_json(&graph))?;
            write_file(&a.flows, &io::flows_to_json(&flows))?;
            eprintln!(
                "{}: {} nodes, {} edges, Cn {:.1}%, {} demands",
                profile.name,
                graph.node_count(),
                graph.edge_count(),
                galb::connectivity(&graph),
                flows.len()
            );
        }
    }
    Ok(())
}
