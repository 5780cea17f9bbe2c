mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Format, Overrides, RunConfig, OUT_ENV};

/// Experiments with the cubic focusing NLS on a Kirchhoff star graph.
#[derive(Debug, Parser)]
#[command(name = "graphnls", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Total mass M
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Number of edges E
    #[arg(long, global = true)]
    edges: Option<usize>,
    /// Truncation length L of every edge
    #[arg(long, global = true)]
    length: Option<f64>,
    /// Grid points N per edge, vertex and far end included
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Time step of the Crank-Nicolson scheme
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Final time of an evolution
    #[arg(long = "t-final", global = true)]
    t_final: Option<f64>,
    /// Seed of every randomized battery
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides GRAPHNLS_OUT)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for data files
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat `key = value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the acceptance battery and write verify_report.json
    Verify,
    /// Energy along a curve of states
    Scan {
        #[command(subcommand)]
        curve: ScanCurve,
    },
    /// Write the samples of a profile
    Profile {
        #[command(subcommand)]
        kind: ProfileKind,
    },
    /// Mass-constrained gradient flow from a perturbed standing wave
    Flow(FlowArgs),
    /// Crank-Nicolson time evolution
    Evolve(EvolveArgs),
}

#[derive(Debug, Subcommand)]
pub enum ScanCurve {
    /// Sesquisolitons of total mass M, parameterized by m1 in (0, M/3]
    Sesqui {
        /// a:b:n or a comma list, ascending
        #[arg(long, default_value = "0.01:2.0:40")]
        m1: String,
    },
    /// Mass-preserving dilations of the standing wave
    Dilation {
        /// a:b:n or a comma list
        #[arg(long, default_value = "0.5:1.5:21")]
        lambda: String,
    },
    /// Minimizing sequence of sesquisolitons on edges of length 2L
    Minseq {
        /// Strictly decreasing m1 values
        #[arg(long, default_value = "1,0.5,0.1,0.02")]
        m1: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProfileKind {
    /// Three half-solitons of mass M/3
    Stationary,
    /// Sesquisoliton with the given edge masses
    Sesqui {
        #[arg(long)]
        m1: f64,
        #[arg(long)]
        m2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Perturbation {
    /// Mass moved from edge 1 into edges 2-3 along the sesquisoliton curve
    Asymmetric,
    /// Dilation of the standing wave
    Symmetric,
    /// The standing wave itself
    None,
    /// A seeded random vertex-continuous state of mass M
    Random,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[arg(long, value_enum, default_value = "asymmetric")]
    pub perturbation: Perturbation,
    /// Size of the perturbation (fraction)
    #[arg(long, default_value_t = 0.01)]
    pub amount: f64,
    /// Initial pseudo-time step
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long = "max-iters", default_value_t = 400)]
    pub max_iters: usize,
    /// Stop when the projected gradient norm falls below this value
    #[arg(long = "grad-tol", default_value_t = 1e-4)]
    pub grad_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Initial {
    /// Standing wave of the discrete equations (Newton)
    Stationary,
    /// Sampled analytic standing wave
    Sampled,
    /// Half-soliton of mass M on edge 1 only
    HalfSoliton,
    /// Seeded random vertex-continuous state of mass M
    Random,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, value_enum, default_value = "stationary")]
    pub initial: Initial,
    /// Trace sampling stride in steps
    #[arg(long = "observe-every", default_value_t = 1)]
    pub observe_every: usize,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            total_mass: self.mass,
            edges: self.edges,
            length: self.length,
            points: self.points,
            dt: self.dt,
            t_final: self.t_final,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.global.config.as_deref().map(Overrides::load).transpose() {
        Ok(f) => f,
        Err(e) => return usage_error(&e),
    };
    let env_out = std::env::var_os(OUT_ENV).map(PathBuf::from);
    let config = match RunConfig::resolve(file.as_ref(), &cli.global.overrides(), env_out) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let result = match &cli.command {
        Command::Verify => commands::verify(&config),
        Command::Scan { curve } => commands::scan(&config, curve),
        Command::Profile { kind } => commands::profile(&config, kind),
        Command::Flow(args) => commands::flow(&config, args),
        Command::Evolve(args) => commands::evolve(&config, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}

fn usage_error(e: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}
