//! `fidelimax`: build minimax fidelity estimators from measurement plans,
//! evaluate them on data, compute closed-form risks, generate schemes and
//! run simulation experiments.

#![forbid(unsafe_code)]

mod commands;
mod error;
mod io;
mod target;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "fidelimax", version, about = "Minimax fidelity estimation with rigorous confidence intervals")]
struct Cli {
    /// Worker threads for trials, curves and bootstrap.
    #[arg(long, global = true, env = "FIDELIMAX_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan file utilities.
    #[command(subcommand)]
    Plan(PlanCommand),
    /// Solve the saddle point of a plan and write its estimator.
    Build(BuildArgs),
    /// Evaluate an estimator on outcome counts.
    Estimate(EstimateArgs),
    /// Closed-form risks and sample complexities.
    #[command(subcommand)]
    Risk(RiskCommand),
    /// Generate measurement plans.
    #[command(subcommand)]
    Scheme(SchemeCommand),
    /// Sample one dataset from a plan.
    Simulate(SimulateArgs),
    /// Repeated simulated experiments and empirical coverage.
    Trials(TrialsArgs),
    /// Solver risk over a grid of Pauli counts and repetitions (CSV).
    Curve(CurveArgs),
    /// Maximum-likelihood reconstruction with an optional bootstrap interval.
    Mle(MleArgs),
    /// Compare noiseless and per-shot perturbed runs against the robustness bound.
    Robustness(RobustnessArgs),
}

#[derive(Subcommand)]
enum PlanCommand {
    /// Check every plan invariant; exit 1 listing violations.
    Validate { plan: PathBuf },
}

#[derive(Args)]
struct SolverArgs {
    /// Padding δ added to the reported risk.
    #[arg(long, default_value_t = 1e-4)]
    delta: f64,
    /// Relative stall tolerance of the inner solve.
    #[arg(long)]
    inner_tolerance: Option<f64>,
    /// Iteration cap of the inner solve.
    #[arg(long)]
    inner_max_iters: Option<usize>,
    /// Relative precision of α*.
    #[arg(long)]
    outer_tolerance: Option<f64>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Use the two-parameter solver for single two-outcome plans in span{ρ, I − ρ}.
    #[arg(long)]
    reduced_two_outcome: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    estimator: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct RiskCommon {
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    /// Print the shots needed for --risk instead of the risk at --reps.
    #[arg(long, requires = "risk")]
    invert: bool,
    /// Target risk for --invert.
    #[arg(long)]
    risk: Option<f64>,
    /// Number of repetitions R.
    #[arg(long, required_unless_present = "invert")]
    reps: Option<u64>,
}

#[derive(Subcommand)]
enum RiskCommand {
    /// Optimal measurement {ρ, I − ρ}: ½√(1 − (ε/2)^{2/R}).
    LowerBound(RiskCommon),
    /// Two-outcome effective POVM Θ = ω₁ρ + ω₂(I − ρ).
    TwoOutcome {
        #[arg(long)]
        omega1: f64,
        #[arg(long)]
        omega2: f64,
        #[command(flatten)]
        common: RiskCommon,
    },
    /// Uniform stabilizer sampling in dimension d.
    Stabilizer {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: RiskCommon,
    },
    /// Randomized Pauli sampling with weight N = Σ|tr(Wρ)|.
    Pauli {
        #[arg(long)]
        norm: f64,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: RiskCommon,
    },
    /// Factor ϑ(ε) relating the computed risk to the minimax optimum.
    Vartheta {
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
    },
}

#[derive(Args)]
struct PlanOut {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = fidelimax_core::DEFAULT_EPSILON_O)]
    epsilon_o: f64,
}

#[derive(Subcommand)]
enum SchemeCommand {
    /// The two-outcome measurement {ρ, I − ρ}.
    Optimal {
        #[arg(long, help = target::STATE_HELP)]
        target: String,
        #[arg(long)]
        reps: u64,
        #[command(flatten)]
        out: PlanOut,
    },
    /// Random stabilizer measurements, written as their effective POVM.
    Stabilizer {
        /// GHZ group on n qubits (n = 2 is the Bell state).
        #[arg(long, conflicts_with = "generators", required_unless_present = "generators")]
        n: Option<usize>,
        /// Explicit generators, e.g. XX,ZZ.
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the sampled stabilizer elements.
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[command(flatten)]
        out: PlanOut,
    },
    /// Randomized Pauli measurements, written as their effective POVM.
    Pauli {
        #[arg(long, help = target::STATE_HELP)]
        target: String,
        #[arg(long)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[command(flatten)]
        out: PlanOut,
    },
    /// Pauli settings prescribed by direct fidelity estimation.
    Dfe {
        #[arg(long, help = target::STATE_HELP)]
        target: String,
        /// Accuracy the prescription aims for.
        #[arg(long)]
        risk: f64,
        #[arg(long, default_value = "subspace")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: PlanOut,
    },
    /// Explicit Pauli observables, each measured R times.
    PauliSet {
        #[arg(long, help = target::STATE_HELP)]
        target: String,
        /// Comma-separated strings, e.g. XX,ZZ.
        #[arg(long)]
        paulis: String,
        #[arg(long, default_value = "subspace")]
        mode: String,
        #[arg(long)]
        reps: u64,
        #[command(flatten)]
        out: PlanOut,
    },
}

#[derive(Args)]
struct StateArgs {
    /// True state (defaults to the plan's target).
    #[arg(long, help = target::STATE_HELP)]
    state: Option<String>,
    /// Depolarizing weight applied to the true state.
    #[arg(long, default_value_t = 0.0)]
    depolarize: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    plan: PathBuf,
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrialsArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    estimator: PathBuf,
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, help = target::STATE_HELP)]
    target: String,
    /// Comma-separated Pauli counts L.
    #[arg(long, value_delimiter = ',')]
    l: Vec<usize>,
    /// Comma-separated repetitions R.
    #[arg(long, value_delimiter = ',')]
    r: Vec<u64>,
    /// Draw Paulis from all non-identity strings or only the target's support.
    #[arg(long, default_value = "support")]
    pool: String,
    #[arg(long, default_value = "subspace")]
    mode: String,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = fidelimax_core::DEFAULT_EPSILON_O)]
    epsilon_o: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct MleArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Bootstrap replicates (at least 100); omit for no interval.
    #[arg(long)]
    bootstrap: Option<usize>,
    /// Interval level is 1 − ε (defaults to the plan's ε).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RobustnessArgs {
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    estimator: PathBuf,
    #[command(flatten)]
    state: StateArgs,
    #[arg(long)]
    delta_s: f64,
    #[arg(long)]
    delta_m: f64,
    /// Independent runs, seeded from --seed.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    commands::dispatch(cli.command)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
