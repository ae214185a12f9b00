//! File formats and command-line front end for `creditshare-core`.
//!
//! Every command prints JSON (or CSV for tables and curves) on stdout and
//! exits with 0 on success, 1 on usage or file errors, 2 on invalid
//! parameters, 3 when a numerical method fails to converge and 4 when a
//! precondition or regime requirement is not met.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use creditshare_core::contracts::ContractFamily;

mod commands;
pub mod error;
pub mod io;
pub mod profile;

pub use error::{CliError, CliResult};
use profile::ProfileSpec;

#[derive(Debug, Parser)]
#[command(name = "creditshare", version, about = "Research games with breakthrough payoff externalities")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a parameter file against the model assumptions.
    Validate(ParamArgs),
    /// First-best, individual and crossing thresholds with the regime.
    Thresholds(ParamArgs),
    /// Regime, loser externality and threshold ordering.
    Classify(ParamArgs),
    /// Cooperative threshold and value.
    FirstBest {
        #[command(flatten)]
        params: ParamArgs,
        /// Belief at which to report the value and stopping time.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Symmetric Markov perfect equilibrium for the regime.
    Equilibrium {
        #[command(flatten)]
        params: ParamArgs,
        /// Stopping belief for overcompetitive games.
        #[arg(long = "p-t")]
        p_t: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        /// Check the equilibrium with the grid oracle.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Sharing-contract design and evaluation.
    #[command(subcommand)]
    Contract(ContractCommand),
    /// Heterogeneous effort capacities.
    #[command(subcommand)]
    Hetero(HeteroCommand),
    /// Belief-grid dynamic programming.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Monte Carlo simulation of a strategy profile.
    Simulate(SimulateArgs),
    /// CSV curves of level curves and equilibrium values.
    Curves {
        #[arg(value_enum)]
        kind: CurveKind,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, default_value_t = 0.001)]
        lo: f64,
        #[arg(long, default_value_t = 0.999)]
        hi: f64,
        /// Stopping beliefs for `over`; defaults to both ends and the midpoint.
        #[arg(long = "p-t", value_delimiter = ',')]
        p_t: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// JSON parameter file.
    #[arg(long)]
    params: PathBuf,
    /// Override a parameter, e.g. `--set pi_l=0.95`.
    #[arg(long = "set", value_name = "KEY=VAL")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Belief grid points.
    #[arg(long, default_value_t = 2001)]
    grid: usize,
    /// Time step of the oracle.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Debug, Args)]
struct EconomyArgs {
    /// Derive totals from a game parameter file instead.
    #[arg(long, conflicts_with_all = ["n", "r", "pi"])]
    params: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Total lump-sum prize.
    #[arg(long)]
    r: Option<f64>,
    /// Total continuation flow.
    #[arg(long)]
    pi: Option<f64>,
    #[arg(long = "pi-s")]
    pi_s: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    discount: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Winner,
    Effort,
}

impl From<FamilyArg> for ContractFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Winner => ContractFamily::WinnerBased,
            FamilyArg::Effort => ContractFamily::EffortBased,
        }
    }
}

#[derive(Debug, Args)]
struct DesignArgs {
    /// Share held fixed: `alpha-i=X` or `alpha-c=X`.
    #[arg(long, value_name = "KEY=VAL")]
    fix: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Winner)]
    family: FamilyArg,
    /// Efforts are not observed; verify along the time axis.
    #[arg(long)]
    unobservable: bool,
}

#[derive(Debug, Args)]
struct TerminalArgs {
    #[arg(long, conflicts_with = "efforts")]
    winner: Option<usize>,
    /// Comma-separated efforts at the breakthrough.
    #[arg(long, value_delimiter = ',')]
    efforts: Vec<f64>,
}

#[derive(Debug, Subcommand)]
enum ContractCommand {
    /// Contract whose guarantee equals the safe flow.
    Design {
        #[command(flatten)]
        economy: EconomyArgs,
        #[command(flatten)]
        design: DesignArgs,
    },
    Guarantee {
        #[arg(long)]
        contract: PathBuf,
        #[command(flatten)]
        economy: EconomyArgs,
    },
    /// Game parameters induced by a contract (usable as `--params`).
    Induce {
        #[arg(long)]
        contract: PathBuf,
        #[command(flatten)]
        economy: EconomyArgs,
    },
    Allocate {
        #[arg(long)]
        contract: PathBuf,
        #[command(flatten)]
        economy: EconomyArgs,
        #[command(flatten)]
        terminal: TerminalArgs,
    },
    /// Loser transfer that restores efficiency.
    Transfer(ParamArgs),
}

#[derive(Debug, Subcommand)]
enum HeteroCommand {
    Classify(ParamArgs),
    Value {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        p: f64,
    },
    Design {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        design: DesignArgs,
    },
    Guarantee {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        contract: PathBuf,
    },
    Induce {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        contract: PathBuf,
    },
    Allocate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        contract: PathBuf,
        #[command(flatten)]
        terminal: TerminalArgs,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    FirstBest {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Write the value table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One agent's best response to a symmetric opponent profile.
    BestResponse {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "equilibrium")]
        opponents: ProfileSpec,
        #[arg(long = "p-t")]
        p_t: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest gain from a unilateral deviation.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "equilibrium")]
        profile: ProfileSpec,
        #[arg(long = "p-t")]
        p_t: Option<f64>,
        #[arg(long = "max-gain", default_value_t = 5e-3)]
        max_gain: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    p0: f64,
    #[arg(long, default_value = "equilibrium")]
    profile: ProfileSpec,
    #[arg(long = "p-t")]
    p_t: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Horizon; defaults to 40/r.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Simulate the game induced by this contract on the parameters' totals.
    #[arg(long)]
    contract: Option<PathBuf>,
    /// Write one CSV row per replication.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CurveKind {
    /// Best-response level curves and the first-best value.
    Level,
    /// Undercompetitive value and effort.
    Under,
    /// Overcompetitive values for several stopping beliefs.
    Over,
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CommandResult { code, stdout: text, stderr: String::new() }
            } else {
                CommandResult { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(out) => CommandResult { code: out.code, stdout: out.stdout, stderr: String::new() },
        Err(e) => CommandResult { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
