//! The `mdpsynth` command line: argument parsing, configuration and output.

pub mod commands;
pub mod config;
mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdpsynth::mdp::Boundary;
use mdpsynth::values::Backend;

use config::{Config, FileConfig, Overrides};

/// Exit status of a successful run.
pub const EXIT_OK: i32 = 0;
/// Bad input or a failed precondition.
pub const EXIT_DOMAIN: i32 = 1;
/// Malformed command line.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Domain(mdpsynth::Error),
    /// Reported results are complete but some check failed.
    Failed(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<mdpsynth::Error> for CliError {
    fn from(e: mdpsynth::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "mdpsynth", version, about = "Strategy synthesis and analysis for countable MDPs")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file with defaults for the options below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Arithmetic backend: exact (alias rational), float or auto.
    #[arg(long, global = true, value_parser = config::parse_backend)]
    pub backend: Option<Backend>,
    /// Convergence threshold of float value iteration.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Sweep cap of float value iteration.
    #[arg(long, global = true)]
    pub iteration_cap: Option<u64>,
    /// Successors kept per infinitely branching state when truncating.
    #[arg(long, global = true)]
    pub branch_cap: Option<usize>,
    /// Seed of simulations and random instances.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List or export the built-in example MDPs.
    #[command(subcommand)]
    Gallery(GalleryCommand),
    /// Optimal values of an objective on a finite MDP.
    Value(ValueArgs),
    /// Synthesize an MD strategy.
    Synthesize(SynthesizeArgs),
    /// Exact value of an MD strategy, or Borel–Cantelli sums of a gallery strategy.
    Evaluate(EvaluateArgs),
    /// Seeded Monte Carlo simulation.
    Simulate(SimulateArgs),
    /// Futility certificate of a finite-memory strategy on a gallery MDP.
    Futility(FutilityArgs),
    /// Two-sided value bounds from pessimistic and optimistic truncations.
    Truncate(TruncateArgs),
    /// Write an MDP or a truncation as JSON or DOT.
    Export(ExportArgs),
    /// Run the acceptance criteria.
    Accept(AcceptArgs),
}

#[derive(Debug, Subcommand)]
pub enum GalleryCommand {
    List,
    Export(GalleryExportArgs),
}

#[derive(Debug, Args)]
pub struct GalleryExportArgs {
    #[arg(long)]
    pub name: String,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pessimistic)]
    pub boundary: BoundaryArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Pessimistic,
    Optimistic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Pessimistic => Boundary::Pessimistic,
            BoundaryArg::Optimistic => Boundary::Optimistic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveKind {
    Reach,
    Safety,
    Parity,
    Buchi,
    Cobuchi,
    Parity012,
}

#[derive(Debug, Args, Clone)]
pub struct ObjectiveArgs {
    #[arg(long, value_enum)]
    pub objective: ObjectiveKind,
    /// Color set of a parity objective; defaults to the colors of the MDP.
    #[arg(long, value_delimiter = ',')]
    pub colors: Vec<u32>,
    /// Target states of a reachability objective.
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<String>,
    /// Target colors of a reachability objective.
    #[arg(long, value_delimiter = ',')]
    pub target_colors: Vec<u32>,
    /// States a safety objective avoids.
    #[arg(long, value_delimiter = ',')]
    pub avoid: Vec<String>,
    /// Colors a safety objective avoids; the default avoids every nonzero color.
    #[arg(long, value_delimiter = ',')]
    pub avoid_colors: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct ValueArgs {
    #[arg(long)]
    pub mdp: PathBuf,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Same as `--backend exact`.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery")]
    pub mdp: Option<PathBuf>,
    /// Countable input; reach and cobuchi only.
    #[arg(long)]
    pub gallery: Option<String>,
    #[command(flatten)]
    pub objective: ObjectiveArgs,
    /// Slack of the reach and cobuchi constructions.
    #[arg(long, default_value = "0.05")]
    pub eps: String,
    /// Largest truncation radius tried on countable input.
    #[arg(long, default_value_t = 256)]
    pub max_radius: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery", requires = "objective")]
    pub mdp: Option<PathBuf>,
    #[arg(long)]
    pub gallery: Option<String>,
    /// Strategy file with `--mdp`, strategy name with `--gallery`.
    #[arg(long)]
    pub strategy: String,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveKind>,
    #[arg(long, value_delimiter = ',')]
    pub colors: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub target_colors: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub avoid: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub avoid_colors: Vec<u32>,
    /// Cycles summed for gallery strategies.
    #[arg(long, default_value_t = 60)]
    pub cycles: usize,
}

impl EvaluateArgs {
    pub fn objective_args(&self) -> Option<ObjectiveArgs> {
        Some(ObjectiveArgs {
            objective: self.objective?,
            colors: self.colors.clone(),
            target: self.target.clone(),
            target_colors: self.target_colors.clone(),
            avoid: self.avoid.clone(),
            avoid_colors: self.avoid_colors.clone(),
        })
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery")]
    pub mdp: Option<PathBuf>,
    #[arg(long)]
    pub gallery: Option<String>,
    /// Strategy file with `--mdp`, strategy name with `--gallery`.
    #[arg(long, required_unless_present = "transducer")]
    pub strategy: Option<String>,
    /// Transducer file, instead of `--strategy`.
    #[arg(long, conflicts_with = "strategy")]
    pub transducer: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    pub episodes: u64,
    #[arg(long, default_value_t = 1_000)]
    pub horizon: u64,
    /// Anchor cycles reported for gallery MDPs.
    #[arg(long, default_value_t = 10)]
    pub cycles: usize,
    /// States whose visit is reported as event `target`.
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<String>,
    /// States whose visits are counted.
    #[arg(long, value_delimiter = ',')]
    pub track: Vec<String>,
    /// Alias of `--format`.
    #[arg(long, value_enum)]
    pub report: Option<Format>,
}

#[derive(Debug, Args)]
pub struct FutilityArgs {
    #[arg(long)]
    pub gallery: String,
    #[arg(long)]
    pub transducer: PathBuf,
    /// Product states explored per anchor mode.
    #[arg(long)]
    pub node_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TruncateArgs {
    #[arg(long)]
    pub gallery: String,
    #[arg(long)]
    pub radius: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, conflicts_with = "gallery", required_unless_present = "gallery")]
    pub mdp: Option<PathBuf>,
    #[arg(long)]
    pub gallery: Option<String>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Pessimistic)]
    pub boundary: BoundaryArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AcceptArgs {
    /// `all` or a comma-separated list of criterion numbers.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

/// Everything a command needs besides its own arguments.
pub struct Ctx<'a> {
    pub config: Config,
    pub format: Format,
    pub out: &'a mut dyn Write,
}

/// Parses `argv` and runs the command, reading the environment through `env`.
pub fn run_with_env<I, T>(
    argv: I,
    env: &dyn Fn(&str) -> Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = cli.format.unwrap_or_default();
    match dispatch(cli, env, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if format == Format::Json {
                let body = serde_json::json!({ "schema": 1, "error": e.to_string(), "exit": e.exit_code() });
                let _ = writeln!(err, "{body}");
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(argv, &|k| std::env::var(k).ok(), out, err)
}

fn dispatch(cli: Cli, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => Some(FileConfig::load(p)?),
        None => None,
    };
    let flags = Overrides {
        backend: cli.backend,
        tolerance: cli.tolerance,
        iteration_cap: cli.iteration_cap,
        radius: None,
        branch_cap: cli.branch_cap,
        seed: cli.seed,
    };
    let config = Config::resolve(&flags, env, file.as_ref())?;
    let mut format = cli.format.unwrap_or_default();
    if let Command::Simulate(a) = &cli.command {
        if cli.format.is_none() {
            format = a.report.unwrap_or_default();
        }
    }
    let mut ctx = Ctx { config, format, out };
    match cli.command {
        Command::Gallery(GalleryCommand::List) => commands::gallery_list(&mut ctx),
        Command::Gallery(GalleryCommand::Export(a)) => {
            let a = ExportArgs { mdp: None, gallery: Some(a.name), radius: a.radius, boundary: a.boundary, out: a.out };
            commands::export(&mut ctx, &a)
        }
        Command::Value(a) => commands::value(&mut ctx, &a),
        Command::Synthesize(a) => commands::synthesize(&mut ctx, &a),
        Command::Evaluate(a) => commands::evaluate(&mut ctx, &a),
        Command::Simulate(a) => commands::simulate(&mut ctx, &a),
        Command::Futility(a) => commands::futility(&mut ctx, &a),
        Command::Truncate(a) => commands::truncate(&mut ctx, &a),
        Command::Export(a) => commands::export(&mut ctx, &a),
        Command::Accept(a) => commands::accept(&mut ctx, &a),
    }
}
