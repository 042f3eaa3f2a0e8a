//! `steinhc`: contact-homology calculator for subcritical Stein domains.

mod commands;
mod input;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use output::Format;

#[derive(Debug)]
pub enum CliError {
  /// Malformed input or arguments; exit code 2.
  Invalid(String),
}

impl std::fmt::Display for CliError {
  fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
    match self {
      CliError::Invalid(msg) => write!(f, "invalid input: {msg}"),
    }
  }
}

pub(crate) fn invalid(e: impl std::fmt::Display) -> CliError { CliError::Invalid(e.to_string()) }

#[derive(Debug, Parser)]
#[command(name = "steinhc", version, about = "Contact homology of subcritical Stein domains")]
struct Cli {
  /// Input file (`-` for stdin).
  #[arg(long, global = true, value_name = "PATH")]
  input:   Option<String>,
  #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
  format:  Format,
  #[command(subcommand)]
  command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
  /// Indices and degrees of the generators, or an expected moduli dimension.
  CzIndex(CzIndexArgs),
  /// Cylindrical contact homology of the boundary, with the isomorphism check.
  CylHc(CutoffArgs),
  /// Dimensions of full contact homology.
  FullHc(FullHcArgs),
  /// Pairings of generators with cochains and genus-0 correlators.
  Pairing(PairingArgs),
  /// Numerical checks of the Reeb flow on a quadratic handle.
  ReebVerify(ReebArgs),
  /// Cylindrical contact homology of a prequantization bundle.
  PrequantHc(PrequantArgs),
  /// Betti-number relations for polarization data.
  PolarizationCheck,
  /// Compares both computations of cylindrical contact homology.
  CrossCheck(CutoffArgs),
}

#[derive(Debug, Args)]
pub struct CutoffArgs {
  #[arg(long)]
  pub cutoff: i64,
}

#[derive(Debug, Args)]
pub struct FullHcArgs {
  #[arg(long)]
  pub cutoff: usize,
}

#[derive(Debug, Args)]
pub struct PrequantArgs {
  /// Degree cutoff, an integer or `p/q`.
  #[arg(long)]
  pub cutoff: String,
}

#[derive(Debug, Args)]
pub struct CzIndexArgs {
  #[arg(long)]
  pub m_max:    u32,
  /// Genus of the curve; switches to expected-dimension mode.
  #[arg(long)]
  pub genus:    Option<u32>,
  /// Indices of positive punctures, comma separated.
  #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
  pub mu_plus:  Vec<i64>,
  /// Indices of negative punctures, comma separated.
  #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
  pub mu_minus: Vec<i64>,
  /// Number of marked points.
  #[arg(long, default_value_t = 0)]
  pub marked:   u32,
}

#[derive(Debug, Args)]
pub struct PairingArgs {
  /// Critical point of the generator.
  #[arg(long)]
  pub generator:       Option<String>,
  #[arg(long)]
  pub multiplicity:    Option<u32>,
  /// Cochain values as `id=p/q` pairs, comma separated.
  #[arg(long, value_delimiter = ',')]
  pub cochain:         Vec<String>,
  /// Print the pairing matrix of all generators in this degree.
  #[arg(long)]
  pub matrix_degree:   Option<i64>,
  /// Number of marked points; switches to correlator mode.
  #[arg(long)]
  pub marked:          Option<u32>,
  /// Intersection number of the two cycles.
  #[arg(long)]
  pub cup:             Option<String>,
  /// The orbit is the simple orbit over the minimum.
  #[arg(long)]
  pub simple_minimum:  bool,
  #[arg(long)]
  pub deg1:            Option<u32>,
  #[arg(long)]
  pub deg2:            Option<u32>,
}

#[derive(Debug, Args)]
pub struct ReebArgs {
  /// Largest multiplicity checked.
  #[arg(long)]
  pub m_max:        Option<u32>,
  /// List closed orbits up to this index instead of checking the formula.
  #[arg(long)]
  pub max_cz:       Option<i64>,
  /// Integrate a trajectory from the orbit point of `--plane`.
  #[arg(long)]
  pub trajectory:   bool,
  /// Measure first-return times of the simple orbits.
  #[arg(long)]
  pub first_return: bool,
  /// Elliptic plane of the starting orbit (default: the last one).
  #[arg(long)]
  pub plane:        Option<u32>,
  /// Reeb time to integrate for.
  #[arg(long)]
  pub time:         Option<f64>,
  /// Integration step; defaults to 1e-4 of the orbit action.
  #[arg(long)]
  pub dt:           Option<f64>,
}

fn main() -> ExitCode {
  env_logger::Builder::from_env(env_logger::Env::new().filter_or("STEINHC_LOG", "warn")).init();
  let cli = match Cli::try_parse() {
    Ok(cli) => cli,
    Err(e) => e.exit(),
  };
  match run(&cli) {
    Ok(report) => {
      let mut stdout = std::io::stdout().lock();
      if stdout.write_all(report.render(cli.format).as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
      }
      if report.passed {
        ExitCode::SUCCESS
      } else {
        ExitCode::from(1)
      }
    },
    Err(e) => {
      eprintln!("steinhc: {e}");
      ExitCode::from(2)
    },
  }
}

fn run(cli: &Cli) -> Result<output::Report, CliError> {
  let path = cli.input.as_deref().ok_or_else(|| CliError::Invalid("--input <PATH> is required".into()))?;
  let file = input::load(path)?;
  log::info!("loaded {} input from {path}", file.kind());
  match &cli.command {
    Command::CzIndex(args) => commands::cz_index(&file, args),
    Command::CylHc(args) => commands::cyl_hc(&file, args),
    Command::FullHc(args) => commands::full_hc(&file, args),
    Command::Pairing(args) => commands::pairing(&file, args),
    Command::ReebVerify(args) => commands::reeb_verify(&file, args),
    Command::PrequantHc(args) => commands::prequant_hc(&file, args),
    Command::PolarizationCheck => commands::polarization_check(&file),
    Command::CrossCheck(args) => commands::cross_check(&file, args),
  }
}
