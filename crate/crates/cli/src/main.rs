//! `flatcoh`: command-line front end over the flatcoh library.

mod commands;
mod input;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatcoh::{Error, Precision};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "flatcoh",
    version,
    about = "Flat line bundles on elliptic curves: growth classes, Ueda constants, witnesses and profiles"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Bit cap for convergent denominators and constructed partial quotients.
    #[arg(long, global = true, default_value_t = 4096, value_parser = clap::value_parser!(u64).range(64..))]
    pub precision: u64,
    /// Convergents (single numbers) or orbit points (pairs) used by classifiers; default level range.
    #[arg(long, global = true, default_value_t = 40)]
    pub horizon: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl RunConfig {
    pub fn prec(&self) -> Precision {
        Precision::with_bits(self.precision)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Growth class of a single rotation number.
    ClassifyTheta(commands::ThetaArgs),
    /// Growth class, distance and neighborhood row of a flat bundle.
    BundleCase(commands::BundleCaseArgs),
    /// Ueda constant bounds per level.
    Ueda(commands::UedaArgs),
    /// Degreewise solve of a cocycle file.
    SolveCocycle(commands::SolveArgs),
    /// Taylor or Laurent witness family with its certificate.
    Witness(commands::WitnessArgs),
    /// Theta or wild toroidal group.
    Toroidal(commands::ToroidalArgs),
    /// Nine-point blow-up of the plane: ninth point and cohomology profile.
    Blowup9(commands::Blowup9Args),
    /// Cohomology profile of a surface complement.
    Profile(commands::ProfileArgs),
}

/// Failure with its exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::PrecisionExhausted(_)) => 3,
            Failure::Lib(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// A finished report: JSON always, CSV where the subcommand defines columns.
pub struct Report {
    pub json: serde_json::Value,
    pub csv: Option<String>,
}

fn render(report: Report, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).map_err(|e| Failure::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            report.csv.ok_or_else(|| Failure::Usage("this subcommand has no CSV form; use --format json".into()))
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let cfg = &cli.run;
    let report = match &cli.command {
        Command::ClassifyTheta(a) => commands::classify_theta(a, cfg)?,
        Command::BundleCase(a) => commands::bundle_case(a, cfg)?,
        Command::Ueda(a) => commands::ueda(a, cfg)?,
        Command::SolveCocycle(a) => commands::solve_cocycle(a, cfg)?,
        Command::Witness(a) => commands::witness(a, cfg)?,
        Command::Toroidal(a) => commands::toroidal(a, cfg)?,
        Command::Blowup9(a) => commands::blowup9(a, cfg)?,
        Command::Profile(a) => commands::profile(a, cfg)?,
    };
    let text = render(report, cfg.format)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, &text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("flatcoh: {e}");
            ExitCode::from(e.code())
        }
    }
}
