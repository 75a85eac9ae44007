mod commands;
mod input;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use input::Source;
use std::path::PathBuf;
use std::process::ExitCode;
use torex::extremal::Convention;

#[derive(Parser, Debug)]
#[command(name = "torex", version, about = "Stability, classification and explicit metrics for labelled polygons with cusp facets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stability, classification and the explicit solution when one is known
    Analyze(AnalyzeArgs),
    /// Stability functional along the family shrinking towards a facet
    Fchi(FchiArgs),
    /// CSV files for the outline, cusp facets, scalar curvature and boundary profiles
    Plot(PlotArgs),
    /// Classification over a parameter grid
    Sweep(SweepArgs),
    /// Build an explicit solution from ansatz data
    Construct(ConstructArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Main,
    Appendix,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Main => Convention::Main,
            ConventionArg::Appendix => Convention::Appendix,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Numerics {
    #[arg(long, value_enum, default_value = "main")]
    pub convention: ConventionArg,
    /// Points per side of the sample grids
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Finite-difference step
    #[arg(long, default_value_t = 1e-3)]
    pub fd_step: f64,
}

impl Numerics {
    fn validate(&self) -> Result<()> {
        if self.grid < 8 {
            bail!("--grid must be at least 8");
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 0.1) {
            bail!("--fd-step must lie in (0, 0.1]");
        }
        Ok(())
    }
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub numerics: Numerics,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FchiArgs {
    #[command(flatten)]
    pub source: Source,
    /// Facet (index or name); defaults to every cusp facet, or every facet when there is none
    #[arg(long)]
    pub facet: Option<String>,
    /// Samples per facet in the CSV
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `c, F(c)` samples
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub numerics: Numerics,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the six Hirzebruch cusp configurations of the three theorem cases
    #[arg(long)]
    pub panels: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// hirzebruch (m, a), qk (q, k) or dk (d, k)
    #[arg(long, value_enum)]
    pub preset: input::Preset,
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<i64>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    /// Fixed cusp set; defaults to every configuration of the family
    #[arg(long, value_delimiter = ',')]
    pub cusp: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnsatzArg {
    Product,
    Calabi,
    Hyperbolic,
    Bryant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Fibre,
    FibreSection,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub ansatz: Option<AnsatzArg>,
    /// Recognise the ansatz from a polygon instead
    #[command(flatten)]
    pub source: Source,
    /// Roots of A as `lo,hi`
    #[arg(long)]
    pub alpha: Option<String>,
    /// Roots of B as `lo,hi`
    #[arg(long)]
    pub beta: Option<String>,
    /// Labels at the roots of A (0 for a cusp)
    #[arg(long)]
    pub r_alpha: Option<String>,
    #[arg(long)]
    pub r_beta: Option<String>,
    /// Hyperbolic: larger root of A
    #[arg(long)]
    pub alpha_inf: Option<String>,
    /// Hyperbolic: fibre parameter
    #[arg(long, default_value = "1")]
    pub b: String,
    #[arg(long, value_enum, default_value = "fibre")]
    pub case: CaseArg,
    /// Bryant: labels of the two axes
    #[arg(long)]
    pub labels: Option<String>,
    #[command(flatten)]
    pub numerics: Numerics,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Analyze(a) => {
            a.numerics.validate()?;
            commands::analyze(&a)
        }
        Command::Fchi(a) => commands::fchi(&a),
        Command::Plot(a) => {
            a.numerics.validate()?;
            commands::plot(&a)
        }
        Command::Sweep(a) => commands::sweep(&a),
        Command::Construct(a) => {
            a.numerics.validate()?;
            commands::construct(&a)
        }
    }
}

/// 0 on success, 2 for input errors, 3 when a cross-check of the report failed.
fn exit_code(outcome: &Result<bool>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 3,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    match &outcome {
        Ok(false) => eprintln!("error: internal cross-check failed (see report)"),
        Err(e) => eprintln!("error: {e:#}"),
        Ok(true) => {}
    }
    ExitCode::from(exit_code(&outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(true)), 0);
        assert_eq!(exit_code(&Ok(false)), 3);
        assert_eq!(exit_code(&Err(anyhow::anyhow!("bad input"))), 2);
    }

    #[test]
    fn cli_definition_is_valid() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
