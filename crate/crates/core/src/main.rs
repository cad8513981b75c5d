use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use evagap::cli::{self, CliError};
use evagap::ReportDocument;

#[derive(Parser)]
#[command(
    name = "evagap",
    version,
    about = "R&D elasticity, country EVA and rating-gap analysis"
)]
struct Cli {
    /// Emit the machine-readable JSON document instead of text tables.
    #[arg(long, global = true)]
    json: bool,
    /// Decimal places for every numeric cell in text output.
    #[arg(long, global = true, value_name = "N")]
    precision: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProjectionInputs {
    /// Economy configuration (JSON).
    #[arg(long)]
    economy: PathBuf,
    /// Projection configuration (JSON).
    #[arg(long)]
    projection: PathBuf,
}

#[derive(Args)]
struct GapInputs {
    /// One-row peer CSV describing the subject country.
    #[arg(long)]
    subject: PathBuf,
    /// Peer indicator CSV.
    #[arg(long)]
    peers: PathBuf,
    /// Exclusions and investment components (JSON).
    #[arg(long = "gap-config")]
    gap_config: PathBuf,
    /// Exit with code 3 when the requirement is unreachable.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Log-log elasticity of GDP with respect to R&D.
    Regress {
        #[arg(long)]
        rd: PathBuf,
        #[arg(long)]
        gdp: PathBuf,
    },
    /// Historical EVA table.
    Eva {
        #[arg(long)]
        economy: PathBuf,
    },
    /// Projected EVA, R&D share path and present value.
    Project(ProjectionInputs),
    /// Peer averages, indicator gaps and required investment.
    RatingGap {
        #[command(flatten)]
        gap: GapInputs,
        #[arg(long, requires = "projection")]
        economy: Option<PathBuf>,
        #[arg(long, requires = "economy")]
        projection: Option<PathBuf>,
    },
    /// All stages in one document.
    Report {
        #[command(flatten)]
        projection: ProjectionInputs,
        #[command(flatten)]
        gap: GapInputs,
        #[arg(long, requires = "gdp")]
        rd: Option<PathBuf>,
        #[arg(long, requires = "rd")]
        gdp: Option<PathBuf>,
    },
}

fn run(command: Command) -> Result<ReportDocument, CliError> {
    match command {
        Command::Regress { rd, gdp } => cli::cmd_regress(&cli::RegressArgs { rd, gdp }),
        Command::Eva { economy } => cli::cmd_eva(&cli::EvaArgs { economy }),
        Command::Project(p) => cli::cmd_project(&cli::ProjectArgs {
            economy: p.economy,
            projection: p.projection,
        }),
        Command::RatingGap {
            gap,
            economy,
            projection,
        } => cli::cmd_rating_gap(&cli::RatingGapArgs {
            subject: gap.subject,
            peers: gap.peers,
            gap_config: gap.gap_config,
            economy,
            projection,
            strict: gap.strict,
        }),
        Command::Report {
            projection,
            gap,
            rd,
            gdp,
        } => cli::cmd_report(&cli::ReportArgs {
            economy: projection.economy,
            projection: projection.projection,
            subject: gap.subject,
            peers: gap.peers,
            gap_config: gap.gap_config,
            regress: rd.zip(gdp).map(|(rd, gdp)| cli::RegressArgs { rd, gdp }),
            strict: gap.strict,
        }),
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args.command) {
        Ok(doc) => {
            let out = if args.json {
                doc.render_json()
            } else {
                doc.render_text(args.precision)
            };
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
