//! `mtk`: load a workspace file of multicategories, presheaves, graphs and
//! jobs, run the jobs of one kind and print a JSON or markdown report.

mod error;
mod jobs;
mod report;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use error::CliError;
use jobs::Settings;
use report::Report;
use workspace::{Mode, Which, Workspace};

#[derive(Parser)]
#[command(name = "mtk", version, about = "Finite multitensor constructions and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate every multicategory in the file.
    Validate(Common),
    /// Run the tensor jobs.
    Tensor(Common),
    /// Run the lift jobs, with traces and the route comparison.
    Lift(Common),
    /// Run the check jobs, optionally only those of one kind.
    Check {
        which: Option<Which>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the coequaliser jobs.
    Coeq(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    file: PathBuf,
    /// Size bound for exhaustive checks, overriding the jobs' own.
    #[arg(long)]
    bound: Option<usize>,
    /// Step budget for sequential constructions.
    #[arg(long)]
    budget: Option<usize>,
    /// Construction used by tensor jobs, overriding the jobs' own.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, conflicts_with = "md")]
    json: bool,
    /// Print a markdown summary instead of JSON.
    #[arg(long)]
    md: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common, which) = match &cli.command {
        Command::Validate(c) => ("validate", c, None),
        Command::Tensor(c) => ("tensor", c, None),
        Command::Lift(c) => ("lift", c, None),
        Command::Check { which, common } => ("check", common, *which),
        Command::Coeq(c) => ("coeq", c, None),
    };
    let settings = Settings { bound: common.bound, budget: common.budget, mode: common.mode };
    let file = common.file.display().to_string();
    let report = match execute(name, common, which, &settings) {
        Ok(r) => r,
        Err(err) => Report::failed(name, &file, &settings, &err),
    };
    if common.md {
        print!("{}", report.markdown());
    } else {
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialise"));
    }
    ExitCode::from(report.exit_code as u8)
}

fn execute(name: &str, common: &Common, which: Option<Which>, settings: &Settings) -> Result<Report, CliError> {
    let file = common.file.display().to_string();
    if settings.budget.is_some_and(|b| b < 2) {
        return Err(CliError::Input("--budget must be at least 2".into()));
    }
    let text = std::fs::read_to_string(&common.file).map_err(|e| CliError::Input(format!("cannot read {file}: {e}")))?;
    let parsed = workspace::parse(&text)?;
    if name == "validate" {
        let built = workspace::build_multicats(&parsed)?;
        return Ok(Report::validation(&file, settings, built));
    }
    let ws = Workspace::resolve(parsed)?;
    let outcomes = ws
        .file
        .jobs
        .iter()
        .enumerate()
        .filter(|(_, j)| j.command() == name)
        .filter(|(_, j)| match (which, j) {
            (Some(w), workspace::JobSpec::Check { which: jw, .. }) => *jw == w,
            _ => true,
        })
        .map(|(i, j)| jobs::run(&ws, i, j, settings))
        .collect();
    Ok(Report::jobs(name, &file, settings, outcomes))
}
