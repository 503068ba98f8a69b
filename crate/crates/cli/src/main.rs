use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use okv_cli::report::{to_json, to_text};
use okv_cli::{load_fixture, run, CheckKind, CliError, Command, JobSpec, Options};
use okv_core::Limits;

#[derive(Parser)]
#[command(name = "okv", version, about = "Flag valuations, value semigroups and toric degenerations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Valuation of every section and the image of the whole space.
    Nu(Common),
    /// Body estimate from the slices of degree 1 to M.
    Body(Common),
    /// Slices, minimal generators and the degree-one generation report.
    Semigroup(Common),
    /// Normality, saturation, restriction or compatibility check.
    Check {
        kind: Kind,
        #[command(flatten)]
        common: Common,
    },
    /// Presentation, relations, weight vector and flatness report.
    Degenerate(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Normality,
    Saturation,
    Restriction,
    Compatibility,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Common {
    /// Named example job.
    #[arg(long, conflicts_with = "input")]
    fixture: Option<String>,
    /// JSON job file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Truncation degree M, overriding the job.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Relation degree D, overriding the job.
    #[arg(long)]
    relation_degree: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Largest number of label monomials in one degree.
    #[arg(long)]
    cap_monomials: Option<usize>,
    /// Largest number of terms in one power of the section space.
    #[arg(long)]
    cap_terms: Option<usize>,
    /// Flag rank r for `check restriction`.
    #[arg(long)]
    rank: Option<usize>,
    /// Valuation prefix a1,a2,... for `check saturation`.
    #[arg(long, value_delimiter = ',')]
    prefix: Vec<u32>,
}

fn load(common: &Common) -> Result<JobSpec, CliError> {
    let mut job = match (&common.fixture, &common.input) {
        (Some(name), None) => load_fixture(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            JobSpec::from_json(&text)?
        }
        _ => return Err(CliError::Validation("give exactly one of --fixture or --input".into())),
    };
    if common.max_degree.is_some() {
        job.max_degree = common.max_degree;
    }
    if common.relation_degree.is_some() {
        job.relation_degree = common.relation_degree;
    }
    Ok(job)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Nu(c) => (Command::Nu, c),
        Cmd::Body(c) => (Command::Body, c),
        Cmd::Semigroup(c) => (Command::Semigroup, c),
        Cmd::Degenerate(c) => (Command::Degenerate, c),
        Cmd::Check { kind, common } => {
            let kind = match kind {
                Kind::Normality => CheckKind::Normality,
                Kind::Saturation => CheckKind::Saturation,
                Kind::Restriction => CheckKind::Restriction,
                Kind::Compatibility => CheckKind::Compatibility,
            };
            (Command::Check(kind), common)
        }
    };
    let defaults = Limits::default();
    let opts = Options {
        limits: Limits {
            max_terms: common.cap_terms.unwrap_or(defaults.max_terms),
            max_monomials: common.cap_monomials.unwrap_or(defaults.max_monomials),
        },
        rank: common.rank,
        prefix: common.prefix.clone(),
    };
    match load(&common).and_then(|job| run(command, &job, &opts)) {
        Ok(report) => {
            let text = match common.format {
                Format::Json => to_json(&report),
                Format::Text => to_text(&report),
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error.kind = {}\nerror.message = {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
