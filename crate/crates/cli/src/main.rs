//! `cqbc`: batch front-end for rate-region computations and the coset-code
//! simulator. One command per process; reports are JSON, plot data CSV.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Outcome;
use config::RunConfig;
use cqbc_core::finite_field::Field;
use cqbc_core::Error;

const EXIT_OK: u8 = 0;
const EXIT_INTERNAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERTION: u8 = 3;
const EXIT_CAP: u8 = 4;
const EXIT_NON_PRIME: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Separation conditions and bound identities of the reference examples.
    VerifyExamples,
    /// All rate-region constants of the configured state.
    Quantities,
    /// Slack table of one rate point (optionally with auxiliaries).
    CheckPoint,
    /// Eliminated rate region: constraint and boundary CSVs.
    Project,
    /// Monte-Carlo coset-code simulation over the configured block lengths.
    Simulate,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyExamples => "verify-examples",
            Command::Quantities => "quantities",
            Command::CheckPoint => "check-point",
            Command::Project => "project",
            Command::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cqbc", version, about = "Rate regions and coset-code simulation for three-user cq broadcast channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the report and data files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// What to print on stdout: the JSON report or the primary CSV table.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::NonPrimeField(_) => EXIT_NON_PRIME,
                Error::CapExceeded(_) => EXIT_CAP,
                Error::LpDefect(_) => EXIT_INTERNAL,
                _ => EXIT_CONFIG,
            };
        }
        if cause.downcast_ref::<commands::ConfigError>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<std::io::Error>().is_some()
        {
            return EXIT_CONFIG;
        }
    }
    EXIT_INTERNAL
}

fn load(cli: &Cli) -> anyhow::Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| commands::ConfigError("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(c) = &cfg.command {
        if c != cli.command.name() {
            anyhow::bail!(commands::ConfigError(format!(
                "config is for `{c}` but `{}` was requested",
                cli.command.name()
            )));
        }
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Field::new(cfg.q)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let cfg = load(cli)?;
    let out = match cli.command {
        Command::VerifyExamples => commands::verify_examples(&cfg)?,
        Command::Quantities => commands::quantities(&cfg)?,
        Command::CheckPoint => commands::check_point_cmd(&cfg)?,
        Command::Project => commands::project(&cfg)?,
        Command::Simulate => commands::simulate(&cfg)?,
    };
    let json = serde_json::to_string_pretty(&out.report)?;
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", cli.command.name())), &json)?;
        for (name, body) in &out.files {
            std::fs::write(dir.join(name), body)?;
        }
    }
    match cli.format {
        Format::Json => println!("{json}"),
        Format::Csv => print!("{}", out.primary_csv),
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) if out.assertion_failed => {
            eprintln!("error: asserted identities do not hold");
            ExitCode::from(EXIT_ASSERTION)
        }
        Ok(_) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
