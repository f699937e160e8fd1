//! `mast`: check, certify, run and sample `.lop` programs, and analyse sized
//! walks.

mod commands;
mod locate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "mast", version, about = "Almost-sure termination certificates for a probabilistic lambda-calculus")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Elaborate a derivation for the program and validate it.
    Check { file: PathBuf },
    /// Validate a certificate against the program, or elaborate one.
    Certify {
        file: PathBuf,
        /// Certificate to validate; with --elaborate, where to write it.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Build the certificate from the program's annotations.
        #[arg(long)]
        elaborate: bool,
    },
    /// Exact n-step value distribution.
    Eval {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
    },
    /// Monte-Carlo runs of the program.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Required with --format json.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        max_steps: u64,
    },
    /// Analyse a sized walk given inline, e.g. "walk{0:2/3, 2:1/3}".
    Walk {
        walk: String,
        /// Decide almost-sure termination.
        #[arg(long)]
        ast: bool,
        /// Tabulate Pr_n for n = 0..=N.
        #[arg(long)]
        horizon: Option<u64>,
        /// Start state for --horizon and --hitting.
        #[arg(long, default_value_t = 1)]
        from: u64,
        /// Bracket the probability of ever reaching 0 to this width.
        #[arg(long)]
        hitting: Option<String>,
    },
    /// Validate a reduction trace file.
    Trace { file: PathBuf },
}

/// What a command produced: an exit code and one rendering per format.
pub struct Outcome {
    pub code: u8,
    pub text: String,
    pub json: serde_json::Value,
    pub csv: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Check { file } => commands::check(&file),
        Command::Certify { file, cert, elaborate } => commands::certify(&file, cert.as_deref(), elaborate),
        Command::Eval { file, steps } => commands::eval(&file, steps),
        Command::Sample { file, trials, seed, max_steps } => {
            if seed.is_none() && cli.format == Format::Json {
                eprintln!("error: --seed is required with --format json");
                return ExitCode::from(2);
            }
            commands::sample(&file, trials, seed.unwrap_or(0), max_steps)
        }
        Command::Walk { walk, ast, horizon, from, hitting } => {
            commands::walk(&walk, ast, horizon, from, hitting.as_deref())
        }
        Command::Trace { file } => commands::trace(&file),
    };
    match cli.format {
        Format::Text if out.code == 2 => eprint!("{}", out.text),
        Format::Text => print!("{}", out.text),
        Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("report serialises")),
        Format::Csv => match &out.csv {
            Some(csv) => print!("{csv}"),
            None => print!("{}", commands::flat_csv(&out.json)),
        },
    }
    ExitCode::from(out.code)
}
