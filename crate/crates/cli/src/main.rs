//! `relift`: command-line front end for monotone relations on finite preorders.

mod commands;
mod dto;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "relift",
    version,
    about = "Monotone relations, exact squares and relation lifting on finite preorders"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for generated test fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest carrier drawn for random fixtures.
    #[arg(long, global = true, default_value_t = 3)]
    pub max_size: usize,
    /// Largest carrier any functor application may produce.
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Emit the report as indented JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// JSON file naming the carriers of constant functors.
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the invariants of any JSON artifact.
    Validate {
        /// Artifact file, or `-` for stdin.
        file: PathBuf,
    },
    /// Compose two relations: `first: A -/-> B`, then `second: B -/-> C`.
    Compose { first: PathBuf, second: PathBuf },
    /// Lift a relation along a functor expression.
    Lift {
        #[arg(long)]
        functor: String,
        relation: PathBuf,
    },
    /// Decide exactness of a lax square.
    ExactCheck { square: PathBuf },
    /// Search for exact squares a functor fails to preserve.
    BccCheck {
        #[arg(long)]
        functor: String,
        /// Random squares per catalog shape.
        #[arg(long, default_value_t = 12)]
        samples: usize,
        /// Random relation pairs for the lifting laws.
        #[arg(long, default_value_t = 24)]
        law_samples: usize,
    },
    /// Greatest simulation from the first coalgebra to the second;
    /// a pair `(x2, x1)` means `x2` simulates `x1`.
    Simulate { first: PathBuf, second: PathBuf },
    /// States of a coalgebra satisfying a formula.
    Modelcheck {
        coalgebra: PathBuf,
        formula: PathBuf,
    },
    /// Emit the catalog squares for the given maps.
    Catalog { request: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let name = cli.command.name();
    let report =
        commands::run(&cli.command, &cli.global).unwrap_or_else(|msg| Report::error(name, msg));
    if report.status == report::Status::Error {
        eprintln!("error: {}", report.message.as_deref().unwrap_or("unknown"));
    }
    let text = if cli.global.json || cli.global.pretty {
        report.render_json(cli.global.pretty)
    } else {
        report.render_text()
    };
    let mut out = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = out.write_all(text.as_bytes());
    eprintln!("elapsed: {} ms", start.elapsed().as_millis());
    ExitCode::from(report.status.exit_code() as u8)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Compose { .. } => "compose",
            Command::Lift { .. } => "lift",
            Command::ExactCheck { .. } => "exact-check",
            Command::BccCheck { .. } => "bcc-check",
            Command::Simulate { .. } => "simulate",
            Command::Modelcheck { .. } => "modelcheck",
            Command::Catalog { .. } => "catalog",
        }
    }
}
