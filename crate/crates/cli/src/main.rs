//! `zariski`: exact Zariski decompositions from the command line.
//!
//! Every subcommand prints one JSON document on stdout. Exit codes: 0 when
//! all checks pass, 1 when a check fails, 2 for malformed input, 3 for
//! geometrically invalid input, 4 for an unsupported mode.

mod commands;
mod input;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{MaxNefInput, Outcome, PositivePartInput, SectionsInput, SeparateInput, Strategy};
use input::{base_dir, read_json, DivisorSpec, ExprSpec, FanSpec, SurfaceSpec};

#[derive(Parser)]
#[command(name = "zariski", version, about = "Exact Zariski decompositions on surfaces and toric models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a divisor on a surface given by its intersection matrix.
    Surface { problem: PathBuf },
    /// Separate two divisors on a fan by weighted star subdivisions.
    Separate { fan: PathBuf, d1: PathBuf, d2: PathBuf },
    /// Maximum of two nef divisors on a fan.
    MaxNef {
        fan: PathBuf,
        d1: PathBuf,
        d2: PathBuf,
        #[arg(long, value_enum, default_value = "hull")]
        strategy: Strategy,
        /// Half-width of the probe box used by --verify.
        #[arg(long, default_value_t = 5)]
        probe_box: i64,
        /// Compute with both strategies and check that they agree.
        #[arg(long)]
        verify: bool,
    },
    /// Mobile parts up to degree k and, with --exact, the positive part.
    PositivePart {
        fan: PathBuf,
        divisor: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: i64,
        #[arg(long)]
        exact: bool,
    },
    /// Global sections of k times a b-divisor expression.
    Sections {
        expression: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Recompute a stored output from its embedded input.
    Verify { output: PathBuf },
}

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn input(e: impl fmt::Display) -> Self {
        CliError { code: 2, message: e.to_string() }
    }

    pub fn geometry(e: impl fmt::Display) -> Self {
        CliError { code: 3, message: e.to_string() }
    }

    pub fn unsupported(e: impl fmt::Display) -> Self {
        CliError { code: 4, message: e.to_string() }
    }
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Surface { problem } => commands::surface(&read_json::<SurfaceSpec>(&problem)?),
        Command::Separate { fan, d1, d2 } => commands::separate(&SeparateInput {
            fan: read_json(&fan)?,
            d1: read_json(&d1)?,
            d2: read_json(&d2)?,
        }),
        Command::MaxNef { fan, d1, d2, strategy, probe_box, verify } => commands::max_nef_cmd(&MaxNefInput {
            fan: read_json::<FanSpec>(&fan)?,
            d1: read_json::<DivisorSpec>(&d1)?,
            d2: read_json::<DivisorSpec>(&d2)?,
            strategy,
            probe_box,
            verify,
        }),
        Command::PositivePart { fan, divisor, k, exact } => commands::positive_part(&PositivePartInput {
            fan: read_json(&fan)?,
            divisor: read_json(&divisor)?,
            kmax: k,
            exact,
        }),
        Command::Sections { expression, k } => {
            let spec: ExprSpec = read_json(&expression)?;
            let expression = spec.resolve(&base_dir(&expression))?;
            commands::sections(&SectionsInput { expression, k })
        }
        Command::Verify { output } => commands::verify(&read_json(Path::new(&output))?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            println!("{}", serde_json::to_string_pretty(&out.doc).expect("JSON values serialize"));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: some checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
