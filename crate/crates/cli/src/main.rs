//! `toric-period <command> --config <file> [--out <dir>] [--threads K]`
//!
//! Exit status: 0 when every check passes, 2 on a verification failure,
//! 1 on bad input or a computation error.

mod commands;
mod config;
mod error;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toric_period::operator_algebra::AnnihilatorSign;

use commands::Outcome;
use config::Job;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "toric-period", version, about = "Oscillatory periods of toric data and their differential equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job description.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result into this directory instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kernel basis, jacobian and integrability.
    Kernel,
    /// Periods on a grid or at explicit points (CSV).
    Eval,
    /// Series coefficients and evaluations (JSON).
    Series,
    /// x-space operators (JSON).
    EmitOps,
    /// Check that every annihilator vanishes on the representation.
    VerifyAnnihilator {
        /// Debug: flip the sign between the two products (must fail).
        #[arg(long)]
        corrupt_sign: bool,
    },
    /// Finite-difference residuals of the period on a grid (CSV).
    VerifyPde,
    /// Compare P^1 periods with the Bessel closed form (CSV).
    BesselCheck,
}

impl Command {
    fn file_name(&self) -> &'static str {
        match self {
            Command::Kernel => "kernel.json",
            Command::Eval => "eval.csv",
            Command::Series => "series.json",
            Command::EmitOps => "ops.json",
            Command::VerifyAnnihilator { .. } => "annihilator.json",
            Command::VerifyPde => "pde.csv",
            Command::BesselCheck => "bessel.csv",
        }
    }
}

fn run_command(command: &Command, job: &Job) -> Result<Outcome, CliError> {
    match command {
        Command::Kernel => Ok(commands::kernel(job)),
        Command::Eval => commands::eval(job),
        Command::Series => commands::series(job),
        Command::EmitOps => commands::emit_ops(job),
        Command::VerifyAnnihilator { corrupt_sign } => {
            let sign = if *corrupt_sign {
                AnnihilatorSign::Plus
            } else {
                AnnihilatorSign::Minus
            };
            Ok(commands::verify_annihilator(job, sign))
        }
        Command::VerifyPde => commands::verify_pde(job),
        Command::BesselCheck => commands::bessel_check(job),
    }
}

fn write_output(out: Option<&Path>, name: &str, body: &str) -> Result<(), CliError> {
    let io_error = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(io_error(dir))?;
            let path = dir.join(name);
            fs::write(&path, body).map_err(io_error(&path))
        }
        None => std::io::stdout()
            .lock()
            .write_all(body.as_bytes())
            .map_err(io_error(Path::new("<stdout>"))),
    }
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = cli.config.as_deref().ok_or_else(|| CliError::Config {
        line: 0,
        field: "--config".into(),
        message: "a job description is required".into(),
    })?;
    let job = Job::load(config)?;
    let outcome = match cli.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?
            .install(|| run_command(&cli.command, &job))?,
        None => run_command(&cli.command, &job)?,
    };
    write_output(cli.out.as_deref(), cli.command.file_name(), &outcome.body)?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
