//! `solenoid`: batch front end for the spectral triple laboratory.
//!
//! Exit codes: 0 ok, 1 configuration error, 2 resource cap, 3 oracle or
//! assertion mismatch, 4 solver failure.

mod commands;
mod params;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use solenoid::Error;

use params::Params;

#[derive(Debug, Parser)]
#[command(name = "solenoid", version, about = "Truncated spectral triples on p-adic solenoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// List ball(n, r) sorted by length
    Ball,
    /// Print the gamma matrices for rank d
    Gammas,
    /// Dirac spectrum checked against the ±L oracle
    Spectrum,
    /// Truncated Lipschitz seminorm with a convergence trace in R
    Lip,
    /// Connes distance between two states
    Distance,
    /// Fejér smoothing and its Lipschitz contraction
    Fejer,
    /// Bridge epsilon over N and spectral comparison over windows
    Converge,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::LevelMismatch { .. } => 1,
        Error::ResourceCap { .. } | Error::Overflow => 2,
        Error::CheckFailed(_) => 3,
        Error::NonConvergence { .. } | Error::Numerical(_) => 4,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let params = cli.params.resolve()?;
    let output = match cli.command {
        Command::Ball => commands::ball(&params),
        Command::Gammas => commands::gammas(&params),
        Command::Spectrum => commands::spectrum(&params),
        Command::Lip => commands::lip_cmd(&params),
        Command::Distance => commands::distance(&params),
        Command::Fejer => commands::fejer(&params),
        Command::Converge => commands::converge(&params),
    }?;
    let text = output.render(params.format());
    match &params.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::invalid(format!("cannot write output: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("solenoid: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
