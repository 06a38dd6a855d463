//! `lce-lab`: checks witnesses, speed-up traces and machine constructions
//! for left-c.e. reals from the command line.
//!
//! Exit status: 0 on pass or evidence, 1 on a violation or missing
//! evidence, 2 on usage or invariant errors.

mod commands;
mod specs;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CheckWitnessArgs, CmmBuildArgs, CmmCheckArgs, ConvertCommand, GalleryArgs, Outcome, SpeedTraceArgs};
use lce_lab::report::write_atomic;
use lce_lab::{LabError, Result};

#[derive(Parser, Debug)]
#[command(name = "lce-lab", version, about = "Experiments with Solovay reducibility and speedability of left-c.e. reals")]
struct Cli {
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate and list the gallery of reals
    Gallery(GalleryArgs),
    /// Check a reduction witness on sample rationals below beta
    CheckWitness(CheckWitnessArgs),
    /// Record ratio traces for a speed-up function or a total translation
    SpeedTrace(SpeedTraceArgs),
    /// Convert between speed-up functions, translations and majorizers
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Build the uniformized machine A from a machine B and a total witness
    CmmBuild(CmmBuildArgs),
    /// Validate a machine and optionally compare it with B
    CmmCheck(CmmCheckArgs),
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("LCE_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(LabError::config(format!("LCE_LAB_THREADS={raw:?} is not a positive integer"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| LabError::config(e.to_string()))
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    match &cli.command {
        Command::Gallery(args) => commands::gallery(args),
        Command::CheckWitness(args) => commands::check_witness_cmd(args),
        Command::SpeedTrace(args) => commands::speed_trace(args),
        Command::Convert(cmd) => commands::convert(cmd),
        Command::CmmBuild(args) => commands::cmm_build(args),
        Command::CmmCheck(args) => commands::cmm_check(args),
    }
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, body.as_bytes()),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| LabError::Parse(format!("stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(cli.out.as_ref(), &outcome.body) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    eprintln!("{}", outcome.summary);
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
