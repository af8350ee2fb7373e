//! Command-line front end for swap-test pattern recognition experiments.
//!
//! Exit codes: 0 success, 1 malformed input or usage error, 2 dimension or
//! encodability errors. `QOVERLAP_THREADS` caps internal parallelism.

mod commands;
mod common;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use qoverlap_core::error::Error;

use commands::{classify, compare, nv, rank, sweep};

#[derive(Debug, Parser)]
#[command(
    name = "qoverlap",
    version,
    about = "Pattern recognition with swap tests on simulated quantum registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Compare(compare::CompareArgs),
    Rank(rank::RankArgs),
    NoiseSweep(sweep::SweepArgs),
    Classify(classify::ClassifyArgs),
    Nv(nv::NvArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    limit_threads();

    let result = match &cli.command {
        Command::Compare(args) => compare::run(args),
        Command::Rank(args) => rank::run(args),
        Command::NoiseSweep(args) => sweep::run(args),
        Command::Classify(args) => classify::run(args),
        Command::Nv(args) => nv::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Cap the rayon pool when QOVERLAP_THREADS is set to a positive integer.
fn limit_threads() {
    if let Ok(value) = std::env::var("QOVERLAP_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid QOVERLAP_THREADS={value:?}"),
        }
    }
}

/// 2 for dimension/encodability problems, 1 for everything else.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DimensionMismatch { .. }
        | Error::ImageDimensionMismatch(..)
        | Error::BlocksDontDivide { .. }
        | Error::PixelCountNotPowerOfTwo(_)
        | Error::AllZeroImage
        | Error::UndefinedScore => 2,
        _ => 1,
    }
}
