//! `geostat`: generate, split, fit, predict, score and inspect Gaussian
//! random field datasets.

mod commands;
mod options;
mod render;

use std::process::ExitCode;

use clap::Parser;
use geostat_core::Error;

use crate::options::Cli;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownPreset(_) => 2,
        Error::DenseCapExceeded { .. } => 3,
        Error::IncompatibleScheme(_) => 4,
        Error::KeyMismatch(_) => 5,
        Error::UnsupportedKind(_) => 6,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error:usage: {first}");
            return ExitCode::from(1);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error:{}: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}
