#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;
mod recipes;

use std::process::ExitCode;

use clap::Parser;

use eikotomo::Error;

use args::{Cli, Command};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonPositiveSlowness { .. }
        | Error::SourceSolve { .. }
        | Error::IllConditioned { .. }
        | Error::NonFinite(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("EIK_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("EIK_THREADS must be a non-negative integer, got `{v}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let result = match &cli.command {
        Command::Phantom(c) => commands::cmd_phantom(c).map(|_| true),
        Command::Forward(c) => commands::cmd_forward(c).map(|_| true),
        Command::Reconstruct(c) => commands::cmd_reconstruct(c).map(|_| true),
        Command::Compare(c) => commands::cmd_compare(c),
        Command::Run(c) => {
            if c.list {
                recipes::list();
                Ok(true)
            } else {
                let name = c.recipe.as_deref().unwrap_or_default();
                recipes::find(name).and_then(|r| recipes::run(r, &c.out))
            }
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERICAL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
