// SPDX-License-Identifier: Apache-2.0

//! `ccp`: command-line front end for the chained communication protocols.
//!
//! Exit codes: 0 success, 1 validation failure, 2 reproduction check failure,
//! 3 I/O failure.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches};

use args::{Cli, Command};
use commands::Explicit;
use error::CliError;

fn typed(matches: &ArgMatches, id: &str) -> bool {
    let here = matches.value_source(id) == Some(ValueSource::CommandLine);
    here || matches
        .subcommand()
        .is_some_and(|(_, sub)| sub.value_source(id) == Some(ValueSource::CommandLine))
}

fn run(cli: &Cli, explicit: Explicit) -> Result<(), CliError> {
    let g = &cli.global;
    let mut out = output::open(g.out.as_deref())?;
    match &cli.command {
        Command::Exact(a) => {
            let report = commands::cmd_exact(g, explicit, a)?;
            commands::emit_exact(&mut *out, g.json, &report)?;
        }
        Command::Montecarlo(a) => {
            let rows = commands::cmd_montecarlo(g, a)?;
            if g.json {
                output::write_json(&mut *out, &rows)?;
            } else {
                output::write_csv(&mut *out, &rows)?;
            }
        }
        Command::Table2(a) => {
            let report = commands::cmd_table2(a)?;
            commands::emit_table2(&mut *out, g.json, &report)?;
        }
        Command::SweepScaling(a) => {
            let report = commands::cmd_sweep_scaling(g, a)?;
            if g.json {
                output::write_json(&mut *out, &report)?;
            } else {
                output::write_csv(&mut *out, &report.rows)?;
            }
        }
        Command::Efficiency(a) => {
            let report = commands::cmd_efficiency(g, a)?;
            if g.json {
                output::write_json(&mut *out, &report)?;
            } else {
                output::write_csv(&mut *out, &report.rows)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let parsed = Cli::command()
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m).map(|cli| (cli, m)));
    let (cli, matches) = match parsed {
        Ok(p) => p,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let explicit = Explicit {
        n: typed(&matches, "N"),
        m: typed(&matches, "M"),
        d: typed(&matches, "d"),
        mu: typed(&matches, "mu"),
    };
    match run(&cli, explicit) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
