//! `gapsandwich` command-line front end.

mod args;
mod commands;
mod config;
mod error;
mod gnuplot;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, VaeCommand};
use commands::Context;
use config::ConfigFile;
use error::CliError;

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GAPSANDWICH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "GAPSANDWICH_THREADS must be a non-negative integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot set up {n} threads: {e}")))
}

fn run(cli: Cli) -> Result<String, CliError> {
    init_threads()?;
    let config = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let ctx = Context::new(config, cli.emit_gnuplot, std::env::args().collect());
    match cli.command {
        Command::Analytic(a) => commands::analytic(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Vae(VaeCommand::Train(a)) => commands::vae_train(&ctx, a),
        Command::Vae(VaeCommand::TrainCnet(a)) => commands::vae_train_cnet(&ctx, a),
        Command::Vae(VaeCommand::Eval(a)) => commands::vae_eval(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
