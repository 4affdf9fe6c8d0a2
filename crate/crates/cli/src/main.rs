mod commands;
mod common;
mod manifest;

use clap::{Parser, Subcommand};

use crate::common::CliError;

#[derive(Parser)]
#[command(
    name = "neugn",
    version,
    about = "Neural-guided subgraph matching: train a navigator, enumerate matches, benchmark first-match steps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a set of connected query graphs from a data graph
    GenQueries(commands::gen_queries::Args),
    /// Train a navigator model on a data graph
    Train(commands::train::Args),
    /// Enumerate matches for a query set and write per-query metrics
    Match(commands::match_cmd::Args),
    /// Compare baseline and navigated enumeration over a query set
    Bench(commands::bench::Args),
    /// Check every engine mode against the brute-force reference matcher
    Verify(commands::verify::Args),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenQueries(args) => commands::gen_queries::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Match(args) => commands::match_cmd::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Verify(args) => commands::verify::run(args),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(error)) => {
            eprintln!("error: {error:#}");
            std::process::exit(1);
        }
    }
}
