//! Front end for the visrobust toolkit: `generate` corrupted datasets,
//! `evaluate` prediction files into an accuracy grid, and `report` metrics.

pub mod args;
pub mod config;
pub mod evaluate;
pub mod fsio;
pub mod generate;
pub mod report;

pub use args::{Cli, Command};
pub use config::RunConfig;

/// Dispatches a parsed command line.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => generate::run(&a).map(|summary| {
            log::info!(
                "generated {} images ({} reused) into {}",
                summary.written,
                summary.reused,
                a.out.display()
            );
        }),
        Command::Evaluate(a) => evaluate::run(&a).map(|_| ()),
        Command::Report(a) => report::run(&a).map(|_| ()),
    }
}
