//! Command-line harness: experiments over the pointer-measurement model.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{log_resolution, resolve, CommonArgs, Defaults, Extra, GridArgs};

#[derive(Parser, Debug)]
#[command(name = "declab", version, about = "Decoherence, correlation and recurrence experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Shared {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mutual entropy and accessible information of the initial, reduced and exact states.
    Measure {
        #[command(flatten)]
        shared: Shared,
        /// pointer-exact, projective-search or hybrid.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Decoherence error against M with a log-log fit.
    Decoherence {
        #[command(flatten)]
        shared: Shared,
        /// sigma-x or diagonal.
        #[arg(long)]
        observable: Option<String>,
        /// independent or aligned.
        #[arg(long)]
        phases: Option<String>,
    },
    /// Accessible information against mutual entropy for a family of states.
    Gap {
        #[command(flatten)]
        shared: Shared,
        /// reduced, exact, random-bipartite or product.
        #[arg(long)]
        source: Option<String>,
        /// pointer-exact, projective-search or hybrid.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Distance to the initial state over time and first return times.
    Recurrence {
        #[command(flatten)]
        shared: Shared,
        /// random or commensurate.
        #[arg(long)]
        energies: Option<String>,
        /// Grid step for the return search.
        #[arg(long)]
        step: Option<String>,
        /// Distance counted as a return.
        #[arg(long)]
        threshold: Option<String>,
        /// Points of the log-spaced scan written to CSV.
        #[arg(long)]
        points: Option<String>,
    },
    /// Search random three-qubit circuits for opposite entropy and information changes.
    Counterexample {
        #[command(flatten)]
        shared: Shared,
    },
    /// Self-checks with a pass/fail table; exits nonzero on failure.
    Validate {
        #[command(flatten)]
        shared: Shared,
        /// none or aligned-phases.
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

fn defaults(m: &[usize], trials: u32, restarts: usize) -> Defaults {
    Defaults { m: m.to_vec(), k: 2, trials, restarts, horizon: 1e5 }
}

/// Runs one command; `Ok(false)` means it finished but reported a failure.
pub fn execute(cli: Cli) -> Result<bool> {
    let (name, shared, extras, defaults, run): (&str, Shared, Vec<Extra>, Defaults, fn(&config::Resolved) -> Result<bool>) =
        match cli.command {
            Command::Measure { shared, strategy } => (
                "measure",
                shared,
                vec![("strategy", strategy, "pointer-exact")],
                defaults(&[16], 1, 4),
                commands::measure::run,
            ),
            Command::Decoherence { shared, observable, phases } => (
                "decoherence",
                shared,
                vec![("observable", observable, "sigma-x"), ("phases", phases, "independent")],
                defaults(&[100, 1000, 10_000], 1000, 1),
                commands::decoherence::run,
            ),
            Command::Gap { shared, source, strategy } => (
                "gap",
                shared,
                vec![("source", source, "random-bipartite"), ("strategy", strategy, "hybrid")],
                defaults(&[1, 2, 4], 1000, 2),
                commands::gap::run,
            ),
            Command::Recurrence { shared, energies, step, threshold, points } => (
                "recurrence",
                shared,
                vec![
                    ("energies", energies, "random"),
                    ("step", step, "0.025"),
                    ("threshold", threshold, "0.05"),
                    ("points", points, "400"),
                ],
                defaults(&[3, 6], 50, 1),
                commands::recurrence::run,
            ),
            Command::Counterexample { shared } => {
                ("counterexample", shared, vec![], defaults(&[1], 10_000, 6), commands::counterexample::run)
            }
            Command::Validate { shared, inject_fault } => (
                "validate",
                shared,
                vec![("inject-fault", inject_fault, "none")],
                defaults(&[100, 1000, 10_000], 1000, 3),
                commands::validate::run,
            ),
        };
    let cfg = resolve(&shared.common, &shared.grid, &extras, defaults)?;
    log_resolution(name, &cfg);
    run(&cfg)
}
