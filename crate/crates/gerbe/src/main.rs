use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use gerbe::{run, Command, Options, Suite};

/// Parallel transport for crossed-module connections.
#[derive(Debug, Parser)]
#[command(name = "gerbe", version)]
struct Cli {
    command: Command,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Path integrator steps (even, at least 8).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suite for `check-axioms`.
    #[arg(long, value_enum)]
    suite: Option<Suite>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { command: cli.command, scenario: cli.scenario, seed: cli.seed, steps: cli.steps, tolerance: cli.tolerance, suite: cli.suite };
    let start = Instant::now();
    let report = match run(&opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = report.to_json();
    print!("{text}");
    if let Some(out) = &cli.out {
        if let Err(e) = std::fs::write(out, &text) {
            eprintln!("error: cannot write {}: {e}", out.display());
            return ExitCode::from(1);
        }
    }
    eprintln!("{}: {:.3} s", opts.command.name(), start.elapsed().as_secs_f64());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
