//! `topmeasure run <scenario> [--out dir] [--seed n] [--threads n] [--resolution n]`
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 for
//! configuration or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use topmeasure::harness::run::{exit_code, EXIT_CONFIG};
use topmeasure::harness::{run_scenario, RunOptions, RunOutcome};

#[derive(Parser)]
#[command(name = "topmeasure", version, about = "Runs topological-measure check scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (TOML, or JSON by extension).
    Run {
        scenario: PathBuf,
        /// Output directory; defaults to the scenario's `output.dir` or `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads for running checks in parallel.
        #[arg(long)]
        threads: Option<usize>,
        /// Cells per axis, overriding the scenario frame.
        #[arg(long)]
        resolution: Option<usize>,
    },
}

fn summarize(o: &RunOutcome) {
    let r = &o.report;
    println!("scenario {} (seed {}, {}x{} grid)", r.scenario, r.seed, r.frame.nx, r.frame.ny);
    for c in &r.checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("  {status} {} [{}] {}/{} failures", c.name, c.kind, c.failures, c.trials);
        if let Some(w) = c.worst.as_ref().filter(|_| !c.pass) {
            match &w.error {
                Some(e) => println!("       error: {e}"),
                None => println!("       worst: {} (excess {:e})", w.inputs, w.excess),
            }
        }
    }
    let passed = r.checks.iter().filter(|c| c.pass).count();
    println!("{passed}/{} checks passed; report in {}", r.checks.len(), o.out_dir.join("report.json").display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { scenario, out, seed, threads, resolution } = cli.command;
    let opts = RunOptions { out_dir: out, seed, resolution };
    let run = || run_scenario(&scenario, &opts);
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: --threads {n}: {e}");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        None => run(),
    };
    match &result {
        Ok(o) => summarize(o),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
