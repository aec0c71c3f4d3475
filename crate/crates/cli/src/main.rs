use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stefan_cli::batch::{cmd_batch, thread_cap, BatchSuite};
use stefan_cli::{cmd_oracle, cmd_run, cmd_verify, Failure};
use stefan_core::verify::Suite;

/// Simulate, control and verify the one-phase Stefan problem.
#[derive(Debug, Parser)]
#[command(name = "stefan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario file and write its CSV (and optionally SVG plots).
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Treat validator warnings and constraint violations as failures.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        svg: bool,
    },
    /// Run a built-in suite: fig3, fig4 or fig5.
    Batch {
        #[arg(value_parser = clap::value_parser!(String))]
        suite: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a property suite: kernels, special-functions, transforms or oracle.
    Verify { target: String },
    /// Print the similarity solution for a constant boundary temperature.
    Oracle {
        #[arg(long, default_value = "zinc")]
        preset: String,
        /// Boundary temperature, K.
        #[arg(long)]
        tc: f64,
        #[arg(long = "t-end")]
        t_end: f64,
        /// Grid intervals of the printed profile.
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            strict,
            svg,
        } => cmd_run(&scenario, &out, strict, svg),
        Command::Batch { suite, out } => {
            let suite: BatchSuite = suite.parse().map_err(Failure::Input)?;
            let env = std::env::var("STEFAN_THREADS").ok();
            let threads = thread_cap(env.as_deref()).map_err(Failure::Input)?;
            cmd_batch(suite, &out, threads, io::stdout().lock())
        }
        Command::Verify { target } => {
            let suite: Suite = target.parse().map_err(|_| {
                Failure::Input(anyhow::anyhow!(
                    "unknown verify target `{target}` (expected kernels, special-functions, transforms or oracle)"
                ))
            })?;
            cmd_verify(suite, io::stdout().lock())
        }
        Command::Oracle { preset, tc, t_end, n } => cmd_oracle(&preset, tc, t_end, n, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
