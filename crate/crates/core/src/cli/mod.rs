//! Config-driven experiment runner behind the `reclab` binary.
//!
//! `reclab run lab.toml` executes every experiment and check suite in the
//! config and writes verdicts, records, curves and a `summary.tsv` under the
//! output directory; `reclab describe '<literal>'` reports on one operator.
//! Exit status is 0 when nothing failed, 1 when a check failed or an
//! experiment errored, and 2 for configuration errors.

mod config;
mod describe;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{
    load_config, parse_config, parse_precision, CheckJob, CheckSpec, ConfigError, ExperimentConfig, RunConfig,
    SuiteConfig, MAX_FLOAT_DIGITS,
};
pub use describe::describe;
pub use run::{run, run_config, RunError, RunOptions, RunSummary, SummaryRow};

use crate::orbit::Precision;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "reclab", version, about = "Finite-horizon recurrence laboratory for linear operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// `exact` or `float:<digits>` (at most 17 digits).
    #[arg(long, global = true, value_parser = parse_precision)]
    precision: Option<Precision>,
    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every check that does not pin its own.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiments and suites of a TOML config.
    Run { config: PathBuf },
    /// Describe an operator literal.
    Describe { literal: String },
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return EXIT_CONFIG;
    }
    match cli.command {
        Command::Describe { literal } => match describe(&literal) {
            Ok(text) => {
                print!("{text}");
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
        Command::Run { config } => {
            let opts = RunOptions {
                workers: cli.workers,
                precision: cli.precision,
                out: cli.out,
                seed: cli.seed,
            };
            match run(&config, &opts) {
                Ok(summary) => {
                    print!("{}", summary.to_tsv());
                    summary.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_precision_flag_is_config_error() {
        assert_eq!(main_with(["reclab", "describe", "blockcycle", "--precision", "float:30"]), EXIT_CONFIG);
    }

    #[test]
    fn describe_exits_zero() {
        assert_eq!(main_with(["reclab", "describe", "blockcycle"]), EXIT_OK);
        assert_eq!(main_with(["reclab", "describe", "nonsense("]), EXIT_CONFIG);
    }

    #[test]
    fn missing_config_is_config_error() {
        assert_eq!(main_with(["reclab", "run", "/nonexistent/lab.toml"]), EXIT_CONFIG);
    }
}
