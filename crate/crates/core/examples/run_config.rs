//! Runs the shipped lab config into a directory and prints the summary.
//!
//!     cargo run --release --example run_config -- [out-dir]

use std::path::{Path, PathBuf};

use reclab::cli::{run, RunOptions};

fn main() {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("lab-out"));
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/lab.toml");
    let summary = run(
        &config,
        &RunOptions {
            out: Some(out),
            ..RunOptions::default()
        },
    )
    .unwrap_or_else(|e| panic!("{e}"));
    print!("{}", summary.to_tsv());
    std::process::exit(summary.exit_code());
}
