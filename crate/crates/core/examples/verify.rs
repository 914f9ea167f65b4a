//! The invariant suite behind `bdf-lab verify`, run in-process.
//!
//!     cargo run --release --example verify -- model.alpha=0.005

use std::env;

use bdf_lab::cli::{run_verify, RunConfig};

fn main() -> bdf_lab::Result<()> {
    let overrides: Vec<String> = env::args().skip(1).collect();
    let cfg = RunConfig::load(None, &overrides)?;
    let report = run_verify(&cfg)?;
    print!("{}", report.table());
    if !report.passed {
        std::process::exit(1);
    }
    Ok(())
}
