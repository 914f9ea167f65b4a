use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bdf_lab::cli::{self, RunConfig};
use bdf_lab::Result;

#[derive(Parser)]
#[command(name = "bdf-lab", version, about = "Numerical laboratory for the dressed Dirac-Fock vacuum")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides output.dir).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Set a configuration key, e.g. `model.alpha=0.02`. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve the self-consistent dispersion.
    Dispersion,
    /// Tabulate the dressed and free polarization.
    Polarization,
    /// Minimize the Pekar functional.
    Pekar,
    /// Run every stage and assemble the ground-state prediction.
    Predict,
    /// Predictions along a line of fixed alpha ln(cutoff).
    Sweep,
    /// Run the invariant suite.
    Verify,
}

fn run(cmd: Command, cfg: &RunConfig) -> Result<bool> {
    let files = match cmd {
        Command::Dispersion => cli::cmd_dispersion(cfg)?,
        Command::Polarization => cli::cmd_polarization(cfg)?,
        Command::Pekar => cli::cmd_pekar(cfg)?,
        Command::Predict => cli::cmd_predict(cfg)?,
        Command::Sweep => cli::cmd_sweep(cfg)?.0,
        Command::Verify => {
            let (path, report) = cli::cmd_verify(cfg)?;
            print!("{}", report.table());
            println!("wrote {}", path.display());
            return Ok(report.passed);
        }
    };
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = RunConfig::load(args.config.as_deref(), &args.overrides).map(|mut c| {
        if let Some(out) = args.out {
            c.output.dir = out;
        }
        c
    });
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cfg.params().map(|p| p.regime_warning()).unwrap_or(false) {
        eprintln!("warning: alpha >= 4/pi, results are outside the stable regime");
    }
    match run(args.command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
