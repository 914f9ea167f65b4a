//! Predictions along a line of fixed `L = alpha ln(cutoff)`.
//!
//!     cargo run --release --example sweep

use bdf_lab::energy::{regime_sweep, SweepOptions, SweepRow};
use bdf_lab::pekar::{optimal_gaussian_sigma, pekar_grid, solve_pekar, PekarInit, PekarOptions};

fn main() -> bdf_lab::Result<()> {
    let grid = pekar_grid(40.0, 1024)?;
    let e_cp = solve_pekar(grid, PekarInit::Gaussian(optimal_gaussian_sigma()), &PekarOptions::default())?
        .state
        .energy();

    let alphas = [0.04, 0.02, 0.01, 0.005, 0.0025];
    let table = regime_sweep(&alphas, 0.05, e_cp, &SweepOptions::default())?;
    println!("L = {}, E_CP = {:.8}", table.l, table.e_cp);
    println!("{}", SweepRow::HEADER.map(|h| format!("{h:>13}")).join(""));
    for r in &table.rows {
        println!("{}", r.values().map(|v| format!("{v:>13.5e}")).join(""));
    }
    for (a, c) in &table.skipped {
        println!("skipped alpha = {a}: cutoff {c:.3e} above the cap");
    }
    Ok(())
}
