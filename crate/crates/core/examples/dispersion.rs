//! Self-consistent dispersion at fixed coupling and cutoff.
//!
//!     cargo run --release --example dispersion -- 0.01 1e4

use std::env;

use bdf_lab::dispersion::{check_asymptotics, g1_prime_zero, m_alpha, solve_dispersion, ModelParams};
use bdf_lab::numerics::{make_grid, Clustering};

fn main() -> bdf_lab::Result<()> {
    let args: Vec<f64> = env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let alpha = args.first().copied().unwrap_or(0.01);
    let cutoff = args.get(1).copied().unwrap_or(1e4);

    let params = ModelParams::new(alpha, cutoff)?;
    if params.regime_warning() {
        eprintln!("alpha >= 4/pi: outside the stable regime");
    }
    let grid = make_grid(cutoff, 512, Clustering::GeometricNearZero)?;
    let d = solve_dispersion(params, grid, 1e-9, 200)?;

    let l = params.l();
    println!("alpha = {alpha}, cutoff = {cutoff:e}, L = {l:.6}");
    println!("converged in {} iterations", d.report().iterations);
    println!("m(alpha)  = {:.10}   (1 + L/pi = {:.10})", m_alpha(&d), 1.0 + l / std::f64::consts::PI);
    println!("g1'(0)    = {:.10}   (1 + 2L/3pi = {:.10})", g1_prime_zero(&d)?, 1.0 + 2.0 * l / (3.0 * std::f64::consts::PI));
    println!("C1        = {:.6}", d.c1());

    for e in check_asymptotics(&d)?.entries {
        println!("{:<28} {:>14.9} vs {:>12.9}  within budget: {}", e.name, e.measured, e.reference, e.within_budget);
    }

    println!("\n{:>12} {:>14} {:>14}", "p", "g0", "g1/p");
    for i in (0..d.grid().len()).step_by(64) {
        let p = d.grid().nodes()[i];
        println!("{p:>12.4e} {:>14.10} {:>14.10}", d.g0()[i], d.g1()[i] / p);
    }
    Ok(())
}
