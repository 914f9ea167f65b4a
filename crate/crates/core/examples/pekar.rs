//! Choquard-Pekar minimizer by imaginary-time descent from the best
//! Gaussian, with the virial check.
//!
//!     cargo run --release --example pekar -- 1024

use std::env;

use bdf_lab::pekar::{
    el_residual, gaussian_bound, optimal_gaussian_sigma, pekar_grid, solve_pekar, virial, PekarInit, PekarOptions,
};

fn main() -> bdf_lab::Result<()> {
    let nodes = env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1024);
    let grid = pekar_grid(40.0, nodes)?;
    let sol = solve_pekar(grid, PekarInit::Gaussian(optimal_gaussian_sigma()), &PekarOptions::default())?;
    let st = &sol.state;
    let v = virial(st);

    println!("{} steps ({} rejected)", sol.iterations, sol.rejected_steps);
    println!("E_CP  = {:.10}  (Gaussian trial {:.10})", st.energy(), gaussian_bound());
    println!("T     = {:.10}", st.kinetic());
    println!("D     = {:.10}", st.direct());
    println!("mu    = {:.10}", st.mu());
    println!("|D-2T|/D = {:.2e}, EL residual = {:.2e}", v.virial, el_residual(st));

    println!("\n{:>8} {:>14} {:>14}", "r", "phi", "V");
    for i in (0..st.phi().len()).step_by(nodes / 16) {
        println!("{:>8.3} {:>14.8e} {:>14.8e}", st.grid().nodes()[i], st.phi()[i], st.potential()[i]);
    }
    Ok(())
}
