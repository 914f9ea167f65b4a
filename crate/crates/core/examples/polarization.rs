//! Vacuum polarization `B(k)` and the screening fraction `b(k)` for the
//! dressed and the free dispersion.
//!
//!     cargo run --release --example polarization

use bdf_lab::dispersion::{solve_dispersion, ModelParams};
use bdf_lab::numerics::{make_grid, Clustering};
use bdf_lab::polarization::{free_polarization_table, k_grid, polarization_table, Resolution};

fn main() -> bdf_lab::Result<()> {
    let params = ModelParams::new(0.01, 1e4)?;
    let grid = make_grid(1e4, 512, Clustering::GeometricNearZero)?;
    let d = solve_dispersion(params, grid, 1e-9, 200)?;

    let ks = k_grid(1e4, 24, 1e-4)?;
    let dressed = polarization_table(&d, &ks, Resolution::default())?;
    let free = free_polarization_table(&params, &ks)?;

    println!("radial B(0): dressed {:.9}, free {:.9}", dressed.b0_at_zero, free.b0_at_zero);
    println!("2 ln(cutoff) / 3pi = {:.9}", 2.0 * 1e4f64.ln() / (3.0 * std::f64::consts::PI));
    println!("\n{:>12} {:>14} {:>14} {:>12}", "k", "B dressed", "B free", "b dressed");
    for (i, k) in ks.iter().enumerate() {
        println!(
            "{k:>12.4e} {:>14.9} {:>14.9} {:>12.4e}",
            dressed.big_b[i], free.big_b[i], dressed.b[i]
        );
    }
    Ok(())
}
