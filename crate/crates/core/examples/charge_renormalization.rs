//! `Z3 = 1/(1 + alpha B0(0))` and the physical coupling across cutoffs.
//!
//!     cargo run --release --example charge_renormalization

use bdf_lab::dispersion::ModelParams;
use bdf_lab::polarization::{charge_renormalization, free_b_zero};

fn main() -> bdf_lab::Result<()> {
    let alpha = 1.0 / 137.036;
    println!("{:>10} {:>14} {:>12} {:>14}", "cutoff", "B0(0)", "Z3", "1/alpha_phys");
    for e in [1, 2, 4, 8, 16, 32, 64] {
        let p = ModelParams::new(alpha, 10f64.powi(e))?;
        let (z3, alpha_phys) = charge_renormalization(&p)?;
        println!("{:>10.0e} {:>14.8} {:>12.8} {:>14.6}", p.cutoff(), free_b_zero(&p)?, z3, 1.0 / alpha_phys);
    }
    Ok(())
}
