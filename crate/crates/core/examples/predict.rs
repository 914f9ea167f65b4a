//! Full pipeline: dispersion, polarization and Pekar stages combined into the
//! one-electron energy prediction.
//!
//!     cargo run --release --example predict -- model.alpha=0.02

use std::env;

use bdf_lab::cli::{run_pipeline, RunConfig};
use bdf_lab::energy::identity_defect;

fn main() -> bdf_lab::Result<()> {
    let overrides: Vec<String> = env::args().skip(1).collect();
    let cfg = RunConfig::load(None, &overrides)?;
    let p = run_pipeline(&cfg)?;
    let e = &p.energy;

    println!("{}", serde_json::to_string_pretty(e).expect("serializable"));
    println!();
    println!("m(alpha)        {:.12}", e.m);
    println!("predicted       {:.12}", e.total_pred);
    println!("binding         {:.6e}", e.binding);
    println!("exchange budget {:.6e}", e.exchange_bound);
    println!("identity defect {:.2e}", identity_defect(e));
    Ok(())
}
