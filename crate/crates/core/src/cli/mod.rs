//! Configuration, stage runners and the invariant suite behind the
//! `bdf-lab` binary.

pub mod commands;
pub mod config;
pub mod verify;

pub use commands::{
    cmd_dispersion, cmd_pekar, cmd_polarization, cmd_predict, cmd_sweep, run_pipeline, Pipeline,
};
pub use config::RunConfig;
pub use verify::{cmd_verify, run_verify, Check, VerifyReport};
