// `!(x > 0.0)` is the NaN-rejecting form used for every parameter check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dispersion;
pub mod energy;
pub mod error;
pub mod io;
pub mod numerics;
pub mod pekar;
pub mod polarization;

pub use error::{Error, Result};
