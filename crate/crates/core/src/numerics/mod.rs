//! Radial grids, quadrature (including log-singular kernels), monotone
//! interpolation and a damped fixed-point driver shared by the solvers.

mod fixed_point;
mod grid;
mod interp;
mod quadrature;

pub use fixed_point::{fixed_point_solve, fixed_point_solve_scaled, FixedPointOptions, FixedPointReport};
pub use grid::{make_grid, Clustering, Panel, RadialGrid};
pub use interp::{interp, MonotoneCubic};
pub use quadrature::{integrate, integrate_with_log_singularity, log_ratio, product_weights, GaussLegendre};

pub(crate) use quadrature::{accumulate_product_weights, SingularRules};
