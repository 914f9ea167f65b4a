use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a damped fixed-point iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    /// Damping in effect when the iteration stopped.
    pub final_damping: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial relaxation ω in (0, 1].
    pub damping: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: 1e-9,
            max_iter: 200,
            damping: 1.0,
        }
    }
}

const MIN_DAMPING: f64 = 1.0 / 64.0;

/// Damped Picard iteration `x <- (1 - ω) x + ω map(x)` with sup-norm residual
/// `max_i |map(x)_i - x_i|`.
pub fn fixed_point_solve<F>(map: F, init: Vec<f64>, opts: &FixedPointOptions) -> Result<(Vec<f64>, FixedPointReport)>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let scales = vec![1.0; init.len()];
    fixed_point_solve_scaled(map, init, &scales, opts)
}

/// As [`fixed_point_solve`] with the residual measured as
/// `max_i |map(x)_i - x_i| / scales_i`.
///
/// On convergence the last map image is returned. Whenever the residual grows
/// the damping is halved, down to 1/64.
pub fn fixed_point_solve_scaled<F>(
    mut map: F,
    init: Vec<f64>,
    scales: &[f64],
    opts: &FixedPointOptions,
) -> Result<(Vec<f64>, FixedPointReport)>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidParameter(format!("damping must lie in (0, 1], got {}", opts.damping)));
    }
    if scales.len() != init.len() {
        return Err(Error::Shape {
            expected: init.len(),
            got: scales.len(),
        });
    }
    let mut x = init;
    let mut omega = opts.damping;
    let mut history = Vec::new();
    let mut last = f64::INFINITY;
    while history.len() < opts.max_iter {
        let y = map(&x);
        if y.len() != x.len() {
            return Err(Error::Shape {
                expected: x.len(),
                got: y.len(),
            });
        }
        let residual = y
            .iter()
            .zip(&x)
            .zip(scales)
            .map(|((a, b), s)| (a - b).abs() / s)
            .fold(0.0, f64::max);
        let residual = if y.iter().all(|v| v.is_finite()) { residual } else { f64::INFINITY };
        history.push(residual);
        if residual <= opts.tol {
            let report = FixedPointReport {
                converged: true,
                iterations: history.len(),
                final_residual: residual,
                residual_history: history,
                final_damping: omega,
            };
            return Ok((y, report));
        }
        if !residual.is_finite() {
            break;
        }
        if residual > last {
            omega = (0.5 * omega).max(MIN_DAMPING);
        }
        last = residual;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = (1.0 - omega) * *xi + omega * yi;
        }
    }
    Err(Error::NoConvergence {
        report: FixedPointReport {
            converged: false,
            iterations: history.len(),
            final_residual: history.last().copied().unwrap_or(f64::INFINITY),
            residual_history: history,
            final_damping: omega,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn opts(tol: f64, max_iter: usize) -> FixedPointOptions {
        FixedPointOptions {
            tol,
            max_iter,
            damping: 1.0,
        }
    }

    #[test]
    fn affine_contraction() {
        let (x, rep) = fixed_point_solve(|x| vec![x[0] / 2.0 + 1.0], vec![0.0], &opts(1e-12, 100)).unwrap();
        assert!((x[0] - 2.0).abs() <= 1e-12);
        assert!(rep.converged);
        assert_eq!(rep.residual_history.len(), rep.iterations);
        assert!(rep.final_residual <= 1e-12);
    }

    #[test]
    fn identity_converges_immediately() {
        let (x, rep) = fixed_point_solve(|x| x.to_vec(), vec![3.0, -1.0], &opts(1e-9, 10)).unwrap();
        assert_eq!(x, vec![3.0, -1.0]);
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.final_residual, 0.0);
    }

    #[test]
    fn expansive_map_fails() {
        let err = fixed_point_solve(|x| vec![2.0 * x[0] + 1.0], vec![0.0], &opts(1e-9, 50)).unwrap_err();
        match err {
            Error::NoConvergence { report } => {
                assert!(!report.converged);
                assert_eq!(report.iterations, 50);
                assert_eq!(report.residual_history.len(), 50);
                assert!(report.final_damping >= MIN_DAMPING);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_options() {
        assert!(fixed_point_solve(|x| x.to_vec(), vec![0.0], &opts(0.0, 5)).is_err());
        let bad = FixedPointOptions {
            damping: 1.5,
            ..opts(1e-6, 5)
        };
        assert!(fixed_point_solve(|x| x.to_vec(), vec![0.0], &bad).is_err());
    }

    #[test]
    fn damping_halves_on_growth() {
        // Oscillating map x -> -1.5 x + 1: undamped it diverges, ω = 1/2 contracts.
        let (x, rep) = fixed_point_solve(|x| vec![-1.5 * x[0] + 1.0], vec![0.0], &opts(1e-10, 500)).unwrap();
        assert!((x[0] - 0.4).abs() < 1e-9);
        assert!(rep.final_damping < 1.0);
    }

    proptest! {
        #[test]
        fn affine_contraction_decays_geometrically(q in -0.95f64..0.95, b in -10.0f64..10.0, x0 in -10.0f64..10.0) {
            let res = fixed_point_solve(|x| vec![q * x[0] + b], vec![x0], &opts(1e-11, 2000));
            let (x, rep) = res.unwrap();
            prop_assert!((x[0] - b / (1.0 - q)).abs() < 1e-9 * (1.0 + (b / (1.0 - q)).abs()));
            for w in rep.residual_history.windows(2) {
                if w[0] > 1e-13 {
                    prop_assert!(w[1] / w[0] <= q.abs() + 0.05, "ratio {} for q {}", w[1] / w[0], q);
                }
            }
        }
    }
}
