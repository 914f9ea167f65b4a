use crate::error::{Error, Result};

use super::grid::RadialGrid;

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Butland slopes).
///
/// Below the first node and between the last node and the cutoff the
/// interpolant continues linearly through the two outermost nodes.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    upper: f64,
}

impl MonotoneCubic {
    pub fn new(xs: &[f64], ys: &[f64], upper: f64) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: xs.len(),
                got: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidParameter("interpolation needs two nodes".into()));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = ys.windows(2).zip(&h).map(|(w, h)| (w[1] - w[0]) / h).collect();
        let mut slopes = vec![0.0; n];
        for k in 1..n - 1 {
            let (d0, d1) = (delta[k - 1], delta[k]);
            if d0 == d1 {
                slopes[k] = d0;
            } else if d0 * d1 > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
        } else {
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(MonotoneCubic {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slopes,
            upper,
        })
    }

    pub fn from_grid(grid: &RadialGrid, samples: &[f64]) -> Result<Self> {
        Self::new(grid.nodes(), samples, grid.cutoff())
    }

    pub fn eval(&self, p: f64) -> Result<f64> {
        if !(p >= 0.0) || p > self.upper {
            return Err(Error::OutOfRange {
                point: p,
                upper: self.upper,
            });
        }
        Ok(self.eval_unchecked(p))
    }

    /// As [`eval`](Self::eval) without the range check; callers guarantee
    /// `0 <= p <= upper`.
    #[inline]
    pub fn eval_unchecked(&self, p: f64) -> f64 {
        let n = self.xs.len();
        if p <= self.xs[0] {
            let s = (self.ys[1] - self.ys[0]) / (self.xs[1] - self.xs[0]);
            return self.ys[0] + s * (p - self.xs[0]);
        }
        if p >= self.xs[n - 1] {
            let s = (self.ys[n - 1] - self.ys[n - 2]) / (self.xs[n - 1] - self.xs[n - 2]);
            return self.ys[n - 1] + s * (p - self.xs[n - 1]);
        }
        let k = self.xs.partition_point(|&x| x <= p) - 1;
        let h = self.xs[k + 1] - self.xs[k];
        let t = (p - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

/// Three-point one-sided end slope with the usual shape-preserving limiter.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Monotone cubic interpolation of grid samples at `p`; `p = 0` is reached by
/// linear extrapolation from the two smallest nodes.
pub fn interp(grid: &RadialGrid, samples: &[f64], p: f64) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    MonotoneCubic::from_grid(grid, samples)?.eval(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{make_grid, Clustering};

    #[test]
    fn exact_at_nodes() {
        let g = make_grid(4.0, 64, Clustering::GeometricNearZero).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|s| (s * 1.7).sin() + s).collect();
        for (x, y) in g.nodes().iter().zip(&f) {
            assert_eq!(interp(&g, &f, *x).unwrap(), *y);
        }
    }

    #[test]
    fn reproduces_linear_data() {
        for c in [Clustering::Uniform, Clustering::GeometricNearZero] {
            let g = make_grid(10.0, 128, c).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|s| 3.0 - 0.25 * s).collect();
            for p in [0.0, 1e-9, 0.37, 5.0, 9.99, 10.0] {
                let got = interp(&g, &f, p).unwrap();
                assert!((got - (3.0 - 0.25 * p)).abs() < 1e-12, "{c:?} p={p}: {got}");
            }
        }
    }

    #[test]
    fn quadratic_midpoint() {
        let g = make_grid(10.0, 256, Clustering::Uniform).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|s| s * s).collect();
        let p = 0.5 * (g.nodes()[127] + g.nodes()[128]);
        assert!((interp(&g, &f, p).unwrap() - p * p).abs() < 1e-6);
    }

    #[test]
    fn out_of_range() {
        let g = make_grid(1.0, 16, Clustering::Uniform).unwrap();
        let f = vec![1.0; 16];
        assert!(matches!(interp(&g, &f, 1.5), Err(Error::OutOfRange { .. })));
        assert!(interp(&g, &f, -0.1).is_err());
        assert!(interp(&g, &f[..3], 0.5).is_err());
    }

    #[test]
    fn stays_monotone_on_steps() {
        let g = make_grid(1.0, 32, Clustering::Uniform).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|&s| if s < 0.5 { 0.0 } else { 1.0 }).collect();
        let m = MonotoneCubic::from_grid(&g, &f).unwrap();
        let mut prev = m.eval(g.nodes()[0]).unwrap();
        for i in 0..=1000 {
            let p = g.nodes()[0] + (g.nodes()[31] - g.nodes()[0]) * i as f64 / 1000.0;
            let v = m.eval(p).unwrap();
            assert!(v >= prev - 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }
}
