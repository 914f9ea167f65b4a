//! Gauss-Legendre rules, plain integration on a [`RadialGrid`], and product
//! integration against kernels carrying an integrable logarithmic singularity.

use crate::error::{Error, Result};

use super::grid::RadialGrid;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Append the rule mapped onto `[a, b]` to `out`.
    pub fn map_into(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push((mid + half * x, half * w));
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sum of `w_i f_i` over the grid.
pub fn integrate(grid: &RadialGrid, samples: &[f64]) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    Ok(grid
        .weights()
        .iter()
        .zip(samples)
        .map(|(w, f)| w * f)
        .sum())
}

/// Geometric grading ratio and per-piece order used near a log singularity.
const GRADING: f64 = 0.25;
const PIECE_ORDER: usize = 12;

/// Quadrature points on `[a, b]` for integrands smooth except for a log
/// singularity at `x` (which may lie inside, on, or outside the interval).
pub(crate) struct SingularRules {
    piece: GaussLegendre,
    plain: Vec<Option<GaussLegendre>>,
}

impl SingularRules {
    pub(crate) fn new() -> Self {
        SingularRules {
            piece: GaussLegendre::new(PIECE_ORDER),
            plain: Vec::new(),
        }
    }

    fn plain(&mut self, order: usize) -> &GaussLegendre {
        if self.plain.len() <= order {
            self.plain.resize(order + 1, None);
        }
        self.plain[order].get_or_insert_with(|| GaussLegendre::new(order))
    }

    /// Points and weights on `[a, b]`; `smooth_order` is the order used when
    /// the singular point is at least one interval width away.
    pub(crate) fn points(&mut self, a: f64, b: f64, x: f64, smooth_order: usize, out: &mut Vec<(f64, f64)>) {
        let width = b - a;
        if x > a && x < b {
            self.graded(x, a, 0.0, out);
            self.graded(x, b, 0.0, out);
            return;
        }
        let dist = if x <= a { a - x } else { x - b };
        if dist < width {
            let near = if x <= a { a } else { b };
            let far = if x <= a { b } else { a };
            self.graded(near, far, dist, out);
        } else {
            self.plain(smooth_order).map_into(a, b, out);
        }
    }

    /// Pieces shrinking geometrically toward `near` until they are no longer
    /// than `dist` (the distance from `near` to the singular point), or reach
    /// a relative length of 1e-12 when the singularity sits on `near` itself.
    fn graded(&self, near: f64, far: f64, dist: f64, out: &mut Vec<(f64, f64)>) {
        let total = (far - near).abs();
        let dir = if far > near { 1.0 } else { -1.0 };
        let floor = dist.max(1e-12 * total.max(near.abs()));
        let mut outer = total;
        loop {
            let inner = outer * GRADING;
            if inner <= floor {
                self.push_piece(near, dir, 0.0, outer, out);
                break;
            }
            self.push_piece(near, dir, inner, outer, out);
            outer = inner;
        }
    }

    fn push_piece(&self, near: f64, dir: f64, lo: f64, hi: f64, out: &mut Vec<(f64, f64)>) {
        let (a, b) = if dir > 0.0 {
            (near + lo, near + hi)
        } else {
            (near - hi, near - lo)
        };
        self.piece.map_into(a, b, out);
    }
}

/// Product-integration weights: returns `w` with
/// `sum_j w_j f_j ≈ ∫_0^cutoff kernel(s) f(s) ds`, where `f` is the
/// panel-wise polynomial interpolant of the samples and `kernel` may carry an
/// integrable log singularity at `singular_at`.
pub fn product_weights<K: Fn(f64) -> f64>(grid: &RadialGrid, singular_at: f64, kernel: K) -> Vec<f64> {
    let mut rules = SingularRules::new();
    let mut weights = vec![0.0; grid.len()];
    accumulate_product_weights(grid, singular_at, &mut rules, &mut [&mut weights[..]], |s, out| {
        out[0] = kernel(s)
    });
    weights
}

/// Several kernels sharing the same singular point, accumulated in one pass.
pub(crate) fn accumulate_product_weights<K>(
    grid: &RadialGrid,
    singular_at: f64,
    rules: &mut SingularRules,
    rows: &mut [&mut [f64]],
    kernels: K,
) where
    K: Fn(f64, &mut [f64]),
{
    let nk = rows.len();
    let mut kvals = vec![0.0; nk];
    let mut pts = Vec::with_capacity(1024);
    let mut basis = vec![0.0; grid.max_panel_len()];
    for panel in grid.panels() {
        pts.clear();
        let smooth_order = (2 * panel.len).max(8);
        rules.points(panel.a, panel.b, singular_at, smooth_order, &mut pts);
        let local = &mut basis[..panel.len];
        for &(s, wq) in &pts {
            kernels(s, &mut kvals);
            grid.panel_basis(panel, s, local);
            for (row, kv) in rows.iter_mut().zip(&kvals) {
                let scale = kv * wq;
                let dst = &mut row[panel.start..panel.start + panel.len];
                for (d, l) in dst.iter_mut().zip(local.iter()) {
                    *d += scale * l;
                }
            }
        }
    }
}

/// `ln((p + s) / |p - s|)` for `p, s > 0`, `p != s`.
#[inline]
pub fn log_ratio(p: f64, s: f64) -> f64 {
    let y = if s < p { s / p } else { p / s };
    2.0 * y.atanh()
}

/// `∫_0^cutoff smooth(s) ln((p + s)/|p - s|) ds`, split at `s = p` with
/// geometrically graded Gauss-Legendre pieces toward the singular point.
pub fn integrate_with_log_singularity(grid: &RadialGrid, p: f64, smooth: &[f64]) -> Result<f64> {
    if smooth.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            got: smooth.len(),
        });
    }
    if !(p > 0.0 && p < grid.cutoff()) {
        return Err(Error::InvalidParameter(format!(
            "singular point {p} must lie strictly inside (0, {})",
            grid.cutoff()
        )));
    }
    let w = product_weights(grid, p, |s| log_ratio(p, s));
    Ok(w.iter().zip(smooth).map(|(w, f)| w * f).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{make_grid, Clustering};

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 12, 16, 64] {
            let gl = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got = gl.integrate(0.0, 1.0, |x| x.powi(deg as i32));
                let want = 1.0 / (deg as f64 + 1.0);
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_integrand() {
        let g = make_grid(3.0, 64, Clustering::GeometricNearZero).unwrap();
        assert_eq!(integrate(&g, &vec![0.0; 64]).unwrap(), 0.0);
        assert_eq!(integrate_with_log_singularity(&g, 1.0, &vec![0.0; 64]).unwrap(), 0.0);
    }

    #[test]
    fn exponential_on_both_layouts() {
        let want = 1.0 - (-10.0f64).exp();
        for c in [Clustering::Uniform, Clustering::GeometricNearZero] {
            let g = make_grid(10.0, 512, c).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|s| (-s).exp()).collect();
            let got = integrate(&g, &f).unwrap();
            assert!((got - want).abs() < 1e-6, "{c:?}: {got}");
        }
    }

    #[test]
    fn shape_mismatch() {
        let g = make_grid(1.0, 16, Clustering::Uniform).unwrap();
        assert!(matches!(integrate(&g, &[1.0; 3]), Err(Error::Shape { expected: 16, got: 3 })));
    }

    #[test]
    fn log_singular_constant_matches_antiderivative() {
        // (1+s)ln(1+s) - (s-1)ln|s-1| between 0 and 2 gives 3 ln 3.
        let want = 3.0 * 3f64.ln();
        for c in [Clustering::Uniform, Clustering::GeometricNearZero] {
            let g = make_grid(2.0, 128, c).unwrap();
            let got = integrate_with_log_singularity(&g, 1.0, &vec![1.0; 128]).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "{c:?}: {got} vs {want}");
        }
    }

    #[test]
    fn log_singular_rejects_points_outside() {
        let g = make_grid(2.0, 32, Clustering::Uniform).unwrap();
        let f = vec![1.0; 32];
        assert!(integrate_with_log_singularity(&g, 0.0, &f).is_err());
        assert!(integrate_with_log_singularity(&g, 2.0, &f).is_err());
        assert!(integrate_with_log_singularity(&g, 3.0, &f).is_err());
    }

    #[test]
    fn log_singular_refinement_is_stable() {
        let smooth = |s: f64| (-s).exp() * (1.0 + s * s).sqrt();
        let run = |n: usize| {
            let g = make_grid(5.0, n, Clustering::GeometricNearZero).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|&s| smooth(s)).collect();
            integrate_with_log_singularity(&g, 1.3, &f).unwrap()
        };
        let a = run(256);
        let b = run(512);
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
    }
}
