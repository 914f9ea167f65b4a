use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::quadrature::GaussLegendre;

/// Node layout of a [`RadialGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clustering {
    /// Equally spaced cell centres with an end-corrected midpoint rule.
    Uniform,
    /// Composite Gauss-Legendre panels whose edges grow geometrically from
    /// `min(1e-8 * cutoff, 1e-4)`, so that at least three quarters of the
    /// panels sit below `cutoff / 100`.
    GeometricNearZero,
}

/// A contiguous block of nodes sharing one interpolating polynomial.
#[derive(Debug, Clone)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub start: usize,
    pub len: usize,
    /// Node positions mapped to [-1, 1].
    local: Vec<f64>,
    /// Barycentric weights for `local`.
    bary: Vec<f64>,
}

impl Panel {
    fn new(a: f64, b: f64, start: usize, nodes: &[f64]) -> Panel {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let local: Vec<f64> = nodes.iter().map(|x| (x - mid) / half).collect();
        let bary = local
            .iter()
            .enumerate()
            .map(|(j, tj)| {
                let prod: f64 = local
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, tk)| tj - tk)
                    .product();
                1.0 / prod
            })
            .collect();
        Panel {
            a,
            b,
            start,
            len: nodes.len(),
            local,
            bary,
        }
    }
}

/// Ordered radial nodes in `(0, cutoff]` with matching positive quadrature
/// weights for `∫_0^cutoff`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cutoff: f64,
    clustering: Clustering,
    panels: Vec<Panel>,
}

/// Relative position of the first geometric panel edge, and its absolute cap.
const FIRST_EDGE: f64 = 1e-8;
const FIRST_EDGE_MAX: f64 = 1e-4;

pub fn make_grid(cutoff: f64, n_points: usize, clustering: Clustering) -> Result<RadialGrid> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidParameter(format!("grid cutoff must be positive, got {cutoff}")));
    }
    if n_points < 8 {
        return Err(Error::InvalidParameter(format!("grid needs at least 8 nodes, got {n_points}")));
    }
    match clustering {
        Clustering::Uniform => Ok(uniform(cutoff, n_points)),
        Clustering::GeometricNearZero => Ok(geometric(cutoff, n_points)),
    }
}

fn uniform(cutoff: f64, n: usize) -> RadialGrid {
    let h = cutoff / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    // Midpoint rule plus a second-order estimate of the Euler-Maclaurin
    // h^2/24 (f'(b) - f'(a)) term; exact for cubics, all weights positive.
    let mut weights = vec![h; n];
    for (k, c) in [(0usize, 2.0), (1, -3.0), (2, 1.0)] {
        weights[k] += c * h / 24.0;
        weights[n - 1 - k] += c * h / 24.0;
    }
    let blocks = n / 4;
    let mut panels = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let start = 4 * b;
        let len = if b + 1 == blocks { n - start } else { 4 };
        let a = start as f64 * h;
        let end = if b + 1 == blocks { cutoff } else { (start + len) as f64 * h };
        panels.push(Panel::new(a, end, start, &nodes[start..start + len]));
    }
    RadialGrid {
        nodes,
        weights,
        cutoff,
        clustering: Clustering::Uniform,
        panels,
    }
}

fn geometric(cutoff: f64, n: usize) -> RadialGrid {
    let n_panels = n.div_ceil(16).max(4);
    let base = n / n_panels;
    let extra = n % n_panels;
    let first = (FIRST_EDGE * cutoff).min(FIRST_EDGE_MAX);
    let ratio = (cutoff / first).powf(1.0 / (n_panels as f64 - 1.0));
    let mut edges = Vec::with_capacity(n_panels + 1);
    edges.push(0.0);
    for k in 0..n_panels - 1 {
        edges.push(first * ratio.powi(k as i32));
    }
    edges.push(cutoff);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut panels = Vec::with_capacity(n_panels);
    let mut rules: Vec<Option<GaussLegendre>> = vec![None; base + 2];
    for k in 0..n_panels {
        // Larger panels sit at large radius; give them the spare nodes.
        let len = base + usize::from(k >= n_panels - extra);
        let rule = rules[len].get_or_insert_with(|| GaussLegendre::new(len));
        let (a, b) = (edges[k], edges[k + 1]);
        let start = nodes.len();
        let mut pts = Vec::with_capacity(len);
        rule.map_into(a, b, &mut pts);
        for (x, w) in pts {
            nodes.push(x);
            weights.push(w);
        }
        panels.push(Panel::new(a, b, start, &nodes[start..]));
    }
    RadialGrid {
        nodes,
        weights,
        cutoff,
        clustering: Clustering::GeometricNearZero,
        panels,
    }
}

impl RadialGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn clustering(&self) -> Clustering {
        self.clustering
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub(crate) fn max_panel_len(&self) -> usize {
        self.panels.iter().map(|p| p.len).max().unwrap_or(0)
    }

    /// Number of nodes in `(0, x]`.
    pub fn count_below(&self, x: f64) -> usize {
        self.nodes.partition_point(|&s| s <= x)
    }

    /// Spacing of a uniform grid.
    pub fn spacing(&self) -> Option<f64> {
        match self.clustering {
            Clustering::Uniform => Some(self.cutoff / self.len() as f64),
            Clustering::GeometricNearZero => None,
        }
    }

    /// The same layout with twice as many nodes.
    pub fn refined(&self) -> RadialGrid {
        match self.clustering {
            Clustering::Uniform => uniform(self.cutoff, 2 * self.len()),
            Clustering::GeometricNearZero => geometric(self.cutoff, 2 * self.len()),
        }
    }

    /// Values of the Lagrange basis of `panel` at `s`.
    pub(crate) fn panel_basis(&self, panel: &Panel, s: f64, out: &mut [f64]) {
        let mid = 0.5 * (panel.a + panel.b);
        let half = 0.5 * (panel.b - panel.a);
        let t = (s - mid) / half;
        let mut total = 0.0;
        for (j, (tj, bj)) in panel.local.iter().zip(&panel.bary).enumerate() {
            let d = t - tj;
            if d == 0.0 {
                out.iter_mut().for_each(|o| *o = 0.0);
                out[j] = 1.0;
                return;
            }
            out[j] = bj / d;
            total += out[j];
        }
        out.iter_mut().for_each(|o| *o /= total);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    fn check_invariants(g: &RadialGrid) {
        assert!(g.nodes()[0] > 0.0);
        assert!(*g.nodes().last().unwrap() <= g.cutoff());
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.weights().iter().all(|&w| w > 0.0));
        let one = integrate(g, &vec![1.0; g.len()]).unwrap();
        assert!(((one - g.cutoff()) / g.cutoff()).abs() < 1e-10);
        let covered: usize = g.panels().iter().map(|p| p.len).sum();
        assert_eq!(covered, g.len());
    }

    #[test]
    fn layouts_satisfy_invariants() {
        for n in [8usize, 9, 17, 100, 256, 511, 512, 1024] {
            for c in [Clustering::Uniform, Clustering::GeometricNearZero] {
                let g = make_grid(10.0, n, c).unwrap();
                assert_eq!(g.len(), n);
                check_invariants(&g);
            }
        }
    }

    #[test]
    fn uniform_moments() {
        let g = make_grid(10.0, 256, Clustering::Uniform).unwrap();
        let s: Vec<f64> = g.nodes().to_vec();
        let s2: Vec<f64> = g.nodes().iter().map(|x| x * x).collect();
        assert!((integrate(&g, &s).unwrap() - 50.0).abs() < 1e-6);
        let want = 1000.0 / 3.0;
        assert!(((integrate(&g, &s2).unwrap() - want) / want).abs() < 1e-4);
    }

    #[test]
    fn geometric_clustering_near_zero() {
        for cutoff in [1e2, 1e4, 1e8] {
            for n in [8usize, 64, 512] {
                let g = make_grid(cutoff, n, Clustering::GeometricNearZero).unwrap();
                assert!(4 * g.count_below(cutoff / 100.0) >= n, "cutoff = {cutoff}, n = {n}");
            }
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(make_grid(0.0, 16, Clustering::Uniform).is_err());
        assert!(make_grid(-1.0, 16, Clustering::Uniform).is_err());
        assert!(make_grid(1.0, 7, Clustering::GeometricNearZero).is_err());
    }

    #[test]
    fn panel_basis_reproduces_polynomials() {
        let g = make_grid(3.0, 64, Clustering::GeometricNearZero).unwrap();
        let mut buf = vec![0.0; g.max_panel_len()];
        for panel in g.panels() {
            let xs = &g.nodes()[panel.start..panel.start + panel.len];
            let s = 0.3 * panel.a + 0.7 * panel.b;
            let out = &mut buf[..panel.len];
            g.panel_basis(panel, s, out);
            let cubic = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
            let got: f64 = out.iter().zip(xs).map(|(l, x)| l * cubic(*x)).sum();
            assert!((got - cubic(s)).abs() < 1e-9 * (1.0 + cubic(s).abs()));
        }
    }
}
