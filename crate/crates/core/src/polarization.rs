//! Vacuum polarization `B_Λ(k)` of the dressed (or free) Dirac sea, the
//! screening fraction `b = αB/(1+αB)`, charge renormalization and the
//! linear-response densities built from them.
//!
//! ```text
//! B(k) = 1/(π² k²) ∫_{|ℓ±k/2|<Λ} (ẼpẼq - g(p)·g(q)) / (ẼpẼq (Ẽp+Ẽq)) dℓ
//! ```
//!
//! with `p = ℓ + k/2`, `q = ℓ - k/2` and the Euclidean 4-vector
//! `g(p) = (g0(p), g1(p) p̂)`. The numerator is evaluated as
//! `|g(p) ∧ g(q)|² / (ẼpẼq + g(p)·g(q))`, which carries no cancellation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{free_dispersion, Dispersion, ModelParams, ParamsSummary};
use crate::error::{Error, Result};
use crate::numerics::{make_grid, Clustering, GaussLegendre};

/// Radial dispersion profile `p ↦ (g0(p), g1(p))` on `[0, Λ]`.
pub trait Profile: Sync {
    fn cutoff(&self) -> f64;
    fn g(&self, p: f64) -> (f64, f64);
}

impl Profile for Dispersion {
    fn cutoff(&self) -> f64 {
        self.grid().cutoff()
    }

    #[inline]
    fn g(&self, p: f64) -> (f64, f64) {
        self.eval(p)
    }
}

/// `g0 = 1`, `g1 = p` evaluated exactly.
#[derive(Debug, Clone, Copy)]
pub struct FreeProfile {
    pub cutoff: f64,
}

impl Profile for FreeProfile {
    fn cutoff(&self) -> f64 {
        self.cutoff
    }

    #[inline]
    fn g(&self, p: f64) -> (f64, f64) {
        (1.0, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionKind {
    Dressed,
    Free,
}

/// Numerator used for the `ℓ` integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    /// `|g(p) ∧ g(q)|² / (ẼpẼq + g(p)·g(q))`.
    Wedge,
    /// `ẼpẼq - g(p)·g(q)` as written.
    Raw,
}

/// Gauss-Legendre orders per panel in `|ℓ|` and per interval in `cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub u_order: usize,
    pub c_order: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            u_order: 16,
            c_order: 64,
        }
    }
}

impl Resolution {
    pub fn doubled(&self) -> Resolution {
        Resolution {
            u_order: 2 * self.u_order,
            c_order: 2 * self.c_order,
        }
    }
}

/// Below this momentum the table reports the radial `k = 0` value.
pub const K_SWITCH: f64 = 1e-3;

/// Frozen bound on `sup_k B(k) / ln Λ` for `α <= 0.02` (measured 0.203 to 0.209).
pub const B_OVER_LOG_BOUND: f64 = 2.0;

/// Frozen bound on `sup_{k <= 0.1} |B(k) - B(0)| / (k (1/Λ + sqrt k))`
/// (measured 0.006 to 0.06 for `α <= 0.02`, `Λ <= 1e6`).
pub const CONTINUITY_BOUND: f64 = 0.5;

/// Sampled `B_Λ(k)`, `b_Λ(k)` and the radial `B_Λ(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationTable {
    pub params: ParamsSummary,
    pub dispersion_kind: DispersionKind,
    pub k_nodes: Vec<f64>,
    #[serde(rename = "B")]
    pub big_b: Vec<f64>,
    pub b: Vec<f64>,
    /// The two-dimensional integral at every node, including those below
    /// [`K_SWITCH`] where `big_b` holds the radial value.
    pub integral: Vec<f64>,
    #[serde(rename = "B0_at_zero")]
    pub b0_at_zero: f64,
}

impl PolarizationTable {
    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn cutoff(&self) -> f64 {
        self.params.cutoff
    }

    /// `αB/(1+αB)` evaluated at the radial `B(0)`.
    pub fn b_at_zero(&self) -> f64 {
        screening(self.b0_at_zero, self.alpha())
    }
}

fn screening(big_b: f64, alpha: f64) -> f64 {
    let x = alpha * big_b;
    x / (1.0 + x)
}

/// `b = αB / (1 + αB)`.
pub fn b_screening(big_b: f64, alpha: f64) -> Result<f64> {
    if !(big_b >= 0.0) {
        return Err(Error::Invariant(format!("polarization must be non-negative, got {big_b}")));
    }
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
    }
    Ok(screening(big_b, alpha))
}

/// Geometric momenta from `k_min` to `2Λ`.
pub fn k_grid(cutoff: f64, n: usize, k_min: f64) -> Result<Vec<f64>> {
    let k_max = 2.0 * cutoff;
    if n < 2 || !(k_min > 0.0) || k_min >= k_max {
        return Err(Error::InvalidParameter(format!(
            "k grid needs n >= 2 and 0 < k_min < 2Λ, got n = {n}, k_min = {k_min}"
        )));
    }
    let ratio = (k_max / k_min).ln() / (n - 1) as f64;
    let mut ks: Vec<f64> = (0..n).map(|i| k_min * (ratio * i as f64).exp()).collect();
    ks[n - 1] = k_max;
    Ok(ks)
}

/// `B_Λ(0)` from the radial closed form
/// `(1/3π) ∫ u² [(g0'² + g1'² + 2 g1²/u²)/Ẽ³ - (g0 g0' + g1 g1')²/Ẽ⁵] du`.
pub fn b_lambda_zero_radial(d: &Dispersion) -> Result<f64> {
    let der = d
        .derivatives()
        .ok_or_else(|| Error::Precondition("radial B(0) needs a solved dispersion with derivatives".into()))?;
    let grid = d.grid();
    let mut sum = 0.0;
    for i in 0..grid.len() {
        let u = grid.nodes()[i];
        let (g0, g1) = (d.g0()[i], d.g1()[i]);
        let (d0, d1) = (der.g0_prime[i], der.g1_prime[i]);
        let e2 = g0 * g0 + g1 * g1;
        let e = e2.sqrt();
        let e3 = e2 * e;
        let r = g1 / u;
        let mix = g0 * d0 + g1 * d1;
        let f = u * u * (d0 * d0 + d1 * d1 + 2.0 * r * r) / e3 - u * u * mix * mix / (e3 * e2);
        sum += grid.weights()[i] * f;
    }
    Ok(sum / (3.0 * PI))
}

/// Nodes used for the radial free-theory `B⁰(0)`.
const FREE_RADIAL_NODES: usize = 512;

/// `B⁰_Λ(0)`: the radial closed form on the free dispersion.
pub fn free_b_zero(params: &ModelParams) -> Result<f64> {
    let free = ModelParams::new(0.0, params.cutoff())?;
    let grid = make_grid(params.cutoff(), FREE_RADIAL_NODES, Clustering::GeometricNearZero)?;
    b_lambda_zero_radial(&free_dispersion(free, grid)?)
}

/// `Z3 = 1 / (1 + α B⁰(0))` and `α_phys = α Z3`.
pub fn charge_renormalization(params: &ModelParams) -> Result<(f64, f64)> {
    let z3 = 1.0 / (1.0 + params.alpha() * free_b_zero(params)?);
    Ok((z3, params.alpha() * z3))
}

/// `B_Λ(k)` by the two-dimensional integral in `|ℓ|` and `cos θ`.
pub fn b_lambda_k<P: Profile + ?Sized>(profile: &P, k: f64) -> Result<f64> {
    b_lambda_k_with(profile, k, Resolution::default(), Integrand::Wedge)
}

pub fn b_lambda_k_with<P: Profile + ?Sized>(profile: &P, k: f64, res: Resolution, form: Integrand) -> Result<f64> {
    let cutoff = profile.cutoff();
    if !(k > 0.0) || k > 2.0 * cutoff {
        return Err(Error::OutOfRange {
            point: k,
            upper: 2.0 * cutoff,
        });
    }
    let gu = GaussLegendre::new(res.u_order);
    let gc = GaussLegendre::new(res.c_order);
    Ok(integral(profile, k, &gu, &gc, form))
}

fn u_breakpoints(k: f64, cutoff: f64, u_max: f64) -> Vec<f64> {
    let mut pts = vec![0.0, u_max];
    let mut u = (0.25 * k).min(1e-3);
    while u < u_max {
        pts.push(u);
        u *= 2.0;
    }
    for extra in [0.5 * k, cutoff - 0.5 * k] {
        if extra > 0.0 && extra < u_max {
            pts.push(extra);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * u_max);
    pts
}

fn integral<P: Profile + ?Sized>(profile: &P, k: f64, gu: &GaussLegendre, gc: &GaussLegendre, form: Integrand) -> f64 {
    let cutoff = profile.cutoff();
    let h = 0.5 * k;
    let u_max2 = cutoff * cutoff - h * h;
    if u_max2 <= 0.0 {
        return 0.0;
    }
    let u_max = u_max2.sqrt();
    let breaks = u_breakpoints(k, cutoff, u_max);
    let mut total = 0.0;
    let mut upts = Vec::with_capacity(gu.order());
    let mut cpts = Vec::with_capacity(gc.order());
    for w in breaks.windows(2) {
        upts.clear();
        gu.map_into(w[0], w[1], &mut upts);
        for &(u, wu) in &upts {
            let c_top = ((u_max2 - u * u) / (u * k)).min(1.0);
            if c_top <= 0.0 {
                continue;
            }
            cpts.clear();
            gc.map_into(0.0, c_top, &mut cpts);
            let inner: f64 = cpts.iter().map(|&(c, wc)| wc * integrand(profile, u, c, h, form)).sum();
            total += wu * u * u * inner;
        }
    }
    4.0 / (PI * k * k) * total
}

#[inline]
fn integrand<P: Profile + ?Sized>(profile: &P, u: f64, c: f64, h: f64, form: Integrand) -> f64 {
    let lx = u * (1.0 - c * c).max(0.0).sqrt();
    let lz = u * c;
    let (pz, qz) = (lz + h, lz - h);
    let pn = lx.hypot(pz);
    let qn = lx.hypot(qz);
    let (g0p, g1p) = profile.g(pn);
    let (g0q, g1q) = profile.g(qn);
    let (ax, az) = if pn > 0.0 { (g1p * lx / pn, g1p * pz / pn) } else { (0.0, 0.0) };
    let (bx, bz) = if qn > 0.0 { (g1q * lx / qn, g1q * qz / qn) } else { (0.0, 0.0) };
    let ep = g0p.hypot(g1p);
    let eq = g0q.hypot(g1q);
    let dot = g0p * g0q + ax * bx + az * bz;
    let numerator = match form {
        Integrand::Wedge => {
            let m_tx = g0p * bx - g0q * ax;
            let m_tz = g0p * bz - g0q * az;
            let m_xz = ax * bz - az * bx;
            (m_tx * m_tx + m_tz * m_tz + m_xz * m_xz) / (ep * eq + dot)
        }
        Integrand::Raw => ep * eq - dot,
    };
    numerator / (ep * eq * (ep + eq))
}

/// Table of `B(k)`, `b(k)` on `k_nodes` for a solved dispersion.
pub fn polarization_table(d: &Dispersion, k_nodes: &[f64], res: Resolution) -> Result<PolarizationTable> {
    let b0 = if d.is_free() {
        free_b_zero(d.params())?
    } else {
        b_lambda_zero_radial(d)?
    };
    build_table(d, *d.params(), DispersionKind::Dressed, b0, k_nodes, res)
}

/// The same pipeline with `g0 = 1`, `g1 = p`.
pub fn free_polarization_table(params: &ModelParams, k_nodes: &[f64]) -> Result<PolarizationTable> {
    free_polarization_table_with(params, k_nodes, Resolution::default())
}

pub fn free_polarization_table_with(params: &ModelParams, k_nodes: &[f64], res: Resolution) -> Result<PolarizationTable> {
    let b0 = free_b_zero(params)?;
    let profile = FreeProfile {
        cutoff: params.cutoff(),
    };
    build_table(&profile, *params, DispersionKind::Free, b0, k_nodes, res)
}

fn build_table<P: Profile + ?Sized>(
    profile: &P,
    params: ModelParams,
    kind: DispersionKind,
    b0: f64,
    k_nodes: &[f64],
    res: Resolution,
) -> Result<PolarizationTable> {
    let cutoff = params.cutoff();
    if let Some(&bad) = k_nodes.iter().find(|&&k| !(k > 0.0) || k > 2.0 * cutoff) {
        return Err(Error::OutOfRange {
            point: bad,
            upper: 2.0 * cutoff,
        });
    }
    let gu = GaussLegendre::new(res.u_order);
    let gc = GaussLegendre::new(res.c_order);
    let integral: Vec<f64> = k_nodes
        .par_iter()
        .map(|&k| integral(profile, k, &gu, &gc, Integrand::Wedge))
        .collect();
    let big_b: Vec<f64> = k_nodes
        .iter()
        .zip(&integral)
        .map(|(&k, &v)| if k < K_SWITCH { b0 } else { v })
        .collect();
    let alpha = params.alpha();
    let b = big_b.iter().map(|&v| screening(v, alpha)).collect();
    Ok(PolarizationTable {
        params: params.summary(),
        dispersion_kind: kind,
        k_nodes: k_nodes.to_vec(),
        big_b,
        b,
        integral,
        b0_at_zero: b0,
    })
}

fn check_len(table: &PolarizationTable, values: &[f64]) -> Result<()> {
    if values.len() != table.k_nodes.len() {
        return Err(Error::Shape {
            expected: table.k_nodes.len(),
            got: values.len(),
        });
    }
    Ok(())
}

/// Linear vacuum response `-B(k) ρ̂(k)` to an external density.
pub fn linear_response_density(table: &PolarizationTable, rho_hat: &[f64]) -> Result<Vec<f64>> {
    check_len(table, rho_hat)?;
    Ok(table.big_b.iter().zip(rho_hat).map(|(b, r)| -b * r).collect())
}

/// Leading screened vacuum density `-b(k) n̂(k)`.
pub fn screened_density(table: &PolarizationTable, n_hat: &[f64]) -> Result<Vec<f64>> {
    check_len(table, n_hat)?;
    Ok(table.b.iter().zip(n_hat).map(|(b, n)| -b * n).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// `(k, |B(k) - B(0)| / (k (1/Λ + sqrt k)))` for every node with `k <= 0.1`.
    pub ratios: Vec<(f64, f64)>,
    pub max_ratio: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Small-momentum continuity of `B` measured on the two-dimensional integral.
pub fn continuity_modulus(table: &PolarizationTable) -> ContinuityReport {
    let inv_cutoff = 1.0 / table.cutoff();
    let ratios: Vec<(f64, f64)> = table
        .k_nodes
        .iter()
        .zip(&table.integral)
        .filter(|(k, _)| **k <= 0.1)
        .map(|(&k, &v)| (k, (v - table.b0_at_zero).abs() / (k * (inv_cutoff + k.sqrt()))))
        .collect();
    let max_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    ContinuityReport {
        within_bound: max_ratio <= CONTINUITY_BOUND,
        ratios,
        max_ratio,
        bound: CONTINUITY_BOUND,
    }
}

/// `(ẼpẼq - g(p)·g(q)) / (ẼpẼq (Ẽp + Ẽq))` for three-dimensional `p`, `q`.
pub fn pair_factor<P: Profile + ?Sized>(profile: &P, p: [f64; 3], q: [f64; 3]) -> f64 {
    let pn = norm(p);
    let qn = norm(q);
    let (g0p, g1p) = profile.g(pn);
    let (g0q, g1q) = profile.g(qn);
    let cos = if pn > 0.0 && qn > 0.0 {
        (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]) / (pn * qn)
    } else {
        0.0
    };
    let ep = g0p.hypot(g1p);
    let eq = g0q.hypot(g1q);
    let dot = g0p * g0q + g1p * g1q * cos;
    // |g(p) ∧ g(q)|² = Ẽp²Ẽq² - (g(p)·g(q))²
    let sin2 = (1.0 - cos * cos).max(0.0);
    let wedge = (g0p * g1q * cos - g0q * g1p).powi(2) + sin2 * g1q * g1q * (g0p * g0p + g1p * g1p);
    wedge / (ep * eq + dot) / (ep * eq * (ep + eq))
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBoundReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `factor / bound` seen.
    pub max_ratio: f64,
}

/// Checks `factor(p, q) <= min(2, 8|p-q|²/Ẽp², 8|p-q|²/Ẽq²)` on seeded
/// random pairs with log-uniform radii in `[1e-3, Λ]`.
pub fn pair_bound_samples<P: Profile + ?Sized>(profile: &P, samples: usize, seed: u64) -> PairBoundReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cutoff = profile.cutoff();
    let (lo, hi) = (1e-3f64.ln(), cutoff.ln());
    let point = |rng: &mut ChaCha8Rng| {
        let r = rng.gen_range(lo..hi).exp();
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        [r * s * phi.cos(), r * s * phi.sin(), r * z]
    };
    let mut violations = 0;
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let p = point(&mut rng);
        let q = point(&mut rng);
        let f = pair_factor(profile, p, q);
        let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
        let e2 = |x: [f64; 3]| {
            let (a, b) = profile.g(norm(x));
            a * a + b * b
        };
        let bound = 2.0f64.min(8.0 * d2 / e2(p)).min(8.0 * d2 / e2(q));
        if f > bound {
            violations += 1;
        }
        max_ratio = max_ratio.max(f / bound);
    }
    PairBoundReport {
        samples,
        violations,
        max_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed form of the free radial integral:
    /// `(1/3π) [2 asinh Λ - 2τ + τ³/3]`, `τ = Λ / sqrt(1 + Λ²)`.
    fn free_b0_exact(cutoff: f64) -> f64 {
        let tau = cutoff / (1.0 + cutoff * cutoff).sqrt();
        (2.0 * cutoff.asinh() - 2.0 * tau + tau.powi(3) / 3.0) / (3.0 * PI)
    }

    #[test]
    fn screening_algebra() {
        assert_eq!(b_screening(0.0, 0.3).unwrap(), 0.0);
        assert_eq!(b_screening(10.0, 0.1).unwrap(), 0.5);
        assert!(b_screening(-1.0, 0.1).is_err());
        let mut prev = 0.0;
        for x in [0.1, 1.0, 10.0, 1e3, 1e6] {
            let b = b_screening(x, 1.0).unwrap();
            assert!(b > prev && b < 1.0);
            prev = b;
        }
    }

    #[test]
    fn free_radial_matches_closed_form() {
        for cutoff in [1e2, 1e4, 1e6] {
            let got = free_b_zero(&ModelParams::new(0.01, cutoff).unwrap()).unwrap();
            let want = free_b0_exact(cutoff);
            assert!(((got - want) / want).abs() < 1e-10, "{cutoff}: {got} vs {want}");
        }
    }

    #[test]
    fn vanishes_at_twice_the_cutoff() {
        let profile = FreeProfile { cutoff: 100.0 };
        assert_eq!(b_lambda_k(&profile, 200.0).unwrap(), 0.0);
        assert!(b_lambda_k(&profile, 200.1).is_err());
        assert!(b_lambda_k(&profile, 0.0).is_err());
    }

    #[test]
    fn free_small_k_matches_radial() {
        let cutoff = 1e4;
        let profile = FreeProfile { cutoff };
        let b = b_lambda_k(&profile, 1e-2).unwrap();
        let want = free_b0_exact(cutoff);
        assert!(((b - want) / want).abs() < 0.02, "{b} vs {want}");
    }

    #[test]
    fn wedge_and_raw_agree_at_moderate_k() {
        let profile = FreeProfile { cutoff: 1e3 };
        for k in [1.0, 10.0, 300.0] {
            let w = b_lambda_k_with(&profile, k, Resolution::default(), Integrand::Wedge).unwrap();
            let r = b_lambda_k_with(&profile, k, Resolution::default(), Integrand::Raw).unwrap();
            assert!(((w - r) / w).abs() < 1e-8, "k={k}: {w} vs {r}");
        }
    }

    #[test]
    fn pair_factor_matches_raw_form() {
        let profile = FreeProfile { cutoff: 10.0 };
        let p = [0.3, -1.2, 2.0];
        let q = [1.1, 0.4, -0.7];
        let ep = (1.0 + 0.09 + 1.44 + 4.0f64).sqrt();
        let eq = (1.0 + 1.21 + 0.16 + 0.49f64).sqrt();
        let dot = 1.0 + 0.3 * 1.1 - 1.2 * 0.4 - 2.0 * 0.7;
        let want = (ep * eq - dot) / (ep * eq * (ep + eq));
        assert!((pair_factor(&profile, p, q) - want).abs() < 1e-15);
    }

    #[test]
    fn response_is_linear_and_signed() {
        let params = ModelParams::new(0.01, 100.0).unwrap();
        let ks = k_grid(100.0, 16, 1e-4).unwrap();
        let t = free_polarization_table(&params, &ks).unwrap();
        let r1: Vec<f64> = ks.iter().map(|k| (-k * k).exp()).collect();
        let r2: Vec<f64> = ks.iter().map(|k| 1.0 / (1.0 + k)).collect();
        let mix: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let a = linear_response_density(&t, &r1).unwrap();
        let b = linear_response_density(&t, &r2).unwrap();
        let m = linear_response_density(&t, &mix).unwrap();
        for i in 0..ks.len() {
            assert!((m[i] - (2.0 * a[i] - 0.5 * b[i])).abs() <= 1e-15 * (1.0 + m[i].abs()));
            assert!(a[i] <= 0.0 && b[i] <= 0.0);
        }
        assert!(linear_response_density(&t, &r1[..3]).is_err());
        let s = screened_density(&t, &r1).unwrap();
        for i in 0..ks.len() {
            assert!(s[i].abs() <= params.alpha() * t.big_b[i] * r1[i] + 1e-18);
        }
    }

    #[test]
    fn k_grid_shape() {
        let ks = k_grid(1e4, 128, 1e-4).unwrap();
        assert_eq!(ks.len(), 128);
        assert_eq!(ks[0], 1e-4);
        assert_eq!(ks[127], 2e4);
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
        assert!(k_grid(1.0, 1, 1e-4).is_err());
    }
}
