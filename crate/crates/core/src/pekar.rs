//! Radial Choquard-Pekar problem
//!
//! ```text
//! E(φ) = ∫ |∇φ|² - ∬ φ(x)² φ(y)² / |x - y|,   ‖φ‖₂ = 1
//! ```
//!
//! on a uniform cell-centred grid in `(0, R_max)`. Radial functions are
//! handled through `u = rφ`, with `u = 0` imposed at both ends by mirrored
//! ghost cells. All integrals are midpoint sums, so `T`, `D`, `μ` and the
//! Euler-Lagrange residual refer to the same discrete energy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Clustering, RadialGrid};

/// Smallest admissible box radius.
pub const MIN_R_MAX: f64 = 40.0;

/// Energy of the optimal Gaussian trial state, `-1/(3π)`.
pub fn gaussian_bound() -> f64 {
    -1.0 / (3.0 * PI)
}

/// Width minimizing [`gaussian_trial_energy`], `3 sqrt(π/2)`.
pub fn optimal_gaussian_sigma() -> f64 {
    3.0 * (PI / 2.0).sqrt()
}

/// `E` of `φ = (πσ²)^(-3/4) exp(-r²/(2σ²))`: `3/(2σ²) - sqrt(2/π)/σ`.
pub fn gaussian_trial_energy(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(1.5 / (sigma * sigma) - (2.0 / PI).sqrt() / sigma)
}

/// A normalized radial state and its energy components.
#[derive(Debug, Clone)]
pub struct PekarState {
    grid: RadialGrid,
    phi: Vec<f64>,
    potential: Vec<f64>,
    kinetic: f64,
    direct: f64,
}

/// JSON summary of a [`PekarState`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PekarSummary {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub mu: f64,
    pub residual: f64,
    pub r_max: f64,
    pub nodes: usize,
}

fn spacing(grid: &RadialGrid) -> Result<f64> {
    grid.spacing()
        .ok_or_else(|| Error::InvalidParameter("the Pekar solver needs a uniform grid".into()))
}

fn check_shape(grid: &RadialGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Shape {
            expected: grid.len(),
            got: values.len(),
        });
    }
    Ok(())
}

/// `4π ∫ f r² dr` as a midpoint sum.
fn radial_integral(grid: &RadialGrid, f: &[f64]) -> f64 {
    let h = grid.cutoff() / grid.len() as f64;
    4.0 * PI * h * grid.nodes().iter().zip(f).map(|(r, v)| r * r * v).sum::<f64>()
}

fn norm_sq(grid: &RadialGrid, phi: &[f64]) -> f64 {
    let sq: Vec<f64> = phi.iter().map(|p| p * p).collect();
    radial_integral(grid, &sq)
}

/// Potential `V = n * 1/|x|` of a radial density by Newton's theorem,
/// `V(r) = 4π [ (1/r) ∫_0^r n s² ds + ∫_r^R n s ds ]`.
pub fn hartree_potential(grid: &RadialGrid, n: &[f64]) -> Result<Vec<f64>> {
    let h = spacing(grid)?;
    check_shape(grid, n)?;
    if let Some(bad) = n.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Precondition(format!("density must be non-negative, found {bad}")));
    }
    let r = grid.nodes();
    let len = r.len();
    // inner charge below each cell, outer ∫ n s ds above it
    let mut inner = vec![0.0; len];
    let mut acc = 0.0;
    for i in 0..len {
        inner[i] = acc;
        acc += h * r[i] * r[i] * n[i];
    }
    let mut outer = vec![0.0; len];
    acc = 0.0;
    for i in (0..len).rev() {
        outer[i] = acc;
        acc += h * r[i] * n[i];
    }
    // the cell containing r itself, for n constant across the cell
    Ok((0..len)
        .map(|i| {
            let own = h * r[i] - h * h / 8.0 + h * h * h / (24.0 * r[i]);
            4.0 * PI * (inner[i] / r[i] + own * n[i] + outer[i])
        })
        .collect())
}

/// `D(n, n) = 4π ∫ V n r² dr`.
pub fn direct_energy(grid: &RadialGrid, n: &[f64]) -> Result<f64> {
    let v = hartree_potential(grid, n)?;
    let vn: Vec<f64> = v.iter().zip(n).map(|(a, b)| a * b).collect();
    Ok(radial_integral(grid, &vn))
}

/// `(-u'')` at the nodes with `u = 0` mirrored at `r = 0` and `r = R`.
fn neg_laplacian_u(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    let inv = 1.0 / (h * h);
    (0..n)
        .map(|i| {
            let left = if i == 0 { -u[0] } else { u[i - 1] };
            let right = if i + 1 == n { -u[n - 1] } else { u[i + 1] };
            (2.0 * u[i] - left - right) * inv
        })
        .collect()
}

/// `∫ |∇φ|² = 4π Σ h u (-u'')` with `u = rφ`.
pub fn kinetic_energy(grid: &RadialGrid, phi: &[f64]) -> Result<f64> {
    let h = spacing(grid)?;
    check_shape(grid, phi)?;
    let u: Vec<f64> = grid.nodes().iter().zip(phi).map(|(r, p)| r * p).collect();
    let lu = neg_laplacian_u(&u, h);
    Ok(4.0 * PI * h * u.iter().zip(&lu).map(|(a, b)| a * b).sum::<f64>())
}

const NORM_TOL: f64 = 1e-10;

impl PekarState {
    /// Fails unless `4π ∫ φ² r² dr = 1` within `1e-10`.
    pub fn new(grid: RadialGrid, phi: Vec<f64>) -> Result<Self> {
        spacing(&grid)?;
        check_shape(&grid, &phi)?;
        let norm = norm_sq(&grid, &phi);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!("state is not normalized: ‖φ‖² = {norm}")));
        }
        let density: Vec<f64> = phi.iter().map(|p| p * p).collect();
        let potential = hartree_potential(&grid, &density)?;
        let vn: Vec<f64> = potential.iter().zip(&density).map(|(a, b)| a * b).collect();
        let direct = radial_integral(&grid, &vn);
        let kinetic = kinetic_energy(&grid, &phi)?;
        Ok(PekarState {
            grid,
            phi,
            potential,
            kinetic,
            direct,
        })
    }

    /// Rescales `phi` to unit norm first.
    pub fn normalized(grid: RadialGrid, mut phi: Vec<f64>) -> Result<Self> {
        check_shape(&grid, &phi)?;
        let norm = norm_sq(&grid, &phi);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Precondition("cannot normalize a vanishing state".into()));
        }
        let s = norm.sqrt().recip();
        phi.iter_mut().for_each(|p| *p *= s);
        Self::new(grid, phi)
    }

    /// The normalized Gaussian of width `sigma` sampled on `grid`.
    pub fn gaussian(grid: RadialGrid, sigma: f64) -> Result<Self> {
        gaussian_trial_energy(sigma)?;
        let phi = grid
            .nodes()
            .iter()
            .map(|r| (-r * r / (2.0 * sigma * sigma)).exp())
            .collect();
        Self::normalized(grid, phi)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// Hartree potential of `φ²`.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn kinetic(&self) -> f64 {
        self.kinetic
    }

    pub fn direct(&self) -> f64 {
        self.direct
    }

    pub fn energy(&self) -> f64 {
        self.kinetic - self.direct
    }

    /// `μ = ⟨φ, (-Δ - 2V) φ⟩ = T - 2D`.
    pub fn mu(&self) -> f64 {
        self.kinetic - 2.0 * self.direct
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.grid, &self.phi)
    }

    fn u(&self) -> Vec<f64> {
        self.grid.nodes().iter().zip(&self.phi).map(|(r, p)| r * p).collect()
    }

    pub fn summary(&self) -> PekarSummary {
        PekarSummary {
            t: self.kinetic,
            d: self.direct,
            e: self.energy(),
            mu: self.mu(),
            residual: el_residual(self),
            r_max: self.grid.cutoff(),
            nodes: self.grid.len(),
        }
    }
}

pub fn cp_components(state: &PekarState) -> (f64, f64) {
    (state.kinetic, state.direct)
}

pub fn cp_energy(state: &PekarState) -> f64 {
    state.energy()
}

/// `‖(-Δ - 2V - μ) φ‖₂`.
pub fn el_residual(state: &PekarState) -> f64 {
    let h = state.grid.cutoff() / state.grid.len() as f64;
    let u = state.u();
    let lu = neg_laplacian_u(&u, h);
    let mu = state.mu();
    let sum: f64 = u
        .iter()
        .zip(&lu)
        .zip(&state.potential)
        .map(|((ui, li), vi)| {
            let r = li - 2.0 * vi * ui - mu * ui;
            r * r
        })
        .sum();
    (4.0 * PI * h * sum).sqrt()
}

/// Solves `(I + dt A) x = rhs` for `A = -d²/dr²` with mirrored ends.
fn solve_shifted_laplacian(rhs: &[f64], h: f64, dt: f64) -> Vec<f64> {
    let n = rhs.len();
    let off = -dt / (h * h);
    let diag = |i: usize| {
        let edge = if i == 0 || i + 1 == n { 3.0 } else { 2.0 };
        1.0 + edge * dt / (h * h)
    };
    // Thomas algorithm; the matrix is symmetric and diagonally dominant.
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag(0);
    c[0] = off / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag(i) - off * c[i - 1];
        c[i] = off / beta;
        d[i] = (rhs[i] - off * d[i - 1]) / beta;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// One imaginary-time step, implicit in the kinetic term:
/// `(1 + dt(-Δ)) φ̃ = φ + dt (2V + μ) φ`, then negative values are clipped
/// and the result renormalized. Fixed points solve the Euler-Lagrange equation.
pub fn imaginary_time_step(state: &PekarState, dt: f64) -> Result<PekarState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let h = state.grid.cutoff() / state.grid.len() as f64;
    let mu = state.mu();
    let rhs: Vec<f64> = state
        .u()
        .iter()
        .zip(&state.potential)
        .map(|(u, v)| u + dt * (2.0 * v + mu) * u)
        .collect();
    let u_new = solve_shifted_laplacian(&rhs, h, dt);
    let phi = u_new
        .iter()
        .zip(state.grid.nodes())
        .map(|(u, r)| (u / r).max(0.0))
        .collect();
    PekarState::normalized(state.grid.clone(), phi)
}

/// Starting point for [`solve_pekar`].
#[derive(Debug, Clone)]
pub enum PekarInit {
    Gaussian(f64),
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, Copy)]
pub struct PekarOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub dt: f64,
}

impl Default for PekarOptions {
    fn default() -> Self {
        PekarOptions {
            tol: 1e-6,
            max_iter: 200_000,
            dt: 1e-2,
        }
    }
}

/// Outcome of [`solve_pekar`].
#[derive(Debug, Clone)]
pub struct PekarSolution {
    pub state: PekarState,
    pub iterations: usize,
    pub rejected_steps: usize,
    pub final_dt: f64,
    pub energy_history_monotone: bool,
}

/// Relative energy rise treated as roundoff rather than an increase.
const ENERGY_SLACK: f64 = 1e-13;
const MIN_DT: f64 = 1e-12;

/// Imaginary-time descent until the Euler-Lagrange residual falls below
/// `tol`. A step that raises the energy is rejected and `dt` halved.
pub fn solve_pekar(grid: RadialGrid, init: PekarInit, opts: &PekarOptions) -> Result<PekarSolution> {
    spacing(&grid)?;
    if grid.cutoff() < MIN_R_MAX {
        return Err(Error::InvalidParameter(format!(
            "box radius {} is below the minimum {MIN_R_MAX}",
            grid.cutoff()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let mut state = match init {
        PekarInit::Gaussian(sigma) => PekarState::gaussian(grid, sigma)?,
        PekarInit::Custom(phi) => {
            if phi.iter().any(|p| !(*p >= 0.0)) {
                return Err(Error::Precondition("initial state must be non-negative".into()));
            }
            PekarState::normalized(grid, phi)?
        }
    };
    let mut dt = opts.dt;
    let mut iterations = 0;
    let mut rejected = 0;
    let mut monotone = true;
    let mut residual = el_residual(&state);
    while residual > opts.tol {
        if iterations >= opts.max_iter {
            return Err(Error::Stagnation(format!(
                "no convergence after {iterations} steps: residual {residual:.3e}, E = {:.9}",
                state.energy()
            )));
        }
        let next = imaginary_time_step(&state, dt)?;
        iterations += 1;
        let e0 = state.energy();
        if next.energy() > e0 + ENERGY_SLACK * e0.abs() {
            rejected += 1;
            dt *= 0.5;
            if dt < MIN_DT {
                return Err(Error::StepTooLarge { dt });
            }
            continue;
        }
        if next.energy() > e0 {
            monotone = false;
        }
        state = next;
        residual = el_residual(&state);
    }
    if state.energy() > gaussian_bound() + 1e-4 {
        return Err(Error::Stagnation(format!(
            "energy {:.9} does not beat the Gaussian bound {:.9}; enlarge the grid",
            state.energy(),
            gaussian_bound()
        )));
    }
    Ok(PekarSolution {
        state,
        iterations,
        rejected_steps: rejected,
        final_dt: dt,
        energy_history_monotone: monotone,
    })
}

/// Uniform Pekar grid helper.
pub fn pekar_grid(r_max: f64, nodes: usize) -> Result<RadialGrid> {
    crate::numerics::make_grid(r_max, nodes, Clustering::Uniform)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialReport {
    /// `|D - 2T| / D`.
    pub virial: f64,
    /// `|E + T| / T`.
    pub energy_vs_kinetic: f64,
    /// Dilation `c` minimizing `c²T - cD`, i.e. `D/(2T)`.
    pub optimal_dilation: f64,
}

pub fn virial(state: &PekarState) -> VirialReport {
    let (t, d) = cp_components(state);
    VirialReport {
        virial: (d - 2.0 * t).abs() / d,
        energy_vs_kinetic: (state.energy() + t).abs() / t,
        optimal_dilation: d / (2.0 * t),
    }
}
