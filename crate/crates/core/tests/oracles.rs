//! Independent reference computations checked against the library.

use std::f64::consts::PI;

use bdf_lab::dispersion::{free_dispersion, scf_step, solve_dispersion, Dispersion, ModelParams};
use bdf_lab::numerics::{make_grid, Clustering, GaussLegendre};
use bdf_lab::pekar::{direct_energy, gaussian_trial_energy, hartree_potential, kinetic_energy, pekar_grid, optimal_gaussian_sigma};
use bdf_lab::polarization::{b_lambda_k, free_b_zero, FreeProfile, Profile};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `(1/3π)[2 asinh Λ - 2τ + τ³/3]` with `τ = Λ/sqrt(1+Λ²)`.
fn free_b_zero_closed(cutoff: f64) -> f64 {
    let t = cutoff / (1.0 + cutoff * cutoff).sqrt();
    (2.0 * cutoff.asinh() - 2.0 * t + t * t * t / 3.0) / (3.0 * PI)
}

/// `∫_a^b f` on panels graded geometrically toward `a` or `b`.
fn graded<F: Fn(f64) -> f64>(a: f64, b: f64, toward_a: bool, f: &F) -> f64 {
    let gl = GaussLegendre::new(24);
    let len = b - a;
    let mut edges = vec![0.0];
    let mut x = 1e-10 * len.max(1.0);
    while x < len {
        edges.push(x);
        x *= 1.6;
    }
    edges.push(len);
    edges
        .windows(2)
        .map(|w| {
            if toward_a {
                gl.integrate(a + w[0], a + w[1], f)
            } else {
                gl.integrate(b - w[1], b - w[0], f)
            }
        })
        .sum()
}

fn through_singularity<F: Fn(f64) -> f64>(p: f64, cutoff: f64, f: F) -> f64 {
    graded(0.0, p, false, &f) + graded(p, cutoff, true, &f)
}

#[test]
fn first_scf_step_matches_graded_quadrature() {
    let params = ModelParams::new(0.05, 1e3).unwrap();
    let grid = make_grid(1e3, 256, Clustering::GeometricNearZero).unwrap();
    let free = free_dispersion(params, grid).unwrap();
    let step = scf_step(&free).unwrap();
    let c = params.alpha() / (4.0 * PI * PI);
    let nodes = free.grid().nodes();
    // The bracket still cancels for s >> p once p is tiny; the origin is
    // covered by the next test.
    for target in [0.05, 0.5, 5.0, 50.0, 500.0] {
        let i = nodes.iter().position(|&x| x >= target).unwrap();
        let p = nodes[i];
        // ln((p+s)/|p-s|) without forming a ratio near one
        let lg = |s: f64| (2.0 * p.min(s) / (p - s).abs()).ln_1p();
        let g0 = 1.0 + c * through_singularity(p, 1e3, |s| 2.0 * PI * s / p * lg(s) / (1.0 + s * s).sqrt());
        let g1 = p + c
            * through_singularity(p, 1e3, |s| {
                let bracket = (p * p + s * s) / (2.0 * p * s) * lg(s) - 1.0;
                2.0 * PI * s / p * bracket * s / (1.0 + s * s).sqrt()
            });
        assert!(rel(step.g0()[i] - 1.0, g0 - 1.0) < 1e-6, "g0 at p = {p}: {} vs {g0}", step.g0()[i]);
        assert!(rel(step.g1()[i] - p, g1 - p) < 1e-6, "g1 at p = {p}: {} vs {g1}", step.g1()[i]);
    }
}

#[test]
fn first_scf_step_near_origin() {
    // g0(0) = 1 + (α/π) asinh Λ and g1'(0) = 1 + (2α/3π) asinh Λ after one step.
    let params = ModelParams::new(0.02, 1e4).unwrap();
    let grid = make_grid(1e4, 512, Clustering::GeometricNearZero).unwrap();
    let step = scf_step(&free_dispersion(params, grid).unwrap()).unwrap();
    let p0 = step.grid().nodes()[0];
    let a = 1e4f64.asinh();
    assert!(rel(step.g0()[0] - 1.0, 0.02 * a / PI) < 1e-3);
    assert!(rel(step.g1()[0] / p0 - 1.0, 2.0 * 0.02 * a / (3.0 * PI)) < 1e-3);
}

#[test]
fn free_b_zero_closed_form() {
    for cutoff in [10.0, 1e2, 1e4, 1e6] {
        let p = ModelParams::new(0.01, cutoff).unwrap();
        let b = free_b_zero(&p).unwrap();
        assert!(rel(b, free_b_zero_closed(cutoff)) < 1e-9, "cutoff {cutoff}: {b}");
    }
}

/// `B(k)` from the raw difference integrand in cylindrical coordinates
/// `(ρ, z)` about the `k` axis.
fn b_cylindrical<P: Profile>(profile: &P, k: f64) -> f64 {
    let cutoff = profile.cutoff();
    let h = 0.5 * k;
    let z_max = cutoff - h;
    let gl = GaussLegendre::new(48);
    let panels = 48;
    let f = |rho: f64, z: f64| {
        let (pz, qz) = (z - h, z + h);
        let pn = rho.hypot(pz);
        let qn = rho.hypot(qz);
        let (g0p, g1p) = profile.g(pn);
        let (g0q, g1q) = profile.g(qn);
        let cos = (rho * rho + pz * qz) / (pn * qn);
        let ep = g0p.hypot(g1p);
        let eq = g0q.hypot(g1q);
        let dot = g0p * g0q + g1p * g1q * cos;
        (ep * eq - dot) / (ep * eq * (ep + eq))
    };
    let mut total = 0.0;
    for j in 0..panels {
        let (za, zb) = (
            -z_max + 2.0 * z_max * j as f64 / panels as f64,
            -z_max + 2.0 * z_max * (j + 1) as f64 / panels as f64,
        );
        total += gl.integrate(za, zb, |z| {
            let rho_max = (cutoff * cutoff - (z.abs() + h).powi(2)).max(0.0).sqrt();
            let split = rho_max.min(2.0);
            gl.integrate(0.0, split, |r| 2.0 * PI * r * f(r, z)) + gl.integrate(split, rho_max, |r| 2.0 * PI * r * f(r, z))
        });
    }
    total / (PI * PI * k * k)
}

#[test]
fn free_b_k_matches_cylindrical_oracle() {
    let profile = FreeProfile { cutoff: 5.0 };
    for k in [0.3, 1.0, 4.0, 9.0] {
        let lib = b_lambda_k(&profile, k).unwrap();
        let oracle = b_cylindrical(&profile, k);
        assert!(rel(lib, oracle) < 1e-6, "k = {k}: {lib} vs {oracle}");
    }
}

#[test]
fn dressed_b_k_matches_cylindrical_oracle() {
    let params = ModelParams::new(0.05, 5.0).unwrap();
    let grid = make_grid(5.0, 256, Clustering::GeometricNearZero).unwrap();
    let d: Dispersion = solve_dispersion(params, grid, 1e-11, 200).unwrap();
    for k in [0.5, 2.0] {
        let lib = b_lambda_k(&d, k).unwrap();
        let oracle = b_cylindrical(&d, k);
        assert!(rel(lib, oracle) < 1e-5, "k = {k}: {lib} vs {oracle}");
    }
}

#[test]
fn free_small_k_approaches_closed_form() {
    let profile = FreeProfile { cutoff: 1e4 };
    let b = b_lambda_k(&profile, 1e-2).unwrap();
    assert!(rel(b, free_b_zero_closed(1e4)) < 0.02);
}

#[test]
fn gaussian_energies() {
    let grid = pekar_grid(40.0, 1024).unwrap();
    let sigma = optimal_gaussian_sigma();
    let norm = (PI * sigma * sigma).powf(-0.75);
    let phi: Vec<f64> = grid.nodes().iter().map(|r| norm * (-r * r / (2.0 * sigma * sigma)).exp()).collect();
    let n: Vec<f64> = phi.iter().map(|p| p * p).collect();
    let t = kinetic_energy(&grid, &phi).unwrap();
    let d = direct_energy(&grid, &n).unwrap();
    assert!(rel(t, 1.5 / (sigma * sigma)) < 1e-4, "T = {t}");
    assert!(rel(d, (2.0 / PI).sqrt() / sigma) < 1e-4, "D = {d}");
    assert!((t - d - gaussian_trial_energy(sigma).unwrap()).abs() < 1e-5);
}

#[test]
fn exponential_density_hartree() {
    // n = e^{-r}/(8π): V = (1 - (1 + r/2) e^{-r})/r and D = 5/16.
    let grid = pekar_grid(60.0, 4096).unwrap();
    let n: Vec<f64> = grid.nodes().iter().map(|r| (-r).exp() / (8.0 * PI)).collect();
    let v = hartree_potential(&grid, &n).unwrap();
    for (r, vi) in grid.nodes().iter().zip(&v) {
        let exact = (1.0 - (1.0 + 0.5 * r) * (-r).exp()) / r;
        assert!((vi - exact).abs() < 1e-5, "r = {r}: {vi} vs {exact}");
    }
    assert!((direct_energy(&grid, &n).unwrap() - 5.0 / 16.0).abs() < 1e-5);
}
