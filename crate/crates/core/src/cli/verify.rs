use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dispersion::{free_dispersion, solve_dispersion_with, Dispersion, ModelParams, ParamsSummary};
use crate::energy::{breakdown_from, identity_defect, EnergyBreakdown, Ingredients, SweepTable};
use crate::error::Result;
use crate::io::write_json;
use crate::numerics::{make_grid, Clustering};
use crate::pekar::{el_residual, gaussian_bound, virial, PekarSolution};
use crate::polarization::{
    b_lambda_k_with, charge_renormalization, continuity_modulus, free_polarization_table_with, linear_response_density,
    pair_bound_samples, polarization_table, screened_density, Integrand, PolarizationTable, B_OVER_LOG_BOUND, K_SWITCH,
};

use super::commands::{k_nodes, run_dispersion, run_pekar, run_polarization, run_sweep};
use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Contents of `verify.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub params: ParamsSummary,
    pub regime_warning: bool,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per check.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            let _ = writeln!(out, "{mark}  {:width$}  {}", c.name, c.detail);
        }
        let failed = self.failed().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn skipped(&mut self, names: &[&str], why: &str) {
        for n in names {
            self.push(n, false, format!("not run: {why}"));
        }
    }
}

const POLARIZATION_CHECKS: [&str; 10] = [
    "polarization.nonnegative",
    "polarization.screening_monotone",
    "polarization.cross_method_dressed",
    "polarization.cross_method_free",
    "polarization.wedge_raw_agreement",
    "polarization.pair_bound",
    "polarization.linear_response",
    "polarization.screened_bound",
    "polarization.continuity",
    "polarization.growth_bound",
];

const ENERGY_CHECKS: [&str; 4] = [
    "energy.identity",
    "energy.sign_structure",
    "energy.binding",
    "energy.lambda_tau_order",
];

/// Runs every invariant suite; failures of one stage mark its dependants as
/// not run instead of aborting.
pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport> {
    let params = cfg.params()?;
    let mut c = Checks(Vec::new());

    let dispersion = run_dispersion(cfg, false);
    match &dispersion {
        Ok(d) => dispersion_checks(&mut c, d),
        Err(e) => c.push("dispersion.converged", false, e.to_string()),
    }

    let tables = match &dispersion {
        Ok(d) => match run_polarization(cfg, d) {
            Ok(t) => {
                polarization_checks(&mut c, cfg, d, &t.0, &t.1)?;
                Some(t)
            }
            Err(e) => {
                c.skipped(&POLARIZATION_CHECKS, &e.to_string());
                None
            }
        },
        Err(_) => {
            c.skipped(&POLARIZATION_CHECKS, "dispersion failed");
            None
        }
    };

    let pekar = run_pekar(cfg);
    match &pekar {
        Ok(sol) => pekar_checks(&mut c, cfg, sol),
        Err(e) => c.push("pekar.converged", false, e.to_string()),
    }

    match (&dispersion, &tables, &pekar) {
        (Ok(d), Some((t, _)), Ok(sol)) => match crate::energy::assemble_prediction(d, t, &sol.state) {
            Ok(e) => energy_checks(&mut c, &e, params.l()),
            Err(err) => c.skipped(&ENERGY_CHECKS, &err.to_string()),
        },
        _ => c.skipped(&ENERGY_CHECKS, "an upstream stage failed"),
    }

    match &pekar {
        Ok(sol) => match run_sweep(cfg, sol.state.energy()) {
            Ok(s) => sweep_checks(&mut c, &s),
            Err(e) => c.push("sweep.rows", false, e.to_string()),
        },
        Err(_) => c.skipped(&["sweep.rows"], "pekar failed"),
    }

    reduction_checks(&mut c, cfg, &params)?;

    let passed = c.0.iter().all(|x| x.passed);
    Ok(VerifyReport {
        params: params.summary(),
        regime_warning: params.regime_warning(),
        passed,
        checks: c.0,
    })
}

/// Runs [`run_verify`] and writes `verify.json`.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(PathBuf, VerifyReport)> {
    let report = run_verify(cfg)?;
    let path = cfg.output.dir.join("verify.json");
    write_json(&path, &report)?;
    Ok((path, report))
}

fn dispersion_checks(c: &mut Checks, d: &Dispersion) {
    let rep = d.report();
    c.push(
        "dispersion.converged",
        rep.converged,
        format!("{} iterations, residual {:.3e}", rep.iterations, rep.final_residual),
    );
    let ic = d.iterate_checks();
    c.push(
        "dispersion.ordering_all_iterates",
        ic.ordering_violations == 0 && ic.g0_below_one == 0,
        format!(
            "{} iterates, {} violate p <= g1 <= p g0, {} have g0 < 1",
            ic.iterates_checked, ic.ordering_violations, ic.g0_below_one
        ),
    );
    match crate::dispersion::check_asymptotics(d) {
        Ok(a) => {
            for e in &a.entries {
                c.push(
                    &format!("dispersion.{}", e.name),
                    e.within_budget,
                    format!(
                        "measured {:.9}, reference {:.9}, deviation {:.3e}",
                        e.measured, e.reference, e.relative_deviation
                    ),
                );
            }
        }
        Err(e) => c.push("dispersion.asymptotics", false, e.to_string()),
    }
}

fn polarization_checks(
    c: &mut Checks,
    cfg: &RunConfig,
    d: &Dispersion,
    dressed: &PolarizationTable,
    free: &PolarizationTable,
) -> Result<()> {
    let tables = [dressed, free];
    let nonneg = tables
        .iter()
        .all(|t| t.big_b.iter().all(|&b| b >= 0.0) && t.b.iter().all(|&b| (0.0..1.0).contains(&b)));
    let min_b = tables
        .iter()
        .flat_map(|t| t.big_b.iter())
        .copied()
        .fold(f64::INFINITY, f64::min);
    c.push(
        "polarization.nonnegative",
        nonneg,
        format!("min B = {min_b:.6e}; b in [0, 1) at every node"),
    );

    let monotone = tables.iter().all(|t| {
        let mut pairs: Vec<(f64, f64)> = t.big_b.iter().copied().zip(t.b.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.windows(2).all(|w| w[1].1 >= w[0].1)
    });
    c.push("polarization.screening_monotone", monotone, "b non-decreasing in B");

    for (name, t) in [
        ("polarization.cross_method_dressed", dressed),
        ("polarization.cross_method_free", free),
    ] {
        match t.k_nodes.iter().position(|&k| k >= K_SWITCH) {
            Some(i) => {
                let rel = (t.integral[i] - t.b0_at_zero).abs() / t.b0_at_zero;
                c.push(
                    name,
                    rel <= 0.02,
                    format!(
                        "B({:.3e}) = {:.9}, radial B(0) = {:.9}, deviation {rel:.3e}",
                        t.k_nodes[i], t.integral[i], t.b0_at_zero
                    ),
                );
            }
            None => c.push(name, false, "no node above the small-k switch"),
        }
    }

    let mut worst = 0.0f64;
    for k in [1.0, 10.0] {
        if k <= 2.0 * d.params().cutoff() {
            let w = b_lambda_k_with(d, k, cfg.resolution(), Integrand::Wedge)?;
            let r = b_lambda_k_with(d, k, cfg.resolution(), Integrand::Raw)?;
            worst = worst.max(((w - r) / w).abs());
        }
    }
    c.push(
        "polarization.wedge_raw_agreement",
        worst <= 1e-8,
        format!("max relative difference {worst:.3e} at k in {{1, 10}}"),
    );

    let pairs = pair_bound_samples(d, cfg.polarization.pair_samples, cfg.output.seed);
    c.push(
        "polarization.pair_bound",
        pairs.violations == 0,
        format!(
            "{} samples, {} violations, max factor/bound {:.3e}",
            pairs.samples, pairs.violations, pairs.max_ratio
        ),
    );

    let ks = &dressed.k_nodes;
    let r1: Vec<f64> = ks.iter().map(|k| (-k * k).exp()).collect();
    let r2: Vec<f64> = ks.iter().map(|k| 1.0 / (1.0 + k * k)).collect();
    let mix: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| 3.0 * a - 0.25 * b).collect();
    let a = linear_response_density(dressed, &r1)?;
    let b = linear_response_density(dressed, &r2)?;
    let m = linear_response_density(dressed, &mix)?;
    let lin = (0..ks.len())
        .map(|i| (m[i] - (3.0 * a[i] - 0.25 * b[i])).abs() / (1.0 + m[i].abs()))
        .fold(0.0, f64::max);
    let signed = a.iter().chain(&b).all(|&v| v <= 0.0);
    c.push(
        "polarization.linear_response",
        lin <= 1e-14 && signed,
        format!("linearity defect {lin:.3e}; response to positive densities non-positive: {signed}"),
    );

    let s = screened_density(dressed, &r1)?;
    let alpha = dressed.alpha();
    let bounded = (0..ks.len()).all(|i| s[i].abs() <= alpha * dressed.big_b[i] * r1[i] * (1.0 + 1e-15));
    c.push("polarization.screened_bound", bounded, "|b n| <= alpha B n at every node");

    let cont = continuity_modulus(dressed);
    c.push(
        "polarization.continuity",
        cont.within_bound,
        format!("max ratio {:.3e}, bound {:.3e}", cont.max_ratio, cont.bound),
    );

    let cutoff = dressed.cutoff();
    let growth = dressed.big_b.iter().copied().fold(0.0, f64::max) / cutoff.ln();
    if alpha <= 0.02 {
        c.push(
            "polarization.growth_bound",
            growth <= B_OVER_LOG_BOUND,
            format!("max B / ln cutoff = {growth:.4}, bound {B_OVER_LOG_BOUND}"),
        );
    } else {
        c.push(
            "polarization.growth_bound",
            true,
            format!("max B / ln cutoff = {growth:.4}; bound applies for alpha <= 0.02 only"),
        );
    }
    Ok(())
}

fn pekar_checks(c: &mut Checks, cfg: &RunConfig, sol: &PekarSolution) {
    let st = &sol.state;
    c.push(
        "pekar.converged",
        true,
        format!("{} steps, {} rejected, final dt {:.3e}", sol.iterations, sol.rejected_steps, sol.final_dt),
    );
    let e = st.energy();
    c.push(
        "pekar.beats_gaussian",
        e < gaussian_bound(),
        format!("E = {e:.9}, Gaussian bound {:.9}", gaussian_bound()),
    );
    let v = virial(st);
    c.push(
        "pekar.virial",
        v.virial <= 1e-3 && v.energy_vs_kinetic <= 1e-3,
        format!("|D-2T|/D = {:.3e}, |E+T|/T = {:.3e}", v.virial, v.energy_vs_kinetic),
    );
    let res = el_residual(st);
    c.push(
        "pekar.el_residual",
        res <= cfg.pekar.tol,
        format!("residual {res:.3e}, tolerance {:.1e}", cfg.pekar.tol),
    );
    let norm = st.norm_sq();
    c.push(
        "pekar.normalized_nonnegative",
        (norm - 1.0).abs() <= 1e-10 && st.phi().iter().all(|&p| p >= 0.0),
        format!("norm - 1 = {:.3e}", norm - 1.0),
    );
    c.push(
        "pekar.energy_monotone",
        sol.energy_history_monotone,
        "energy non-increasing along accepted steps",
    );
}

fn energy_checks(c: &mut Checks, e: &EnergyBreakdown, l: f64) {
    let defect = identity_defect(e);
    c.push(
        "energy.identity",
        defect <= 1e-12,
        format!("relative defect {defect:.3e}"),
    );
    let signs = if e.tau > 0.0 {
        e.vacuum_corr > 0.0 && e.direct_corr < 0.0 && e.vacuum_corr + e.direct_corr < 0.0
    } else {
        e.vacuum_corr == 0.0 && e.direct_corr == 0.0
    };
    c.push(
        "energy.sign_structure",
        signs,
        format!("vacuum {:.6e}, direct {:.6e}", e.vacuum_corr, e.direct_corr),
    );
    let binding = e.e_cp >= 0.0 || e.total_pred < e.m || e.tau == 0.0;
    c.push(
        "energy.binding",
        binding,
        format!("m = {:.12}, predicted {:.12}", e.m, e.total_pred),
    );
    if e.tau > 0.0 && l <= 0.2 {
        let ratio = e.lambda_inv / e.tau;
        c.push(
            "energy.lambda_tau_order",
            (0.5..=2.0).contains(&ratio),
            format!("lambda_inv / tau = {ratio:.6}"),
        );
    } else {
        c.push("energy.lambda_tau_order", true, "not applicable outside L <= 0.2 with screening");
    }
}

fn sweep_checks(c: &mut Checks, s: &SweepTable) {
    let binding = s.rows.iter().all(|r| s.e_cp >= 0.0 || r.e_pred < r.m);
    // E_pred - m is tiny next to m, so the identity can only hold up to the
    // rounding of that difference, amplified by C0².
    let normalized = s
        .rows
        .iter()
        .map(|r| {
            let defect = (r.c0_sq * (r.e_pred - r.m) - s.e_cp).abs();
            let rounding = 8.0 * f64::EPSILON * r.m.abs() * r.c0_sq;
            defect / (rounding + 1e-12 * s.e_cp.abs())
        })
        .fold(0.0, f64::max);
    let mass = s
        .rows
        .iter()
        .map(|r| ((r.m - 1.0) * std::f64::consts::PI / s.l - 1.0).abs())
        .fold(0.0, f64::max);
    c.push(
        "sweep.rows",
        !s.rows.is_empty(),
        format!("{} rows, {} skipped above the cutoff cap", s.rows.len(), s.skipped.len()),
    );
    c.push("sweep.binding", binding, "E_pred < m on every row");
    c.push(
        "sweep.normalized_binding",
        normalized <= 1.0,
        format!("max |C0^2 (E_pred - m) - E_CP| in units of its rounding bound = {normalized:.3e}"),
    );
    c.push(
        "sweep.mass_asymptotic",
        mass <= 0.4,
        format!("max |(m-1) pi/L - 1| = {mass:.3e}"),
    );
}

fn reduction_checks(c: &mut Checks, cfg: &RunConfig, params: &ModelParams) -> Result<()> {
    let free_params = ModelParams::new(0.0, params.cutoff())?;
    let grid = make_grid(params.cutoff(), cfg.dispersion.nodes, Clustering::GeometricNearZero)?;
    let free = free_dispersion(free_params, grid.clone())?;
    let solved = solve_dispersion_with(free_params, grid, &cfg.dispersion_options())?;
    c.push(
        "reductions.dispersion",
        solved.report().iterations == 1 && solved.g0() == free.g0() && solved.g1() == free.g1(),
        format!("{} iteration(s) at alpha = 0", solved.report().iterations),
    );

    let mut ks = k_nodes(cfg)?;
    ks = ks.into_iter().step_by(8).collect();
    let dressed0 = polarization_table(&free, &ks, cfg.resolution())?;
    let free0 = free_polarization_table_with(&free_params, &ks, cfg.resolution())?;
    let same = dressed0.big_b == free0.big_b && dressed0.b.iter().all(|&b| b == 0.0);
    c.push(
        "reductions.polarization",
        same,
        format!("{} nodes: dressed table equals free table, b = 0", ks.len()),
    );

    let (z3, alpha_phys) = charge_renormalization(&free_params)?;
    let screened = screened_density(&dressed0, &vec![1.0; ks.len()])?;
    c.push(
        "reductions.screening",
        z3 == 1.0 && alpha_phys == 0.0 && screened.iter().all(|&v| v == 0.0),
        format!("Z3 = {z3}, screened density vanishes"),
    );

    let ing = Ingredients {
        alpha: 0.0,
        m: crate::dispersion::m_alpha(&free),
        g1_prime_zero: crate::dispersion::g1_prime_zero(&free)?,
        b_zero: 0.0,
    };
    let e = breakdown_from(&ing, 0.1, 0.2);
    c.push(
        "reductions.prediction",
        e.m == 1.0 && e.total_pred == 1.0 && e.kinetic_corr == 0.0 && e.vacuum_corr == 0.0 && e.direct_corr == 0.0,
        format!("m = {}, predicted {}", e.m, e.total_pred),
    );
    Ok(())
}
