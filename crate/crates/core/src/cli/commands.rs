use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersion::{
    check_asymptotics, solve_dispersion_with, AsymptoticsReport, Dispersion, IterateChecks, ParamsSummary,
};
use crate::energy::{assemble_prediction, regime_sweep, with_free_variant, EnergyBreakdown, SweepOptions, SweepRow, SweepTable};
use crate::error::{Error, Result};
use crate::io::{write_csv, write_json};
use crate::numerics::{make_grid, Clustering, FixedPointReport};
use crate::pekar::{optimal_gaussian_sigma, pekar_grid, solve_pekar, PekarInit, PekarSolution, PekarSummary};
use crate::polarization::{
    free_polarization_table_with, k_grid, polarization_table, PolarizationTable,
};

use super::config::RunConfig;

/// Contents of `asymptotics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRecord {
    pub params: ParamsSummary,
    pub fixed_point: FixedPointReport,
    pub iterate_checks: IterateChecks,
    /// Absent when the iteration did not converge.
    pub asymptotics: Option<AsymptoticsReport>,
}

/// Contents of `polarization.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationHeader {
    pub params: ParamsSummary,
    pub dispersion_kind: crate::polarization::DispersionKind,
    #[serde(rename = "B0_at_zero")]
    pub b0_at_zero: f64,
    #[serde(rename = "B0_free_at_zero")]
    pub b0_free_at_zero: f64,
    /// `1 / (1 + α B⁰(0))` from the free polarization.
    #[serde(rename = "Z3_free")]
    pub z3_free: f64,
    /// `1 / (1 + α B(0))` from the dressed polarization.
    #[serde(rename = "Z3_dressed")]
    pub z3_dressed: f64,
    pub alpha_phys: f64,
}

/// Results of the three solver stages for one configuration.
pub struct Pipeline {
    pub dispersion: Dispersion,
    pub table: PolarizationTable,
    pub free_table: PolarizationTable,
    pub pekar: PekarSolution,
    pub energy: EnergyBreakdown,
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output.dir.join(name)
}

/// Solves the dispersion; on failure the fixed-point report is still
/// written to `asymptotics.json` when `write` is set.
pub fn run_dispersion(cfg: &RunConfig, write: bool) -> Result<Dispersion> {
    let params = cfg.params()?;
    let grid = make_grid(params.cutoff(), cfg.dispersion.nodes, Clustering::GeometricNearZero)
        .map_err(|e| e.in_stage("dispersion"))?;
    match solve_dispersion_with(params, grid, &cfg.dispersion_options()) {
        Ok(d) => Ok(d),
        Err(Error::NoConvergence { report }) => {
            if write {
                let rec = DispersionRecord {
                    params: params.summary(),
                    fixed_point: report.clone(),
                    iterate_checks: IterateChecks::default(),
                    asymptotics: None,
                };
                write_json(&out_path(cfg, "asymptotics.json"), &rec)?;
            }
            Err(Error::NoConvergence { report }.in_stage("dispersion"))
        }
        Err(e) => Err(e.in_stage("dispersion")),
    }
}

pub fn k_nodes(cfg: &RunConfig) -> Result<Vec<f64>> {
    let params = cfg.params()?;
    k_grid(params.cutoff(), cfg.polarization.k_nodes, cfg.polarization.k_min).map_err(|e| Error::Config(e.to_string()))
}

/// Dressed and free tables on the configured momenta.
pub fn run_polarization(cfg: &RunConfig, d: &Dispersion) -> Result<(PolarizationTable, PolarizationTable)> {
    let ks = k_nodes(cfg)?;
    let res = cfg.resolution();
    let dressed = polarization_table(d, &ks, res).map_err(|e| e.in_stage("polarization"))?;
    let free = free_polarization_table_with(d.params(), &ks, res).map_err(|e| e.in_stage("polarization"))?;
    Ok((dressed, free))
}

pub fn run_pekar(cfg: &RunConfig) -> Result<PekarSolution> {
    let grid = pekar_grid(cfg.pekar.r_max, cfg.pekar.nodes).map_err(|e| e.in_stage("pekar"))?;
    solve_pekar(grid, PekarInit::Gaussian(optimal_gaussian_sigma()), &cfg.pekar_options()).map_err(|e| e.in_stage("pekar"))
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<Pipeline> {
    let dispersion = run_dispersion(cfg, false)?;
    let (table, free_table) = run_polarization(cfg, &dispersion)?;
    let pekar = run_pekar(cfg)?;
    let energy = assemble_prediction(&dispersion, &table, &pekar.state).map_err(|e| e.in_stage("predict"))?;
    let energy = with_free_variant(energy, table.alpha(), free_table.b0_at_zero).map_err(|e| e.in_stage("predict"))?;
    Ok(Pipeline {
        dispersion,
        table,
        free_table,
        pekar,
        energy,
    })
}

pub fn dispersion_record(d: &Dispersion) -> Result<DispersionRecord> {
    Ok(DispersionRecord {
        params: d.params().summary(),
        fixed_point: d.report().clone(),
        iterate_checks: *d.iterate_checks(),
        asymptotics: Some(check_asymptotics(d)?),
    })
}

pub fn write_dispersion(dir: &Path, d: &Dispersion) -> Result<Vec<PathBuf>> {
    let csv = dir.join("dispersion.csv");
    let e = d.e_tilde_samples();
    let rows = (0..d.g0().len()).map(|i| [d.grid().nodes()[i], d.g0()[i], d.g1()[i], e[i]]);
    write_csv(&csv, &["p", "g0", "g1", "e_tilde"], rows)?;
    let json = dir.join("asymptotics.json");
    write_json(&json, &dispersion_record(d)?)?;
    Ok(vec![csv, json])
}

pub fn polarization_header(table: &PolarizationTable, free: &PolarizationTable) -> PolarizationHeader {
    let alpha = table.alpha();
    let z3_free = 1.0 / (1.0 + alpha * free.b0_at_zero);
    PolarizationHeader {
        params: table.params,
        dispersion_kind: table.dispersion_kind,
        b0_at_zero: table.b0_at_zero,
        b0_free_at_zero: free.b0_at_zero,
        z3_free,
        z3_dressed: 1.0 / (1.0 + alpha * table.b0_at_zero),
        alpha_phys: alpha * z3_free,
    }
}

fn table_rows(t: &PolarizationTable) -> impl Iterator<Item = [f64; 3]> + '_ {
    (0..t.k_nodes.len()).map(|i| [t.k_nodes[i], t.big_b[i], t.b[i]])
}

pub fn write_polarization(dir: &Path, table: &PolarizationTable, free: &PolarizationTable) -> Result<Vec<PathBuf>> {
    let csv = dir.join("polarization.csv");
    write_csv(&csv, &["k", "B", "b"], table_rows(table))?;
    let free_csv = dir.join("polarization_free.csv");
    write_csv(&free_csv, &["k", "B", "b"], table_rows(free))?;
    let json = dir.join("polarization.json");
    write_json(&json, &polarization_header(table, free))?;
    Ok(vec![csv, free_csv, json])
}

pub fn write_pekar(dir: &Path, sol: &PekarSolution) -> Result<Vec<PathBuf>> {
    let st = &sol.state;
    let csv = dir.join("pekar.csv");
    let rows = (0..st.phi().len()).map(|i| [st.grid().nodes()[i], st.phi()[i], st.potential()[i]]);
    write_csv(&csv, &["r", "phi", "V"], rows)?;
    let json = dir.join("pekar_summary.json");
    let summary: PekarSummary = st.summary();
    write_json(&json, &summary)?;
    Ok(vec![csv, json])
}

pub fn write_sweep(dir: &Path, sweep: &SweepTable) -> Result<Vec<PathBuf>> {
    let csv = dir.join("sweep.csv");
    write_csv(&csv, &SweepRow::HEADER, sweep.rows.iter().map(SweepRow::values))?;
    let json = dir.join("sweep.json");
    write_json(&json, sweep)?;
    Ok(vec![csv, json])
}

/// `dispersion.csv` and `asymptotics.json`.
pub fn cmd_dispersion(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let d = run_dispersion(cfg, true)?;
    write_dispersion(&cfg.output.dir, &d)
}

/// `polarization.csv`, `polarization_free.csv` and `polarization.json`.
pub fn cmd_polarization(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let d = run_dispersion(cfg, false)?;
    let (table, free) = run_polarization(cfg, &d)?;
    write_polarization(&cfg.output.dir, &table, &free)
}

/// `pekar.csv` and `pekar_summary.json`.
pub fn cmd_pekar(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let sol = run_pekar(cfg)?;
    write_pekar(&cfg.output.dir, &sol)
}

/// Runs every stage and writes their files plus `prediction.json`.
pub fn cmd_predict(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let p = run_pipeline(cfg)?;
    let dir = &cfg.output.dir;
    let mut files = write_dispersion(dir, &p.dispersion)?;
    files.extend(write_polarization(dir, &p.table, &p.free_table)?);
    files.extend(write_pekar(dir, &p.pekar)?);
    let json = dir.join("prediction.json");
    write_json(&json, &p.energy)?;
    files.push(json);
    Ok(files)
}

pub fn run_sweep(cfg: &RunConfig, e_cp: f64) -> Result<SweepTable> {
    let opts = SweepOptions {
        nodes: cfg.dispersion.nodes,
        dispersion: cfg.dispersion_options(),
    };
    regime_sweep(&cfg.sweep.alphas, cfg.sweep.l, e_cp, &opts).map_err(|e| e.in_stage("sweep"))
}

/// `sweep.csv` and `sweep.json`; rows whose cutoff exceeds the cap are
/// listed in `skipped`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<(Vec<PathBuf>, SweepTable)> {
    let sol = run_pekar(cfg)?;
    let sweep = run_sweep(cfg, sol.state.energy())?;
    Ok((write_sweep(&cfg.output.dir, &sweep)?, sweep))
}
