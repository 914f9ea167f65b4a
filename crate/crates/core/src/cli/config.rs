use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionOptions, ModelParams};
use crate::error::{Error, Result};
use crate::pekar::PekarOptions;
use crate::polarization::Resolution;

/// Full run configuration, read from TOML with one table per stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub dispersion: DispersionSection,
    pub polarization: PolarizationSection,
    pub pekar: PekarSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
}

/// Cutoff used when neither `model.cutoff` nor `model.L` is given.
pub const DEFAULT_CUTOFF: f64 = 1e4;

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            alpha: 0.01,
            cutoff: None,
            l: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionSection {
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for DispersionSection {
    fn default() -> Self {
        DispersionSection {
            nodes: 512,
            tol: 1e-9,
            max_iter: 200,
            damping: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolarizationSection {
    pub k_nodes: usize,
    pub k_min: f64,
    pub u_order: usize,
    pub c_order: usize,
    /// Random `(p, q)` pairs for the pointwise integrand bound.
    pub pair_samples: usize,
}

impl Default for PolarizationSection {
    fn default() -> Self {
        PolarizationSection {
            k_nodes: 128,
            k_min: 1e-4,
            u_order: 16,
            c_order: 64,
            pair_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PekarSection {
    pub nodes: usize,
    pub r_max: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub dt: f64,
}

impl Default for PekarSection {
    fn default() -> Self {
        PekarSection {
            nodes: 1024,
            r_max: 40.0,
            tol: 1e-6,
            max_iter: 200_000,
            dt: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub alphas: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            alphas: vec![0.02, 0.01, 0.005],
            l: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub seed: u64,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            seed: 20240601,
        }
    }
}

fn parse_override(item: &str) -> Result<(Vec<String>, toml::Value)> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{item}` is not KEY=VALUE")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(Error::Config(format!("override key `{key}` is malformed")));
    }
    let raw = raw.trim();
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or(toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    };
    Ok((path, value))
}

fn apply_override(table: &mut toml::Table, path: &[String], value: toml::Value) -> Result<()> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{p}` is not a section")))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

impl RunConfig {
    /// Parses TOML text and applies `section.key=value` overrides.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            let (path, value) = parse_override(item)?;
            apply_override(&mut table, &path, value)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` if given (a missing file is a configuration error),
    /// otherwise starts from the defaults.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let text = match path {
            Some(p) => fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> Result<String> {
        self.validate()?;
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if m.cutoff.is_some() && m.l.is_some() {
            return Err(Error::Config("give at most one of model.cutoff and model.L".into()));
        }
        self.params()?;
        let counts = [
            ("dispersion.nodes", self.dispersion.nodes),
            ("polarization.k_nodes", self.polarization.k_nodes),
            ("polarization.u_order", self.polarization.u_order),
            ("polarization.c_order", self.polarization.c_order),
            ("pekar.nodes", self.pekar.nodes),
        ];
        for (name, n) in counts {
            if n < 8 {
                return Err(Error::Config(format!("{name} must be at least 8, got {n}")));
            }
        }
        let positive = [
            ("dispersion.tol", self.dispersion.tol),
            ("polarization.k_min", self.polarization.k_min),
            ("pekar.tol", self.pekar.tol),
            ("pekar.dt", self.pekar.dt),
            ("pekar.r_max", self.pekar.r_max),
            ("sweep.L", self.sweep.l),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.dispersion.damping > 0.0 && self.dispersion.damping <= 1.0) {
            return Err(Error::Config(format!(
                "dispersion.damping must lie in (0, 1], got {}",
                self.dispersion.damping
            )));
        }
        if self.dispersion.max_iter == 0 || self.pekar.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        // TOML integers are signed 64-bit
        if self.output.seed > i64::MAX as u64 {
            return Err(Error::Config(format!("output.seed must be at most {}", i64::MAX)));
        }
        if self.sweep.alphas.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Config("sweep.alphas must be positive".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        let m = &self.model;
        let p = match (m.cutoff, m.l) {
            (Some(c), _) => ModelParams::new(m.alpha, c),
            (None, Some(l)) => ModelParams::from_l(m.alpha, l),
            (None, None) => ModelParams::new(m.alpha, DEFAULT_CUTOFF),
        };
        p.map_err(|e| Error::Config(e.to_string()))
    }

    pub fn dispersion_options(&self) -> DispersionOptions {
        DispersionOptions {
            tol: self.dispersion.tol,
            max_iter: self.dispersion.max_iter,
            damping: self.dispersion.damping,
        }
    }

    pub fn resolution(&self) -> Resolution {
        Resolution {
            u_order: self.polarization.u_order,
            c_order: self.polarization.c_order,
        }
    }

    pub fn pekar_options(&self) -> PekarOptions {
        PekarOptions {
            tol: self.pekar.tol,
            max_iter: self.pekar.max_iter,
            dt: self.pekar.dt,
        }
    }

    /// Every grid doubled: momentum nodes, k nodes, quadrature orders and
    /// direct-space nodes.
    pub fn refined(&self) -> RunConfig {
        let mut c = self.clone();
        c.dispersion.nodes *= 2;
        c.polarization.k_nodes *= 2;
        c.polarization.u_order *= 2;
        c.polarization.c_order *= 2;
        c.pekar.nodes *= 2;
        c
    }
}
