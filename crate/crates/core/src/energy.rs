//! Leading-order ground-state energy of one electron in the dressed vacuum:
//! the binding scale `λ`, the constant `C0²`, the three corrections that sum
//! to `C0⁻² E_CP`, and a sweep over couplings at fixed `L = α ln Λ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{g1_prime_zero, m_alpha, solve_dispersion_with, Dispersion, DispersionOptions, ModelParams};
use crate::error::{Error, Result};
use crate::numerics::{make_grid, Clustering};
use crate::pekar::PekarState;
use crate::polarization::{b_lambda_zero_radial, b_screening, PolarizationTable};

/// Fraction of `α b(0)/λ` reported as the exchange budget.
pub const EXCHANGE_FRACTION: f64 = 0.1;

/// Largest cutoff a sweep row may use.
pub const SWEEP_CUTOFF_CAP: f64 = 1e8;

/// Scalars from the dispersion and polarization stages that the energy
/// formulas depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ingredients {
    pub alpha: f64,
    pub m: f64,
    pub g1_prime_zero: f64,
    /// Screening at zero momentum.
    pub b_zero: f64,
}

impl Ingredients {
    /// `τ = α b(0)`.
    pub fn tau(&self) -> f64 {
        self.alpha * self.b_zero
    }

    /// `λ⁻¹ = α b(0) m / g1'(0)²`.
    pub fn lambda_inv(&self) -> f64 {
        self.tau() * self.m / (self.g1_prime_zero * self.g1_prime_zero)
    }

    /// `C0⁻² = (α b(0))² m / (2 g1'(0)²)`.
    pub fn c0_inv_sq(&self) -> f64 {
        let tau = self.tau();
        tau * tau * self.m / (2.0 * self.g1_prime_zero * self.g1_prime_zero)
    }

    /// `C0²`; infinite when `α b(0) = 0`.
    pub fn c0_sq(&self) -> f64 {
        1.0 / self.c0_inv_sq()
    }

    /// `m + C0⁻² E_CP`.
    pub fn predicted(&self, e_cp: f64) -> f64 {
        self.m + self.c0_inv_sq() * e_cp
    }
}

fn same_params(d: &Dispersion, t: &PolarizationTable) -> Result<()> {
    let p = d.params();
    if p.alpha() != t.params.alpha || p.cutoff() != t.params.cutoff {
        return Err(Error::InvalidParameter(format!(
            "dispersion (α = {}, Λ = {}) and polarization (α = {}, Λ = {}) disagree",
            p.alpha(),
            p.cutoff(),
            t.params.alpha,
            t.params.cutoff
        )));
    }
    Ok(())
}

/// Ingredients with `b(0)` from the table's radial `B(0)`.
pub fn ingredients(d: &Dispersion, t: &PolarizationTable) -> Result<Ingredients> {
    same_params(d, t)?;
    Ok(Ingredients {
        alpha: d.params().alpha(),
        m: m_alpha(d),
        g1_prime_zero: g1_prime_zero(d)?,
        b_zero: t.b_at_zero(),
    })
}

pub fn scaling_lambda(d: &Dispersion, t: &PolarizationTable) -> Result<f64> {
    Ok(ingredients(d, t)?.lambda_inv())
}

pub fn c0_squared(d: &Dispersion, t: &PolarizationTable) -> Result<f64> {
    Ok(ingredients(d, t)?.c0_sq())
}

pub fn predicted_ground_energy(d: &Dispersion, t: &PolarizationTable, e_cp: f64) -> Result<f64> {
    Ok(ingredients(d, t)?.predicted(e_cp))
}

/// The energy components of a trial state built from the Pekar minimizer
/// scaled to length `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub m: f64,
    pub g1_prime_zero: f64,
    pub b_zero: f64,
    pub tau: f64,
    pub lambda_inv: f64,
    /// `C0²`; `null` in JSON when infinite (no screening).
    #[serde(rename = "C0_sq", with = "finite_or_null")]
    pub c0_sq: f64,
    #[serde(rename = "C0_inv_sq")]
    pub c0_inv_sq: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub e_cp: f64,
    /// `g1'(0)² T / (2 λ² m)`.
    pub kinetic_corr: f64,
    /// `α (b - b²) D / (2λ)`.
    pub vacuum_corr: f64,
    /// `-α (2b - b²) D / (2λ)`.
    pub direct_corr: f64,
    /// `EXCHANGE_FRACTION · α b(0) / λ`; a budget, not part of the total.
    pub exchange_bound: f64,
    /// `m + C0⁻² E_CP`.
    pub total_pred: f64,
    /// `m - total_pred`.
    pub binding: f64,
    /// Set when `E_CP >= 0`, in which case no binding is predicted.
    pub no_binding_warning: bool,
    /// The same prediction with `b(0)` from the free polarization.
    pub free_variant: Option<FreeVariant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeVariant {
    pub b_zero: f64,
    pub lambda_inv: f64,
    #[serde(rename = "C0_sq", with = "finite_or_null")]
    pub c0_sq: f64,
    pub total_pred: f64,
}

mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            v.serialize(s)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Components from scalar ingredients and the Pekar `(T, D)`.
pub fn breakdown_from(ing: &Ingredients, t: f64, d: f64) -> EnergyBreakdown {
    let b = ing.b_zero;
    let lambda_inv = ing.lambda_inv();
    let c0_inv_sq = ing.c0_inv_sq();
    let e_cp = t - d;
    let total = ing.predicted(e_cp);
    let g2 = ing.g1_prime_zero * ing.g1_prime_zero;
    EnergyBreakdown {
        m: ing.m,
        g1_prime_zero: ing.g1_prime_zero,
        b_zero: b,
        tau: ing.tau(),
        lambda_inv,
        c0_sq: ing.c0_sq(),
        c0_inv_sq,
        t,
        d,
        e_cp,
        kinetic_corr: g2 * t * lambda_inv * lambda_inv / (2.0 * ing.m),
        vacuum_corr: ing.alpha * (b - b * b) * d * lambda_inv / 2.0,
        direct_corr: -ing.alpha * (2.0 * b - b * b) * d * lambda_inv / 2.0,
        exchange_bound: EXCHANGE_FRACTION * ing.tau() * lambda_inv,
        total_pred: total,
        binding: ing.m - total,
        no_binding_warning: e_cp >= 0.0,
        free_variant: None,
    }
}

/// Assembles the breakdown from the three solved stages.
pub fn assemble_prediction(d: &Dispersion, t: &PolarizationTable, p: &PekarState) -> Result<EnergyBreakdown> {
    let ing = ingredients(d, t)?;
    Ok(breakdown_from(&ing, p.kinetic(), p.direct()))
}

/// Adds the prediction that uses the free `B⁰(0)` in place of the dressed one.
pub fn with_free_variant(mut e: EnergyBreakdown, alpha: f64, free_b_zero: f64) -> Result<EnergyBreakdown> {
    let ing = Ingredients {
        alpha,
        m: e.m,
        g1_prime_zero: e.g1_prime_zero,
        b_zero: b_screening(free_b_zero, alpha)?,
    };
    e.free_variant = Some(FreeVariant {
        b_zero: ing.b_zero,
        lambda_inv: ing.lambda_inv(),
        c0_sq: ing.c0_sq(),
        total_pred: ing.predicted(e.e_cp),
    });
    Ok(e)
}

/// Sum of the three corrections minus `C0⁻² (T - D)`, relative to the latter.
pub fn identity_defect(e: &EnergyBreakdown) -> f64 {
    let target = e.c0_inv_sq * (e.t - e.d);
    let sum = e.kinetic_corr + e.vacuum_corr + e.direct_corr;
    if target == 0.0 {
        sum.abs()
    } else {
        ((sum - target) / target).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub cutoff: f64,
    pub m: f64,
    pub b0: f64,
    pub g1p0: f64,
    pub lambda_inv: f64,
    #[serde(with = "finite_or_null")]
    pub c0_sq: f64,
    pub e_pred: f64,
    pub binding: f64,
}

impl SweepRow {
    pub const HEADER: [&'static str; 9] =
        ["alpha", "cutoff", "m", "b0", "g1p0", "lambda_inv", "C0_sq", "E_pred", "binding"];

    pub fn values(&self) -> [f64; 9] {
        [
            self.alpha,
            self.cutoff,
            self.m,
            self.b0,
            self.g1p0,
            self.lambda_inv,
            self.c0_sq,
            self.e_pred,
            self.binding,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    #[serde(rename = "L")]
    pub l: f64,
    pub e_cp: f64,
    pub rows: Vec<SweepRow>,
    /// `(α, Λ)` pairs dropped because `Λ` exceeds [`SWEEP_CUTOFF_CAP`].
    pub skipped: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub nodes: usize,
    pub dispersion: DispersionOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            nodes: 512,
            dispersion: DispersionOptions::default(),
        }
    }
}

/// One row per coupling with `Λ = exp(L/α)`, each using the dressed radial
/// `B(0)` and the supplied `E_CP`.
pub fn regime_sweep(alphas: &[f64], l: f64, e_cp: f64, opts: &SweepOptions) -> Result<SweepTable> {
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for &alpha in alphas {
        let params = ModelParams::from_l(alpha, l)?;
        if params.cutoff() > SWEEP_CUTOFF_CAP {
            skipped.push((alpha, params.cutoff()));
        } else {
            kept.push(params);
        }
    }
    let rows = kept
        .par_iter()
        .map(|params| {
            let grid = make_grid(params.cutoff(), opts.nodes, Clustering::GeometricNearZero)?;
            let d = solve_dispersion_with(*params, grid, &opts.dispersion)?;
            let big_b = b_lambda_zero_radial(&d)?;
            let ing = Ingredients {
                alpha: params.alpha(),
                m: m_alpha(&d),
                g1_prime_zero: g1_prime_zero(&d)?,
                b_zero: b_screening(big_b, params.alpha())?,
            };
            let e_pred = ing.predicted(e_cp);
            Ok(SweepRow {
                alpha: params.alpha(),
                cutoff: params.cutoff(),
                m: ing.m,
                b0: ing.b_zero,
                g1p0: ing.g1_prime_zero,
                lambda_inv: ing.lambda_inv(),
                c0_sq: ing.c0_sq(),
                e_pred,
                binding: ing.m - e_pred,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { l, e_cp, rows, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ing() -> Ingredients {
        Ingredients {
            alpha: 0.01,
            m: 1.03,
            g1_prime_zero: 1.02,
            b_zero: 0.019,
        }
    }

    #[test]
    fn lambda_by_substitution() {
        let i = Ingredients {
            alpha: 0.01,
            m: 1.0,
            g1_prime_zero: 1.0,
            b_zero: 0.5,
        };
        assert_eq!(i.lambda_inv(), 0.005);
    }

    #[test]
    fn c0_identities() {
        let i = ing();
        let tau = i.alpha * i.b_zero;
        let back = i.c0_sq() * tau * tau * i.m / (2.0 * i.g1_prime_zero.powi(2));
        assert!((back - 1.0).abs() < 1e-14);
        assert!((tau * i.lambda_inv() / 2.0 / i.c0_inv_sq() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn corrections_sum_to_scaled_pekar_energy() {
        let e = breakdown_from(&ing(), 0.1085, 0.2170);
        assert!(identity_defect(&e) < 1e-12);
        assert!(((e.vacuum_corr + e.direct_corr) / (-e.tau * e.d * e.lambda_inv / 2.0) - 1.0).abs() < 1e-12);
        assert!((e.kinetic_corr / (e.c0_inv_sq * e.t) - 1.0).abs() < 1e-12);
        assert!(e.vacuum_corr > 0.0 && e.direct_corr < 0.0);
        assert!(e.total_pred < e.m && e.binding > 0.0);
        assert!(!e.no_binding_warning);
    }

    #[test]
    fn zero_energy_predicts_rest_mass() {
        let i = ing();
        assert_eq!(i.predicted(0.0), i.m);
        let e = breakdown_from(&i, 0.2, 0.2);
        assert!(e.no_binding_warning);
    }

    #[test]
    fn zero_coupling_has_no_corrections() {
        let i = Ingredients {
            alpha: 0.0,
            m: 1.0,
            g1_prime_zero: 1.0,
            b_zero: 0.0,
        };
        let e = breakdown_from(&i, 0.1, 0.2);
        assert_eq!(e.total_pred, 1.0);
        assert_eq!(e.kinetic_corr + e.vacuum_corr + e.direct_corr, 0.0);
        assert!(e.c0_sq.is_infinite());
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"C0_sq\":null"));
        let back: EnergyBreakdown = serde_json::from_str(&json).unwrap();
        assert!(back.c0_sq.is_infinite());
    }

    #[test]
    fn sweep_skips_huge_cutoffs() {
        let t = regime_sweep(&[0.001], 0.05, -0.1, &SweepOptions::default()).unwrap();
        assert!(t.rows.is_empty());
        assert_eq!(t.skipped.len(), 1);
    }
}
