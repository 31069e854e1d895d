//! Shannon and thermodynamic capacity of parallel MIMO eigen-branches.
//!
//! Per branch `i` with `x_i = (S_i + P_i^FEC)/N_i` and
//! `d_i = (M_i^S + M_i^FEC)/M_i^N`, the thermodynamic capacity is
//!
//! ```text
//! C = B Σ [log2(1 + x_i) - log2(1 + d_i)]
//! ```
//!
//! and is bracketed by
//!
//! ```text
//! C_LO = B [log2(1 + Π x_i) - n log2(1 + Σ d_i)]
//! C_HI = B [n log2(1 + Σ x_i / n) - log2(1 + Π d_i)]
//! ```
//!
//! Dropping the `d_i` terms (noise freedom much larger than signal freedom)
//! leaves the Shannon form.

use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::thermo::BranchParams;

/// A link reduced to `min(n_t, n_r)` parallel branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub bandwidth: f64,
    pub symbol_period: f64,
    pub branches: Vec<BranchParams>,
    pub n_t: usize,
    pub n_r: usize,
}

impl LinkSpec {
    pub fn new(
        bandwidth: f64,
        symbol_period: f64,
        branches: Vec<BranchParams>,
        n_t: usize,
        n_r: usize,
    ) -> Result<Self> {
        let spec = Self {
            bandwidth,
            symbol_period,
            branches,
            n_t,
            n_r,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite_positive("bandwidth", self.bandwidth)?;
        require_finite_positive("symbol period", self.symbol_period)?;
        if self.n_t == 0 || self.n_r == 0 {
            return Err(Error::validation(
                "antenna counts",
                format!("n_t = {}, n_r = {}; both must be >= 1", self.n_t, self.n_r),
            ));
        }
        let expected = self.subchannels();
        if self.branches.len() != expected {
            return Err(Error::validation(
                "branches",
                format!(
                    "expected min(n_t, n_r) = {expected} branches, got {}",
                    self.branches.len()
                ),
            ));
        }
        for (i, b) in self.branches.iter().enumerate() {
            b.validate().map_err(|e| match e {
                Error::Validation { what, reason } => {
                    Error::Domain(format!("branch {i}: {what} {reason}"))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Number of parallel eigen-branches, `min(n_t, n_r)`.
    pub fn subchannels(&self) -> usize {
        self.n_t.min(self.n_r)
    }
}

fn require_finite_positive(what: &str, v: f64) -> Result<()> {
    require_positive(what, v)?;
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(what, "must be finite"))
    }
}

/// Non-fatal conditions attached to a [`CapacityResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// The freedom term exceeds the SNR term on a branch.
    NegativeBranch { branch: usize, value: f64 },
    /// The total capacity was negative and has been clamped to zero.
    Clamped { raw: f64 },
    /// A product of per-branch ratios does not fit in an `f64`; the bound was
    /// evaluated in the log domain.
    ProductOverflow { bound: Bound },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Lower,
    Upper,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NegativeBranch { branch, value } => {
                write!(
                    f,
                    "branch {branch} contributes negative capacity {value:e} bit/s"
                )
            }
            Warning::Clamped { raw } => write!(f, "negative capacity {raw:e} bit/s clamped to 0"),
            Warning::ProductOverflow { bound } => {
                let which = match bound {
                    Bound::Lower => "lower",
                    Bound::Upper => "upper",
                };
                write!(
                    f,
                    "{which} bound ratio product exceeds f64 range; evaluated in log domain"
                )
            }
        }
    }
}

/// One branch's contribution, both terms already scaled by the bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchTerm {
    pub snr_term: f64,
    pub dof_term: f64,
}

impl BranchTerm {
    pub fn net(&self) -> f64 {
        self.snr_term - self.dof_term
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub thermo_capacity: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub shannon_reference: f64,
    pub per_branch_terms: Vec<BranchTerm>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CapacityOptions {
    /// Report zero instead of a negative thermodynamic capacity.
    pub clamp_negative: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityBounds {
    pub lower: f64,
    pub upper: f64,
    pub warnings: Vec<Warning>,
}

/// Shannon capacity `Σ B log2(1 + λ_i² ρ_i)` in bit/s.
pub fn shannon_capacity(bandwidth: f64, gains: &[f64], snrs: &[f64]) -> Result<f64> {
    require_finite_positive("bandwidth", bandwidth)?;
    if gains.len() != snrs.len() {
        return Err(Error::validation(
            "subchannels",
            format!("{} gains but {} SNRs", gains.len(), snrs.len()),
        ));
    }
    if gains.is_empty() {
        return Err(Error::validation("subchannels", "no subchannels"));
    }
    let mut total = 0.0;
    for (&g, &rho) in gains.iter().zip(snrs) {
        require_nonnegative("power gain", g)?;
        require_nonnegative("SNR", rho)?;
        total += bandwidth * (g * g * rho).ln_1p() / LN_2;
    }
    Ok(total)
}

/// Degrees of freedom one branch dumps into the noise pool per period,
/// `τ B / ln 2`.
pub fn noise_sink_rate(bandwidth: f64, tau: f64) -> Result<f64> {
    if !(bandwidth > 0.0) || !(tau > 0.0) {
        return Err(Error::domain(format!(
            "bandwidth ({bandwidth}) and symbol period ({tau}) must be > 0"
        )));
    }
    Ok(tau * bandwidth / LN_2)
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// `log2(1 + 2^l)` without forming `2^l`.
fn log2_1p_exp2(l: f64) -> f64 {
    if l > 0.0 {
        l + log2_1p((-l).exp2())
    } else {
        log2_1p(l.exp2())
    }
}

fn snr_ratios(spec: &LinkSpec) -> Vec<f64> {
    spec.branches.iter().map(BranchParams::snr_ratio).collect()
}

fn dof_ratios(spec: &LinkSpec) -> Vec<f64> {
    spec.branches.iter().map(BranchParams::dof_ratio).collect()
}

/// Capacity with the freedom terms dropped, in bit/s.
pub fn degenerate_capacity(spec: &LinkSpec) -> Result<f64> {
    spec.validate()?;
    let x = snr_ratios(spec);
    shannon_capacity(spec.bandwidth, &vec![1.0; x.len()], &x)
}

pub fn capacity_bounds(spec: &LinkSpec) -> Result<CapacityBounds> {
    spec.validate()?;
    let b = spec.bandwidth;
    let n = spec.subchannels() as f64;
    let x = snr_ratios(spec);
    let d = dof_ratios(spec);
    let mut warnings = Vec::new();

    let log_prod_x: f64 = x.iter().map(|v| v.log2()).sum();
    let log_prod_d: f64 = d.iter().map(|v| v.log2()).sum();
    if log_prod_x >= f64::MAX_EXP as f64 {
        warnings.push(Warning::ProductOverflow {
            bound: Bound::Lower,
        });
    }
    if log_prod_d >= f64::MAX_EXP as f64 {
        warnings.push(Warning::ProductOverflow {
            bound: Bound::Upper,
        });
    }
    let sum_x: f64 = x.iter().sum();
    let sum_d: f64 = d.iter().sum();

    let lower = b * (log2_1p_exp2(log_prod_x) - n * log2_1p(sum_d));
    let upper = b * (n * log2_1p(sum_x / n) - log2_1p_exp2(log_prod_d));
    Ok(CapacityBounds {
        lower,
        upper,
        warnings,
    })
}

pub fn thermo_capacity(spec: &LinkSpec) -> Result<CapacityResult> {
    thermo_capacity_with(spec, CapacityOptions::default())
}

pub fn thermo_capacity_with(spec: &LinkSpec, options: CapacityOptions) -> Result<CapacityResult> {
    spec.validate()?;
    let b = spec.bandwidth;
    let mut warnings = Vec::new();
    let per_branch_terms: Vec<BranchTerm> = spec
        .branches
        .iter()
        .map(|br| BranchTerm {
            snr_term: b * log2_1p(br.snr_ratio()),
            dof_term: b * log2_1p(br.dof_ratio()),
        })
        .collect();
    for (branch, term) in per_branch_terms.iter().enumerate() {
        let value = term.net();
        if value < 0.0 {
            warnings.push(Warning::NegativeBranch { branch, value });
        }
    }
    let mut thermo: f64 = per_branch_terms.iter().map(BranchTerm::net).sum();
    if options.clamp_negative && thermo < 0.0 {
        warnings.push(Warning::Clamped { raw: thermo });
        thermo = 0.0;
    }

    let bounds = capacity_bounds(spec)?;
    warnings.extend(bounds.warnings);
    Ok(CapacityResult {
        thermo_capacity: thermo,
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        shannon_reference: degenerate_capacity(spec)?,
        per_branch_terms,
        warnings,
    })
}
