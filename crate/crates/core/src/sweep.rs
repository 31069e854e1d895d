//! Deterministic parameter sweeps over a base scenario.
//!
//! Grid points are evaluated in parallel on the current rayon pool; records
//! come back in grid order whatever the completion order.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{thermo_capacity, CapacityResult};
use crate::channel::{scenario_to_link_spec, Scenario};
use crate::error::{Error, Result};
use crate::thermo::{balanced_outputs, energy_per_bit, received_quantity};

/// Number of points in the canned noise-freedom sweep (10 per decade).
pub const FIG4_POINTS: usize = 61;
pub const FIG4_MIN_NOISE_DOF: f64 = 1.0;
pub const FIG4_MAX_NOISE_DOF: f64 = 1e6;

/// Number of points in the canned coding-overhead sweep (step 0.05).
pub const FIG5_POINTS: usize = 41;
pub const FIG5_MAX_OVERHEAD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    NoiseDof,
    CodingOverhead,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::NoiseDof => "noise_dof",
            SweepVariable::CodingOverhead => "coding_overhead",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutput {
    Thermo,
    Shannon,
    LowerBound,
    UpperBound,
    EnergyPerBit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: Scenario,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub outputs: BTreeSet<SweepOutput>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::validation("sweep grid", "grid is empty"));
        }
        for (i, &v) in self.grid.iter().enumerate() {
            let ok = match self.variable {
                SweepVariable::NoiseDof => v > 0.0,
                SweepVariable::CodingOverhead => v >= 0.0 && v.is_finite(),
            };
            if !ok {
                return Err(Error::validation(
                    "sweep grid",
                    format!(
                        "point {i} = {v} is out of range for {}",
                        self.variable.name()
                    ),
                ));
            }
        }
        if let Some(i) = self.grid.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::validation(
                "sweep grid",
                format!("not strictly increasing at point {}", i + 1),
            ));
        }
        self.base.validate()
    }

    fn scenario_at(&self, value: f64) -> Scenario {
        let mut s = self.base.clone();
        match self.variable {
            SweepVariable::NoiseDof => s.noise_dof = value,
            SweepVariable::CodingOverhead => s.coding_overhead = value,
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub variable_value: f64,
    pub capacity_result: CapacityResult,
    /// J/bit, direct form, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_per_bit: Option<f64>,
}

/// A sweep that stopped at a failing grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepError {
    pub index: usize,
    pub value: f64,
    pub source: Error,
    /// Records for the grid points before `index`.
    pub completed: Vec<SweepRecord>,
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sweep failed at grid point {} (value {}): {}; {} records completed",
            self.index,
            self.value,
            self.source,
            self.completed.len()
        )
    }
}

impl std::error::Error for SweepError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Evaluates one scenario into a record.
pub fn evaluate_point(
    scenario: &Scenario,
    value: f64,
    outputs: &BTreeSet<SweepOutput>,
) -> Result<SweepRecord> {
    let link = scenario_to_link_spec(scenario)?;
    let capacity_result = thermo_capacity(&link)?;
    let energy_per_bit = if outputs.contains(&SweepOutput::EnergyPerBit) {
        let received = received_quantity(&link.branches, link.symbol_period)?;
        let t_lo = scenario.noise_pool_temperature;
        let decoded = balanced_outputs(
            &received,
            link.branches.len(),
            scenario.output_temperature(),
            t_lo,
        )?;
        Some(energy_per_bit(&received, &decoded, t_lo)?.direct)
    } else {
        None
    };
    Ok(SweepRecord {
        variable_value: value,
        capacity_result,
        energy_per_bit,
    })
}

fn assemble(
    grid: &[f64],
    results: Vec<Result<SweepRecord>>,
) -> std::result::Result<Vec<SweepRecord>, SweepError> {
    let mut records = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => records.push(rec),
            Err(source) => {
                return Err(SweepError {
                    index,
                    value: grid[index],
                    source,
                    completed: records,
                })
            }
        }
    }
    Ok(records)
}

fn invalid_spec(spec: &SweepSpec, source: Error) -> SweepError {
    SweepError {
        index: 0,
        value: spec.grid.first().copied().unwrap_or(f64::NAN),
        source,
        completed: Vec::new(),
    }
}

pub fn run_sweep(spec: &SweepSpec) -> std::result::Result<Vec<SweepRecord>, SweepError> {
    spec.validate().map_err(|e| invalid_spec(spec, e))?;
    let results: Vec<_> = spec
        .grid
        .par_iter()
        .map(|&v| evaluate_point(&spec.scenario_at(v), v, &spec.outputs))
        .collect();
    assemble(&spec.grid, results)
}

/// Same as [`run_sweep`] on the calling thread only.
pub fn run_sweep_serial(spec: &SweepSpec) -> std::result::Result<Vec<SweepRecord>, SweepError> {
    spec.validate().map_err(|e| invalid_spec(spec, e))?;
    let results: Vec<_> = spec
        .grid
        .iter()
        .map(|&v| evaluate_point(&spec.scenario_at(v), v, &spec.outputs))
        .collect();
    assemble(&spec.grid, results)
}

/// `points` values from `start` to `stop`, evenly spaced in log10.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let (a, b) = (start.log10(), stop.log10());
    grid_points(points, |t| 10f64.powf(a + (b - a) * t), start, stop)
}

/// `points` evenly spaced values from `start` to `stop`.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    grid_points(points, |t| start + (stop - start) * t, start, stop)
}

fn grid_points(points: usize, f: impl Fn(f64) -> f64, start: f64, stop: f64) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = points - 1;
            (0..points)
                .map(|i| match i {
                    0 => start,
                    i if i == last => stop,
                    i => f(i as f64 / last as f64),
                })
                .collect()
        }
    }
}

pub fn fig4_spec(base: Scenario) -> SweepSpec {
    SweepSpec {
        base,
        variable: SweepVariable::NoiseDof,
        grid: log_grid(FIG4_MIN_NOISE_DOF, FIG4_MAX_NOISE_DOF, FIG4_POINTS),
        outputs: [SweepOutput::Thermo, SweepOutput::Shannon].into(),
    }
}

pub fn fig5_spec(base: Scenario) -> SweepSpec {
    SweepSpec {
        base,
        variable: SweepVariable::CodingOverhead,
        grid: linear_grid(0.0, FIG5_MAX_OVERHEAD, FIG5_POINTS),
        outputs: [
            SweepOutput::Thermo,
            SweepOutput::Shannon,
            SweepOutput::LowerBound,
            SweepOutput::UpperBound,
        ]
        .into(),
    }
}

/// Capacity against noise freedom, from impulse noise (1 bit) to 10⁶ bits.
pub fn fig4_sweep(base: Scenario) -> std::result::Result<Vec<SweepRecord>, SweepError> {
    run_sweep(&fig4_spec(base))
}

/// Capacity and bounds against coding overhead ψ ∈ [0, 2].
pub fn fig5_sweep(base: Scenario) -> std::result::Result<Vec<SweepRecord>, SweepError> {
    run_sweep(&fig5_spec(base))
}
