//! Single-shot capacity and energy reports.

use std::fmt::Write as _;

use serde::Serialize;
use thermimo::{
    balanced_outputs, carnot_efficiency, decode_entropy_balance, detector_temperature_limits,
    energy_per_bit, landauer_floor, received_quantity, scenario_to_link_spec, thermo_capacity_with,
    CapacityOptions, CapacityResult, DecodeBalance, EnergyPerBit, PhysicalConstants, Scenario,
    TemperatureLimits,
};

use crate::output::format_number as num;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct CapacityReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub constants: PhysicalConstants,
    pub scenario: Scenario,
    pub result: CapacityResult,
}

pub fn capacity_report(
    scenario: Scenario,
    options: CapacityOptions,
) -> Result<CapacityReport, CliError> {
    let link = scenario_to_link_spec(&scenario)?;
    let result = thermo_capacity_with(&link, options)?;
    Ok(CapacityReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        constants: PhysicalConstants::TABLE1,
        scenario,
        result,
    })
}

impl CapacityReport {
    pub fn to_text(&self) -> String {
        let r = &self.result;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "thermodynamic capacity   {} bit/s",
            num(r.thermo_capacity)
        );
        let _ = writeln!(
            out,
            "shannon reference        {} bit/s",
            num(r.shannon_reference)
        );
        let _ = writeln!(out, "lower bound              {} bit/s", num(r.lower_bound));
        let _ = writeln!(out, "upper bound              {} bit/s", num(r.upper_bound));
        let _ = writeln!(out, "branch  snr_term_bps             dof_term_bps");
        for (i, t) in r.per_branch_terms.iter().enumerate() {
            let _ = writeln!(out, "{i:<7} {} {}", num(t.snr_term), num(t.dof_term));
        }
        if r.warnings.is_empty() {
            let _ = writeln!(out, "warnings: none");
        } else {
            for w in &r.warnings {
                let _ = writeln!(out, "warning: {w}");
            }
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct EnergyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub constants: PhysicalConstants,
    pub scenario: Scenario,
    pub received_energy: f64,
    pub detector_temperature: f64,
    pub temperature_limits: TemperatureLimits,
    pub noise_pool_temperature: f64,
    pub output_temperature: f64,
    pub carnot_efficiency: f64,
    pub decoded_dof: f64,
    pub balance: DecodeBalance,
    pub energy_per_bit: EnergyPerBit,
    pub landauer_floor: f64,
    /// `T_HI >= T_O` and `T_HI >= T_LO`.
    pub floor_preconditions_met: bool,
}

pub fn energy_report(scenario: Scenario) -> Result<EnergyReport, CliError> {
    let link = scenario_to_link_spec(&scenario)?;
    let tau = link.symbol_period;
    let received = received_quantity(&link.branches, tau)?;
    let limits = detector_temperature_limits(&link.branches, &link.branches, tau)?;
    let t_hi = received.temperature();
    let t_lo = scenario.noise_pool_temperature;
    let t_out = scenario.output_temperature();
    if t_lo >= t_hi {
        return Err(CliError::Domain(format!(
            "noise-pool temperature T_LO = {t_lo} K is not below the detector temperature \
             T_HI = {t_hi} K; Carnot efficiency is not positive and the energy per bit is undefined"
        )));
    }
    let outputs = balanced_outputs(&received, link.branches.len(), t_out, t_lo)?;
    let balance = decode_entropy_balance(&received, &outputs, t_lo)?;
    let energy = energy_per_bit(&received, &outputs, t_lo)?;
    Ok(EnergyReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        constants: PhysicalConstants::TABLE1,
        received_energy: received.energy(),
        detector_temperature: t_hi,
        temperature_limits: limits,
        noise_pool_temperature: t_lo,
        output_temperature: t_out,
        carnot_efficiency: carnot_efficiency(t_lo, t_hi)?,
        decoded_dof: outputs.iter().map(|o| o.output_dof()).sum(),
        balance,
        energy_per_bit: energy,
        landauer_floor: landauer_floor(t_lo),
        floor_preconditions_met: t_hi >= t_out && t_hi >= t_lo,
        scenario,
    })
}

impl EnergyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |label: &str, v: f64, unit: &str| {
            let _ = writeln!(out, "{label:<30} {} {unit}", num(v));
        };
        line("detector temperature T_HI", self.detector_temperature, "K");
        line("low-SNR limit", self.temperature_limits.low_snr, "K");
        line("high-SNR limit", self.temperature_limits.high_snr, "K");
        line(
            "noise-pool temperature T_LO",
            self.noise_pool_temperature,
            "K",
        );
        line("output temperature T_O", self.output_temperature, "K");
        line("carnot efficiency", self.carnot_efficiency, "");
        line("received energy", self.received_energy, "J");
        line("decoded freedom", self.decoded_dof, "bit");
        line("noise-sink freedom", self.balance.noise_sink_dof, "bit");
        line(
            "energy per bit (direct)",
            self.energy_per_bit.direct,
            "J/bit",
        );
        line(
            "energy per bit (closed form)",
            self.energy_per_bit.closed_form,
            "J/bit",
        );
        line("landauer floor", self.landauer_floor, "J/bit");
        let _ = writeln!(
            out,
            "floor preconditions (T_HI >= T_O, T_HI >= T_LO): {}",
            if self.floor_preconditions_met {
                "met"
            } else {
                "NOT met"
            }
        );
        out
    }
}
