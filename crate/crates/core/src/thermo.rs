//! Entropy, energy, temperature and degrees-of-freedom bookkeeping.
//!
//! Every quantity obeys `H = U/T = k_B M ln 2`: an energy `U` held at
//! temperature `T` carries entropy `H` and `M` bits of freedom. Freedom is
//! additive across branches, which is what lets the detector temperature and
//! the decode-side balance be written as plain sums.
//!
//! The decoder is modelled as an engine between the detector (hot side,
//! `T_HI`) and the noise pool (cold side, `T_LO`). Decoded outputs leave as
//! ordered information, so the pool absorbs the received entropy plus the
//! entropy equivalent of the decoded bits:
//!
//! ```text
//! U / T_HI = -Σ U_O / T_O + (U - Σ U_O) / T_LO
//! ```

use serde::{Deserialize, Serialize};

use crate::constants::{BIT_FACTOR, BOLTZMANN};
use crate::error::{require_nonnegative, require_positive, Error, Result};

/// Relative tolerance for identities that hold exactly in real arithmetic.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Probabilities of the distinct symbol states of one code symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDistribution {
    probabilities: Vec<f64>,
}

impl SymbolDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::validation("symbol distribution", "no states"));
        }
        for (j, &p) in probabilities.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::validation(
                    "symbol distribution",
                    format!("entry {j} = {p} is outside [0, 1]"),
                ));
            }
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::validation(
                "symbol distribution",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        Ok(Self { probabilities })
    }

    /// Equiprobable distribution over `states` symbol states.
    pub fn uniform(states: usize) -> Result<Self> {
        if states == 0 {
            return Err(Error::validation("symbol distribution", "no states"));
        }
        Ok(Self {
            probabilities: vec![1.0 / states as f64; states],
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Number of distinct symbol states.
    pub fn states(&self) -> usize {
        self.probabilities.len()
    }
}

/// Gibbs entropy `-k_B Σ p ln p` of one symbol, in J/K. Zero-probability
/// states contribute nothing.
pub fn gibbs_entropy(dist: &SymbolDistribution) -> f64 {
    let nats: f64 = dist
        .probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    BOLTZMANN * nats
}

/// Entropy of `num_symbols` independent symbols drawn from `dist`.
pub fn sequence_entropy(num_symbols: u64, dist: &SymbolDistribution) -> f64 {
    num_symbols as f64 * gibbs_entropy(dist)
}

/// An energy at a temperature, with its entropy and degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoQuantity {
    energy: f64,
    temperature: f64,
    dof: f64,
    entropy: f64,
}

impl ThermoQuantity {
    pub fn from_energy_temperature(energy: f64, temperature: f64) -> Result<Self> {
        check_temperature("temperature", temperature)?;
        require_nonnegative("energy", energy)?;
        let entropy = energy / temperature;
        Ok(Self {
            energy,
            temperature,
            dof: entropy / BIT_FACTOR,
            entropy,
        })
    }

    pub fn from_dof_temperature(dof: f64, temperature: f64) -> Result<Self> {
        check_temperature("temperature", temperature)?;
        require_nonnegative("degrees of freedom", dof)?;
        Ok(Self {
            energy: BIT_FACTOR * dof * temperature,
            temperature,
            dof,
            entropy: BIT_FACTOR * dof,
        })
    }

    /// The temperature at which `energy` carries exactly `dof` bits.
    pub fn from_dof_energy(dof: f64, energy: f64) -> Result<Self> {
        require_positive("degrees of freedom", dof)?;
        require_positive("energy", energy)?;
        let temperature = energy / (BIT_FACTOR * dof);
        check_temperature("derived temperature", temperature)?;
        Ok(Self {
            energy,
            temperature,
            dof,
            entropy: BIT_FACTOR * dof,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn entropy(&self) -> f64 {
        self.entropy
    }
}

/// Shorthand for [`ThermoQuantity::from_energy_temperature`].
pub fn thermo_quantity(energy: f64, temperature: f64) -> Result<ThermoQuantity> {
    ThermoQuantity::from_energy_temperature(energy, temperature)
}

fn check_temperature(what: &str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{what} must be finite and > 0 K, got {t}"
        )))
    }
}

/// Per-branch signal, FEC and noise parameters. Powers in W, temperatures in
/// K, degrees of freedom in bits per symbol period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchParams {
    pub signal_power: f64,
    pub fec_power: f64,
    pub noise_power: f64,
    pub signal_dof: f64,
    pub fec_dof: f64,
    pub noise_dof: f64,
    pub signal_temperature: f64,
    pub noise_temperature: f64,
}

impl BranchParams {
    pub fn validate(&self) -> Result<()> {
        require_nonnegative("signal power", self.signal_power)?;
        require_nonnegative("FEC power", self.fec_power)?;
        require_positive("noise power", self.noise_power)?;
        require_nonnegative("signal degrees of freedom", self.signal_dof)?;
        require_nonnegative("FEC degrees of freedom", self.fec_dof)?;
        require_positive("noise degrees of freedom", self.noise_dof)?;
        require_positive("signal temperature", self.signal_temperature)?;
        require_positive("noise temperature", self.noise_temperature)?;
        Ok(())
    }

    /// Signal plus FEC energy sent in one period `tau`.
    pub fn send_energy(&self, tau: f64) -> f64 {
        (self.signal_power + self.fec_power) * tau
    }

    pub fn noise_energy(&self, tau: f64) -> f64 {
        self.noise_power * tau
    }

    /// `(S + P_FEC) / N`.
    pub fn snr_ratio(&self) -> f64 {
        (self.signal_power + self.fec_power) / self.noise_power
    }

    /// `(M_S + M_FEC) / M_N`.
    pub fn dof_ratio(&self) -> f64 {
        (self.signal_dof + self.fec_dof) / self.noise_dof
    }
}

/// One decoded output stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeBranch {
    output_energy: f64,
    output_temperature: f64,
    output_dof: f64,
}

impl DecodeBranch {
    pub fn new(output_energy: f64, output_temperature: f64) -> Result<Self> {
        let q = ThermoQuantity::from_energy_temperature(output_energy, output_temperature)?;
        Ok(Self {
            output_energy,
            output_temperature,
            output_dof: q.dof,
        })
    }

    pub fn output_energy(&self) -> f64 {
        self.output_energy
    }

    pub fn output_temperature(&self) -> f64 {
        self.output_temperature
    }

    pub fn output_dof(&self) -> f64 {
        self.output_dof
    }
}

fn check_tau(tau: f64) -> Result<()> {
    require_positive("symbol period", tau)
}

fn validate_all(branches: &[BranchParams]) -> Result<()> {
    for (i, b) in branches.iter().enumerate() {
        b.validate().map_err(|e| match e {
            Error::Validation { what, reason } => Error::Validation {
                what: format!("branch {i} {what}"),
                reason,
            },
            other => other,
        })?;
    }
    Ok(())
}

fn send_dof_sum(branches: &[BranchParams], tau: f64) -> f64 {
    branches
        .iter()
        .map(|b| b.send_energy(tau) / (BIT_FACTOR * b.signal_temperature))
        .sum()
}

fn noise_dof_sum(branches: &[BranchParams], tau: f64) -> f64 {
    branches
        .iter()
        .map(|b| b.noise_energy(tau) / (BIT_FACTOR * b.noise_temperature))
        .sum()
}

/// Degrees of freedom leaving all transmit branches in one period.
pub fn total_send_dof(branches: &[BranchParams], tau: f64) -> Result<f64> {
    if branches.is_empty() {
        return Err(Error::validation("send branches", "list is empty"));
    }
    check_tau(tau)?;
    validate_all(branches)?;
    Ok(send_dof_sum(branches, tau))
}

/// Degrees of freedom injected by channel noise in one period.
pub fn total_noise_dof(branches: &[BranchParams], tau: f64) -> Result<f64> {
    if branches.is_empty() {
        return Err(Error::validation("noise branches", "list is empty"));
    }
    check_tau(tau)?;
    validate_all(branches)?;
    Ok(noise_dof_sum(branches, tau))
}

fn temperature_of(energy: f64, dof: f64) -> Result<f64> {
    if !(dof > 0.0) {
        return Err(Error::domain(
            "total degrees of freedom is zero; detector temperature undefined",
        ));
    }
    Ok(energy / (BIT_FACTOR * dof))
}

/// Detector temperature `T_HI` that conserves freedom between the transmit
/// branches, the channel noise and the detector:
/// `U / T_HI = Σ (U_i + U_i^FEC)/T_i + Σ U_j^N/T_j^N`.
///
/// `noise` may be empty, which models a noiseless channel.
pub fn detector_temperature(
    total_energy: f64,
    send: &[BranchParams],
    noise: &[BranchParams],
    tau: f64,
) -> Result<f64> {
    require_positive("received energy", total_energy)?;
    let send_dof = total_send_dof(send, tau)?;
    validate_all(noise)?;
    temperature_of(total_energy, send_dof + noise_dof_sum(noise, tau))
}

/// Asymptotes of the detector temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemperatureLimits {
    /// Signal and FEC energy negligible next to noise.
    pub low_snr: f64,
    /// Noise energy negligible next to signal and FEC.
    pub high_snr: f64,
}

impl TemperatureLimits {
    pub fn min(&self) -> f64 {
        self.low_snr.min(self.high_snr)
    }

    pub fn max(&self) -> f64 {
        self.low_snr.max(self.high_snr)
    }
}

/// Detector temperature in the low- and high-SNR limits. Each limit is the
/// energy-weighted harmonic mean of the surviving branch temperatures, so the
/// send-side weights are the branch energy fractions.
pub fn detector_temperature_limits(
    send: &[BranchParams],
    noise: &[BranchParams],
    tau: f64,
) -> Result<TemperatureLimits> {
    let send_dof = total_send_dof(send, tau)?;
    let noise_dof = total_noise_dof(noise, tau)?;
    let send_energy: f64 = send.iter().map(|b| b.send_energy(tau)).sum();
    let noise_energy: f64 = noise.iter().map(|b| b.noise_energy(tau)).sum();
    Ok(TemperatureLimits {
        low_snr: temperature_of(noise_energy, noise_dof)?,
        high_snr: temperature_of(send_energy, send_dof)?,
    })
}

/// Energy reaching the detector in one period and the detector temperature,
/// with each branch acting as both a send and a noise branch.
pub fn received_quantity(branches: &[BranchParams], tau: f64) -> Result<ThermoQuantity> {
    validate_all(branches)?;
    check_tau(tau)?;
    let energy: f64 = branches
        .iter()
        .map(|b| b.send_energy(tau) + b.noise_energy(tau))
        .sum();
    let t_hi = detector_temperature(energy, branches, branches, tau)?;
    ThermoQuantity::from_energy_temperature(energy, t_hi)
}

/// Result of the decode-side entropy balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecodeBalance {
    /// Degrees of freedom flowing into the noise pool, `(U - Σ U_O) / (k_B T_LO ln 2)`.
    pub noise_sink_dof: f64,
    /// `(H_U - H_O - H_NS)` relative to the largest term, with `H_O = -Σ U_O/T_O`.
    pub residual: f64,
}

impl DecodeBalance {
    pub fn is_balanced(&self) -> bool {
        self.residual.abs() <= IDENTITY_TOLERANCE
    }
}

fn output_energy_sum(received: &ThermoQuantity, outputs: &[DecodeBranch]) -> Result<f64> {
    let output: f64 = outputs.iter().map(|o| o.output_energy).sum();
    if output > received.energy * (1.0 + IDENTITY_TOLERANCE) {
        return Err(Error::Conservation {
            output,
            received: received.energy,
        });
    }
    Ok(output.min(received.energy))
}

/// Splits the received entropy between decoded outputs and the noise pool.
pub fn decode_entropy_balance(
    received: &ThermoQuantity,
    outputs: &[DecodeBranch],
    t_lo: f64,
) -> Result<DecodeBalance> {
    check_temperature("noise-pool temperature", t_lo)?;
    let output_energy = output_energy_sum(received, outputs)?;
    let discarded = received.energy - output_energy;
    let sink_entropy = discarded / t_lo;
    let output_entropy: f64 = outputs
        .iter()
        .map(|o| o.output_energy / o.output_temperature)
        .sum();
    let received_entropy = received.entropy;
    let scale = received_entropy.max(sink_entropy).max(output_entropy);
    let residual = if scale > 0.0 {
        (received_entropy + output_entropy - sink_entropy) / scale
    } else {
        0.0
    };
    Ok(DecodeBalance {
        noise_sink_dof: sink_entropy / BIT_FACTOR,
        residual,
    })
}

/// Carnot efficiency `1 - T_LO/T_HI` of the decode engine.
pub fn carnot_efficiency(t_lo: f64, t_hi: f64) -> Result<f64> {
    check_temperature("noise-pool temperature", t_lo)?;
    check_temperature("detector temperature", t_hi)?;
    if t_lo > t_hi {
        return Err(Error::domain(format!(
            "noise pool ({t_lo} K) is hotter than the detector ({t_hi} K)"
        )));
    }
    Ok(1.0 - t_lo / t_hi)
}

/// Energy dissipated per decoded bit, in J/bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyPerBit {
    /// `(U - Σ U_O) / Σ M_O`.
    pub direct: f64,
    /// `[1 + Σ T_O / (n T_HI)] / [1 - T_LO/T_HI] · k_B T_LO ln 2` for `n` outputs.
    pub closed_form: f64,
}

pub fn energy_per_bit(
    received: &ThermoQuantity,
    outputs: &[DecodeBranch],
    t_lo: f64,
) -> Result<EnergyPerBit> {
    check_temperature("noise-pool temperature", t_lo)?;
    let t_hi = received.temperature;
    if t_lo >= t_hi {
        return Err(Error::domain(format!(
            "noise-pool temperature {t_lo} K is not below the detector temperature {t_hi} K; \
             Carnot efficiency is not positive"
        )));
    }
    let output_dof: f64 = outputs.iter().map(|o| o.output_dof).sum();
    if !(output_dof > 0.0) {
        return Err(Error::domain("decoded outputs carry no degrees of freedom"));
    }
    let output_energy = output_energy_sum(received, outputs)?;
    let direct = (received.energy - output_energy) / output_dof;

    let mean_output_t =
        outputs.iter().map(|o| o.output_temperature).sum::<f64>() / outputs.len() as f64;
    let closed_form = (1.0 + mean_output_t / t_hi) / (1.0 - t_lo / t_hi) * BIT_FACTOR * t_lo;
    Ok(EnergyPerBit {
        direct,
        closed_form,
    })
}

/// Builds `count` decoded outputs at a common temperature whose energies
/// satisfy the decode entropy balance exactly.
pub fn balanced_outputs(
    received: &ThermoQuantity,
    count: usize,
    output_temperature: f64,
    t_lo: f64,
) -> Result<Vec<DecodeBranch>> {
    if count == 0 {
        return Err(Error::validation("decode branches", "count is zero"));
    }
    check_temperature("output temperature", output_temperature)?;
    check_temperature("noise-pool temperature", t_lo)?;
    let t_hi = received.temperature;
    if t_lo >= t_hi {
        return Err(Error::domain(format!(
            "noise-pool temperature {t_lo} K is not below the detector temperature {t_hi} K"
        )));
    }
    let total =
        received.energy * (t_hi - t_lo) * output_temperature / (t_hi * (t_lo + output_temperature));
    let each = total / count as f64;
    (0..count)
        .map(|_| DecodeBranch::new(each, output_temperature))
        .collect()
}
