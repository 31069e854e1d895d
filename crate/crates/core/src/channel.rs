//! Channel realizations and scenario construction.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::capacity::LinkSpec;
use crate::constants::{BIT_FACTOR, BOLTZMANN};
use crate::error::{require_nonnegative, require_positive, Error, Result};
use crate::thermo::BranchParams;

/// An `n_r × n_t` matrix of complex channel gains, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMatrix {
    n_t: usize,
    n_r: usize,
    entries: Vec<Complex64>,
    seed: Option<u64>,
}

impl ChannelMatrix {
    pub fn from_rows(n_r: usize, n_t: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dims(n_t, n_r)?;
        if entries.len() != n_t * n_r {
            return Err(Error::validation(
                "channel matrix",
                format!("{} entries for a {n_r}x{n_t} matrix", entries.len()),
            ));
        }
        Ok(Self {
            n_t,
            n_r,
            entries,
            seed: None,
        })
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Gain from transmit antenna `tx` to receive antenna `rx`.
    pub fn get(&self, rx: usize, tx: usize) -> Complex64 {
        self.entries[rx * self.n_t + tx]
    }

    /// Squared Frobenius norm `Σ |h|²`.
    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|h| h.norm_sqr()).sum()
    }
}

fn check_dims(n_t: usize, n_r: usize) -> Result<()> {
    if n_t == 0 || n_r == 0 {
        return Err(Error::validation(
            "channel dimensions",
            format!("n_t = {n_t}, n_r = {n_r}; both must be >= 1"),
        ));
    }
    Ok(())
}

/// Uniform in `[0, 1)` from the top 53 bits of a 64-bit draw.
fn unit_uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// I.i.d. Rayleigh channel: every entry is circularly-symmetric complex
/// Gaussian with `E|h|² = 1`.
///
/// The stream is ChaCha8 seeded with `seed_from_u64(seed)`. Each entry, in
/// row-major order, consumes two uniforms `u1, u2` and applies Box-Muller:
/// `r = sqrt(-2 ln(1 - u1))`, `h = r (cos 2πu2 + i sin 2πu2) / sqrt 2`.
pub fn generate_channel(n_t: usize, n_r: usize, seed: u64) -> Result<ChannelMatrix> {
    check_dims(n_t, n_r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n_t * n_r)
        .map(|_| {
            let u1 = unit_uniform(&mut rng);
            let u2 = unit_uniform(&mut rng);
            let r = (-2.0 * (1.0 - u1).ln()).sqrt();
            let (s, c) = (2.0 * PI * u2).sin_cos();
            Complex64::new(r * c, r * s) / SQRT_2
        })
        .collect();
    Ok(ChannelMatrix {
        n_t,
        n_r,
        entries,
        seed: Some(seed),
    })
}

/// Singular values of `H`, descending, one per eigen-branch.
pub fn eigenmode_gains(h: &ChannelMatrix) -> Vec<f64> {
    let m = DMatrix::from_row_slice(h.n_r, h.n_t, &h.entries);
    let mut gains: Vec<f64> = m.singular_values().iter().map(|v| v.max(0.0)).collect();
    gains.sort_by(|a, b| b.total_cmp(a));
    gains
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modulation {
    #[serde(rename = "bpsk", alias = "BPSK")]
    Bpsk,
    #[serde(rename = "qpsk", alias = "QPSK")]
    Qpsk,
    #[serde(rename = "16qam", alias = "16QAM")]
    Qam16,
    #[serde(rename = "64qam", alias = "64QAM")]
    Qam64,
    #[serde(rename = "256qam", alias = "256QAM")]
    Qam256,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
            Modulation::Qam256 => 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    #[default]
    UnitGain,
    Rayleigh {
        seed: u64,
    },
}

/// High-level link description, expanded into per-branch parameters by
/// [`scenario_to_link_spec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_t: usize,
    pub n_r: usize,
    /// Hz.
    pub bandwidth: f64,
    /// Seconds; one symbol per period.
    pub symbol_period: f64,
    pub modulation: Modulation,
    /// W, split equally over the eigen-branches.
    pub total_signal_power: f64,
    /// `ψ = M_FEC / M_S`.
    pub coding_overhead: f64,
    /// K.
    pub noise_temperature: f64,
    /// Noise degrees of freedom per branch, bits. May be infinite.
    pub noise_dof: f64,
    /// K.
    pub noise_pool_temperature: f64,
    pub channel_mode: ChannelMode,
    /// Temperature of the decoded output streams, K. Defaults to the
    /// noise-pool temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_temperature: Option<f64>,
}

impl Scenario {
    /// 64QAM, 128 × 4 antennas, 20 MHz, 298.15 K noise, 10 dB per-branch SNR,
    /// ψ = 0.2, 100 noise bits per branch.
    pub fn table1() -> Self {
        let mut s = Self {
            n_t: 128,
            n_r: 4,
            bandwidth: 20e6,
            symbol_period: 1.0 / 20e6,
            modulation: Modulation::Qam64,
            total_signal_power: 0.0,
            coding_overhead: 0.2,
            noise_temperature: 298.15,
            noise_dof: 100.0,
            noise_pool_temperature: 298.15,
            channel_mode: ChannelMode::UnitGain,
            output_temperature: None,
        };
        s.set_branch_snr_db(10.0);
        s
    }

    pub fn subchannels(&self) -> usize {
        self.n_t.min(self.n_r)
    }

    /// Thermal noise power per branch, `k_B T_N B`.
    pub fn noise_power(&self) -> f64 {
        BOLTZMANN * self.noise_temperature * self.bandwidth
    }

    /// Sets the total signal power so each branch sees `S_i / N_i = 10^(db/10)`
    /// before FEC power and channel gains.
    pub fn set_branch_snr_db(&mut self, db: f64) {
        let per_branch = 10f64.powf(db / 10.0) * self.noise_power();
        self.total_signal_power = per_branch * self.subchannels() as f64;
    }

    pub fn branch_snr_db(&self) -> f64 {
        let per_branch = self.total_signal_power / self.subchannels() as f64;
        10.0 * (per_branch / self.noise_power()).log10()
    }

    pub fn output_temperature(&self) -> f64 {
        self.output_temperature
            .unwrap_or(self.noise_pool_temperature)
    }

    pub fn validate(&self) -> Result<()> {
        check_dims(self.n_t, self.n_r)?;
        for (what, v) in [
            ("bandwidth", self.bandwidth),
            ("symbol period", self.symbol_period),
            ("total signal power", self.total_signal_power),
            ("noise temperature", self.noise_temperature),
            ("noise-pool temperature", self.noise_pool_temperature),
        ] {
            require_positive(what, v)?;
            if !v.is_finite() {
                return Err(Error::validation(what, "must be finite"));
            }
        }
        require_positive("noise degrees of freedom", self.noise_dof)?;
        require_nonnegative("coding overhead", self.coding_overhead)?;
        if !self.coding_overhead.is_finite() {
            return Err(Error::validation("coding overhead", "must be finite"));
        }
        if let Some(t) = self.output_temperature {
            require_positive("output temperature", t)?;
        }
        Ok(())
    }
}

/// Expands a scenario into per-branch parameters. Rayleigh mode draws the
/// channel from its seed and scales each branch's received powers by `λ²`.
pub fn scenario_to_link_spec(s: &Scenario) -> Result<LinkSpec> {
    s.validate()?;
    match s.channel_mode {
        ChannelMode::UnitGain => link_spec_with_gains(s, None),
        ChannelMode::Rayleigh { seed } => {
            let gains = eigenmode_gains(&generate_channel(s.n_t, s.n_r, seed)?);
            link_spec_with_gains(s, Some(&gains))
        }
    }
}

/// Builds branches with explicit eigenmode gains (`None` means unit gains).
///
/// Branch temperatures come from the transmitted share of power; gains only
/// scale the received signal and FEC powers.
pub fn link_spec_with_gains(s: &Scenario, gains: Option<&[f64]>) -> Result<LinkSpec> {
    s.validate()?;
    let n = s.subchannels();
    if let Some(g) = gains {
        if g.len() != n {
            return Err(Error::validation(
                "eigenmode gains",
                format!("{} gains for {n} branches", g.len()),
            ));
        }
    }
    let tau = s.symbol_period;
    let psi = s.coding_overhead;
    let share = s.total_signal_power / n as f64;
    // The last branch takes the remainder so a left-to-right sum of the
    // branch powers reproduces the total exactly.
    let head: f64 = (1..n).fold(0.0, |acc, _| acc + share);
    let last_share = s.total_signal_power - head;
    let signal_dof = s.modulation.bits_per_symbol() as f64 * s.bandwidth * tau;
    let fec_dof = psi * signal_dof;
    let noise_power = s.noise_power();

    let branches = (0..n)
        .map(|i| {
            let tx_signal = if i + 1 == n { last_share } else { share };
            let tx_fec = psi * tx_signal;
            let signal_temperature =
                (tx_signal + tx_fec) * tau / (BIT_FACTOR * (signal_dof + fec_dof));
            let power_gain = gains.map_or(1.0, |g| g[i] * g[i]);
            BranchParams {
                signal_power: power_gain * tx_signal,
                fec_power: power_gain * tx_fec,
                noise_power,
                signal_dof,
                fec_dof,
                noise_dof: s.noise_dof,
                signal_temperature,
                noise_temperature: s.noise_temperature,
            }
        })
        .collect();
    LinkSpec::new(s.bandwidth, tau, branches, s.n_t, s.n_r)
}
