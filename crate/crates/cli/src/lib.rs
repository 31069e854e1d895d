//! Command-line front end for the `thermimo` model.
//!
//! Exit codes: 0 success, 2 config or usage error, 3 domain error, 4 I/O error.
//! `THERMIMO_THREADS` sets the number of worker threads used by sweeps.

pub mod config;
pub mod output;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thermimo::{
    fig4_spec, fig5_spec, run_sweep, CapacityOptions, ChannelMode, Modulation, SweepOutput,
    SweepSpec, SweepVariable,
};

use crate::config::{ConfigFile, GridRange, Preset, ScenarioOverrides, SweepSection};
use crate::output::{partial_path, render_sweep, write_atomic, DataFormat};

pub const THREADS_ENV: &str = "THERMIMO_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<thermimo::Error> for CliError {
    fn from(e: thermimo::Error) -> Self {
        if e.is_validation() {
            CliError::Config(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thermimo",
    version,
    about = "Thermodynamic capacity of massive-MIMO links"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermodynamic capacity, its bounds and the Shannon reference.
    Capacity {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// Report zero instead of a negative capacity.
        #[arg(long)]
        clamp_negative: bool,
    },
    /// Decode efficiency and energy dissipated per bit.
    Energy {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Sweep described by the config's [sweep] table and/or flags.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Capacity against noise degrees of freedom, 1 to 10^6 bits.
    Fig4 {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Capacity and bounds against coding overhead, 0 to 2.
    Fig5 {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// TOML config file.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// Parameter preset for keys the config leaves out.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long = "nt")]
    pub n_t: Option<usize>,
    #[arg(long = "nr")]
    pub n_r: Option<usize>,
    /// Hz.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Symbol period in seconds.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, value_parser = parse_modulation)]
    pub modulation: Option<Modulation>,
    /// Per-branch S/N in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Total signal power in W.
    #[arg(long)]
    pub signal_power: Option<f64>,
    /// Coding overhead ψ = M_FEC / M_S.
    #[arg(long)]
    pub psi: Option<f64>,
    /// Noise temperature in K.
    #[arg(long)]
    pub noise_temp: Option<f64>,
    /// Noise degrees of freedom per branch; `inf` allowed.
    #[arg(long)]
    pub noise_dof: Option<f64>,
    /// Noise-pool temperature in K.
    #[arg(long)]
    pub t_lo: Option<f64>,
    /// Decoded output temperature in K.
    #[arg(long)]
    pub output_temp: Option<f64>,
    /// Use an i.i.d. Rayleigh channel drawn from this seed.
    #[arg(long)]
    pub rayleigh_seed: Option<u64>,
}

fn parse_modulation(s: &str) -> Result<Modulation, String> {
    let v = s.to_ascii_lowercase();
    match v.as_str() {
        "bpsk" => Ok(Modulation::Bpsk),
        "qpsk" => Ok(Modulation::Qpsk),
        "16qam" => Ok(Modulation::Qam16),
        "64qam" => Ok(Modulation::Qam64),
        "256qam" => Ok(Modulation::Qam256),
        _ => Err(format!("unknown modulation {s:?}")),
    }
}

impl ScenarioArgs {
    fn overrides(&self) -> ScenarioOverrides {
        ScenarioOverrides {
            n_t: self.n_t,
            n_r: self.n_r,
            bandwidth_hz: self.bandwidth,
            symbol_period_s: self.tau,
            modulation: self.modulation,
            snr_db: self.snr_db,
            total_signal_power_w: self.signal_power,
            coding_overhead: self.psi,
            noise_temperature_k: self.noise_temp,
            noise_dof: self.noise_dof,
            noise_pool_temperature_k: self.t_lo,
            output_temperature_k: self.output_temp,
            channel: self
                .rayleigh_seed
                .map(|seed| ChannelMode::Rayleigh { seed }),
        }
    }

    fn load(&self) -> Result<ConfigFile, CliError> {
        let mut cfg = match &self.config {
            Some(path) => config::load_config(path)?,
            None => ConfigFile::default(),
        };
        if let Some(p) = self.preset {
            cfg.defaults = p;
        }
        cfg.scenario = cfg.scenario.merged(&self.overrides());
        Ok(cfg)
    }

    pub fn resolve(&self) -> Result<thermimo::Scenario, CliError> {
        let cfg = self.load()?;
        cfg.scenario.resolve(cfg.defaults)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_variable)]
    pub variable: Option<SweepVariable>,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["log_grid", "linear_grid"])]
    pub grid: Option<Vec<f64>>,
    /// START:STOP:POINTS, log-spaced.
    #[arg(long, value_parser = parse_range, conflicts_with = "linear_grid")]
    pub log_grid: Option<GridRange>,
    /// START:STOP:POINTS, evenly spaced.
    #[arg(long, value_parser = parse_range)]
    pub linear_grid: Option<GridRange>,
    /// Comma-separated subset of thermo, shannon, lower_bound, upper_bound, energy_per_bit.
    #[arg(long, value_delimiter = ',', value_parser = parse_output)]
    pub outputs: Option<Vec<SweepOutput>>,
}

fn parse_variable(s: &str) -> Result<SweepVariable, String> {
    match s {
        "noise_dof" => Ok(SweepVariable::NoiseDof),
        "coding_overhead" | "psi" => Ok(SweepVariable::CodingOverhead),
        _ => Err(format!("unknown sweep variable {s:?}")),
    }
}

fn parse_output(s: &str) -> Result<SweepOutput, String> {
    match s {
        "thermo" => Ok(SweepOutput::Thermo),
        "shannon" => Ok(SweepOutput::Shannon),
        "lower_bound" => Ok(SweepOutput::LowerBound),
        "upper_bound" => Ok(SweepOutput::UpperBound),
        "energy_per_bit" => Ok(SweepOutput::EnergyPerBit),
        _ => Err(format!("unknown sweep output {s:?}")),
    }
}

fn parse_range(s: &str) -> Result<GridRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected START:STOP:POINTS, got {s:?}"));
    }
    let f = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok(GridRange {
        start: f(parts[0])?,
        stop: f(parts[1])?,
        points: parts[2]
            .parse()
            .map_err(|e| format!("{:?}: {e}", parts[2]))?,
    })
}

impl SweepArgs {
    fn section(&self) -> SweepSection {
        SweepSection {
            variable: self.variable,
            grid: self.grid.clone(),
            log_grid: self.log_grid,
            linear_grid: self.linear_grid,
            outputs: self.outputs.clone(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file.
    #[arg(long, short = 'o')]
    pub out: PathBuf,
    /// Defaults to JSON for a `.json` path and CSV otherwise.
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    // A pool may already exist when called more than once in one process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn write_sweep(spec: &SweepSpec, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = out
        .format
        .unwrap_or_else(|| DataFormat::from_path(&out.out));
    match run_sweep(spec) {
        Ok(records) => {
            write_atomic(&out.out, &render_sweep(format, spec, &records)?)?;
            let _ = writeln!(
                stdout,
                "wrote {} rows to {}",
                records.len(),
                out.out.display()
            );
            Ok(())
        }
        Err(err) => {
            let partial = partial_path(&out.out);
            write_atomic(&partial, &render_sweep(format, spec, &err.completed)?)?;
            Err(CliError::Domain(format!(
                "{err}; partial results in {}",
                partial.display()
            )))
        }
    }
}

fn print(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Io(e.to_string()))
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Capacity {
            scenario,
            format,
            clamp_negative,
        } => {
            let report =
                report::capacity_report(scenario.resolve()?, CapacityOptions { clamp_negative })?;
            match format {
                ReportFormat::Text => print(stdout, &report.to_text()),
                ReportFormat::Json => print(stdout, &json(&report)?),
            }
        }
        Command::Energy { scenario, format } => {
            let report = report::energy_report(scenario.resolve()?)?;
            match format {
                ReportFormat::Text => print(stdout, &report.to_text()),
                ReportFormat::Json => print(stdout, &json(&report)?),
            }
        }
        Command::Sweep {
            scenario,
            sweep,
            out,
        } => {
            let cfg = scenario.load()?;
            let base = cfg.scenario.resolve(cfg.defaults)?;
            let section = cfg.sweep.unwrap_or_default().merged(&sweep.section());
            let spec = section.to_spec(base)?;
            write_sweep(&spec, &out, stdout)
        }
        Command::Fig4 { scenario, out } => {
            write_sweep(&fig4_spec(scenario.resolve()?), &out, stdout)
        }
        Command::Fig5 { scenario, out } => {
            write_sweep(&fig5_spec(scenario.resolve()?), &out, stdout)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
