//! Config files and command-line overrides.
//!
//! A config file is TOML. Every key is optional; missing keys come from the
//! preset named by `defaults` (only `"table1"` exists). Unknown keys are
//! rejected.
//!
//! ```toml
//! defaults = "table1"
//!
//! [scenario]
//! n_t = 128
//! n_r = 4
//! bandwidth_hz = 20e6
//! symbol_period_s = 5e-8        # defaults to 1 / bandwidth_hz
//! modulation = "64qam"
//! snr_db = 10.0                 # per-branch S/N, or give total_signal_power_w
//! coding_overhead = 0.2
//! noise_temperature_k = 298.15
//! noise_dof = 100.0             # `inf` is allowed
//! noise_pool_temperature_k = 298.15
//! output_temperature_k = 298.15 # defaults to the noise-pool temperature
//! channel = "unit_gain"         # or { rayleigh = { seed = 7 } }
//!
//! [sweep]
//! variable = "noise_dof"        # or "coding_overhead"
//! log_grid = { start = 1.0, stop = 1e6, points = 61 }
//! # linear_grid = { start = 0.0, stop = 2.0, points = 41 }
//! # grid = [1.0, 10.0, 100.0]
//! outputs = ["thermo", "shannon", "lower_bound", "upper_bound"]
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thermimo::sweep::{linear_grid, log_grid};
use thermimo::{ChannelMode, Modulation, Scenario, SweepOutput, SweepSpec, SweepVariable};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Table1,
}

impl Preset {
    pub fn scenario(self) -> Scenario {
        match self {
            Preset::Table1 => Scenario::table1(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub defaults: Preset,
    #[serde(default)]
    pub scenario: ScenarioOverrides,
    pub sweep: Option<SweepSection>,
}

/// Scenario fields that a config file or the command line may set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverrides {
    pub n_t: Option<usize>,
    pub n_r: Option<usize>,
    pub bandwidth_hz: Option<f64>,
    pub symbol_period_s: Option<f64>,
    pub modulation: Option<Modulation>,
    pub snr_db: Option<f64>,
    pub total_signal_power_w: Option<f64>,
    pub coding_overhead: Option<f64>,
    pub noise_temperature_k: Option<f64>,
    pub noise_dof: Option<f64>,
    pub noise_pool_temperature_k: Option<f64>,
    pub output_temperature_k: Option<f64>,
    pub channel: Option<ChannelMode>,
}

impl ScenarioOverrides {
    /// Fields set in `other` win.
    pub fn merged(mut self, other: &ScenarioOverrides) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            n_t,
            n_r,
            bandwidth_hz,
            symbol_period_s,
            modulation,
            snr_db,
            total_signal_power_w,
            coding_overhead,
            noise_temperature_k,
            noise_dof,
            noise_pool_temperature_k,
            output_temperature_k,
            channel
        );
        // Power given one way replaces power given the other way.
        if other.snr_db.is_some() && other.total_signal_power_w.is_none() {
            self.total_signal_power_w = None;
        }
        if other.total_signal_power_w.is_some() && other.snr_db.is_none() {
            self.snr_db = None;
        }
        self
    }

    pub fn resolve(&self, preset: Preset) -> Result<Scenario, CliError> {
        if self.snr_db.is_some() && self.total_signal_power_w.is_some() {
            return Err(CliError::Config(
                "give either snr_db or total_signal_power_w, not both".into(),
            ));
        }
        let mut s = preset.scenario();
        let preset_snr_db = s.branch_snr_db();
        if let Some(v) = self.n_t {
            s.n_t = v;
        }
        if let Some(v) = self.n_r {
            s.n_r = v;
        }
        if let Some(v) = self.bandwidth_hz {
            s.bandwidth = v;
            s.symbol_period = 1.0 / v;
        }
        if let Some(v) = self.symbol_period_s {
            s.symbol_period = v;
        }
        if let Some(v) = self.modulation {
            s.modulation = v;
        }
        if let Some(v) = self.coding_overhead {
            s.coding_overhead = v;
        }
        if let Some(v) = self.noise_temperature_k {
            s.noise_temperature = v;
        }
        if let Some(v) = self.noise_dof {
            s.noise_dof = v;
        }
        if let Some(v) = self.noise_pool_temperature_k {
            s.noise_pool_temperature = v;
        }
        if let Some(v) = self.output_temperature_k {
            s.output_temperature = Some(v);
        }
        if let Some(v) = self.channel {
            s.channel_mode = v;
        }
        match (self.total_signal_power_w, self.snr_db) {
            (Some(p), _) => s.total_signal_power = p,
            (None, snr) if s.n_t > 0 && s.n_r > 0 => {
                s.set_branch_snr_db(snr.unwrap_or(preset_snr_db))
            }
            _ => {}
        }
        s.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: Option<SweepVariable>,
    pub grid: Option<Vec<f64>>,
    pub log_grid: Option<GridRange>,
    pub linear_grid: Option<GridRange>,
    pub outputs: Option<Vec<SweepOutput>>,
}

pub fn default_outputs() -> BTreeSet<SweepOutput> {
    [
        SweepOutput::Thermo,
        SweepOutput::Shannon,
        SweepOutput::LowerBound,
        SweepOutput::UpperBound,
    ]
    .into()
}

impl SweepSection {
    pub fn merged(mut self, other: &SweepSection) -> Self {
        if other.variable.is_some() {
            self.variable = other.variable;
        }
        if other.grid.is_some() || other.log_grid.is_some() || other.linear_grid.is_some() {
            self.grid = other.grid.clone();
            self.log_grid = other.log_grid;
            self.linear_grid = other.linear_grid;
        }
        if other.outputs.is_some() {
            self.outputs = other.outputs.clone();
        }
        self
    }

    pub fn to_spec(&self, base: Scenario) -> Result<SweepSpec, CliError> {
        let variable = self
            .variable
            .ok_or_else(|| CliError::Config("sweep variable is not set".into()))?;
        let given = [
            self.grid.is_some(),
            self.log_grid.is_some(),
            self.linear_grid.is_some(),
        ];
        let grid = match given.iter().filter(|&&g| g).count() {
            0 => return Err(CliError::Config("sweep grid is not set".into())),
            1 => {
                if let Some(g) = &self.grid {
                    g.clone()
                } else if let Some(r) = self.log_grid {
                    if !(r.start > 0.0 && r.stop > 0.0) {
                        return Err(CliError::Config("log_grid bounds must be > 0".into()));
                    }
                    log_grid(r.start, r.stop, r.points)
                } else {
                    let r = self.linear_grid.expect("one grid form is set");
                    linear_grid(r.start, r.stop, r.points)
                }
            }
            _ => {
                return Err(CliError::Config(
                    "give exactly one of grid, log_grid, linear_grid".into(),
                ))
            }
        };
        let outputs = match &self.outputs {
            Some(o) => o.iter().copied().collect(),
            None => default_outputs(),
        };
        let spec = SweepSpec {
            base,
            variable,
            grid,
            outputs,
        };
        spec.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

/// Quotes a bare preset name in a top-level `defaults = table1` line, which
/// strict TOML would reject. Line numbers are unchanged.
fn quote_bare_defaults(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    let mut top_level = true;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.starts_with('[') {
            top_level = false;
        }
        let bare = top_level
            .then(|| trimmed.split_once('='))
            .flatten()
            .filter(|(k, _)| k.trim() == "defaults")
            .map(|(_, v)| v.trim())
            .filter(|v| !v.is_empty() && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'));
        match bare {
            Some(v) => {
                out.push_str(&format!("defaults = \"{v}\""));
                if line.ends_with('\n') {
                    out.push('\n');
                }
            }
            None => out.push_str(line),
        }
    }
    out
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    toml::from_str(&quote_bare_defaults(text)).map_err(|e| CliError::Config(format!("config: {e}")))
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_table1() {
        let cfg = parse_config("").unwrap();
        assert_eq!(
            cfg.scenario.resolve(cfg.defaults).unwrap(),
            Scenario::table1()
        );
        let cfg = parse_config("defaults = \"table1\"\n").unwrap();
        assert_eq!(
            cfg.scenario.resolve(cfg.defaults).unwrap(),
            Scenario::table1()
        );
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = parse_config("defaults = \"table1\"\n[scenario]\nn_tx = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("column"), "{msg}");
        assert!(msg.contains("n_tx"), "{msg}");
    }

    #[test]
    fn bare_preset_name_is_accepted() {
        let cfg = parse_config("defaults = table1\n[scenario]\nn_t = 8\n").unwrap();
        assert_eq!(cfg.defaults, Preset::Table1);
        assert!(parse_config("defaults = table2\n").is_err());
        assert!(parse_config("[scenario]\ndefaults = table1\n").is_err());
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(parse_config("defaults = \"table2\"").is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let msg = parse_config("[scenario]\nn_t = = 4\n")
            .unwrap_err()
            .to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn scenario_keys_apply() {
        let cfg = parse_config(
            r#"
            [scenario]
            n_t = 8
            n_r = 2
            bandwidth_hz = 1e6
            modulation = "16qam"
            snr_db = 20
            coding_overhead = 0.5
            noise_dof = inf
            channel = { rayleigh = { seed = 9 } }
            "#,
        )
        .unwrap();
        let s = cfg.scenario.resolve(cfg.defaults).unwrap();
        assert_eq!((s.n_t, s.n_r), (8, 2));
        assert_eq!(s.symbol_period, 1e-6);
        assert_eq!(s.modulation, Modulation::Qam16);
        assert!((s.branch_snr_db() - 20.0).abs() < 1e-9);
        assert!(s.noise_dof.is_infinite());
        assert_eq!(s.channel_mode, ChannelMode::Rayleigh { seed: 9 });
    }

    #[test]
    fn power_and_snr_conflict() {
        let cfg = parse_config("[scenario]\nsnr_db = 3\ntotal_signal_power_w = 1e-9\n").unwrap();
        assert!(matches!(
            cfg.scenario.resolve(cfg.defaults),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn command_line_power_replaces_config_snr() {
        let file = ScenarioOverrides {
            snr_db: Some(3.0),
            ..Default::default()
        };
        let flags = ScenarioOverrides {
            total_signal_power_w: Some(1e-9),
            ..Default::default()
        };
        let s = file.merged(&flags).resolve(Preset::Table1).unwrap();
        assert_eq!(s.total_signal_power, 1e-9);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let cfg = parse_config("[scenario]\nn_r = 0\n").unwrap();
        assert!(matches!(
            cfg.scenario.resolve(cfg.defaults),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn sweep_section_builds_spec() {
        let cfg = parse_config(
            "[sweep]\nvariable = \"coding_overhead\"\nlinear_grid = { start = 0.0, stop = 1.0, points = 11 }\noutputs = [\"thermo\"]\n",
        )
        .unwrap();
        let spec = cfg.sweep.unwrap().to_spec(Scenario::table1()).unwrap();
        assert_eq!(spec.grid.len(), 11);
        assert_eq!(spec.variable, SweepVariable::CodingOverhead);
        assert_eq!(spec.outputs, [SweepOutput::Thermo].into());
    }

    #[test]
    fn sweep_needs_exactly_one_grid() {
        let both = SweepSection {
            variable: Some(SweepVariable::NoiseDof),
            grid: Some(vec![1.0]),
            log_grid: Some(GridRange {
                start: 1.0,
                stop: 10.0,
                points: 2,
            }),
            ..Default::default()
        };
        assert!(both.to_spec(Scenario::table1()).is_err());
        let none = SweepSection {
            variable: Some(SweepVariable::NoiseDof),
            ..Default::default()
        };
        assert!(none.to_spec(Scenario::table1()).is_err());
    }
}
