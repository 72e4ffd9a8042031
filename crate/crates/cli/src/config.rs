//! Scenario configuration: a TOML file with optional `--set key=value`
//! overrides, resolved into a [`SingleModeSetup`].
//!
//! Every rate is in units of the TLS frequency `omega_B`, which defaults to 1.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tlsbath::bath::{BathEnvironment, TlsParams};
use tlsbath::presets;
use tlsbath::rates::{ModeParams, SingleModeSetup};
use tlsbath::Complex64;

use crate::error::CliError;

/// A real number or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([a, b]) => Complex64::new(a, b),
        }
    }

    fn is_finite(self) -> bool {
        let z = self.value();
        z.re.is_finite() && z.im.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Environment {
    pub temperature: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            temperature: presets::TEMPERATURE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mode {
    #[serde(rename = "Delta_0")]
    pub delta_0: f64,
    pub gamma_0: f64,
    #[serde(rename = "Omega_0")]
    pub omega_0: ComplexValue,
}

impl Default for Mode {
    fn default() -> Self {
        Self {
            delta_0: 0.0,
            gamma_0: presets::GAMMA_0,
            omega_0: ComplexValue::Real(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tls {
    pub count: usize,
    #[serde(rename = "omega_B")]
    pub omega_b: f64,
    #[serde(rename = "Delta_B")]
    pub delta_b: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(rename = "Omega_B")]
    pub omega_drive: ComplexValue,
    #[serde(rename = "G")]
    pub coupling: ComplexValue,
}

impl Default for Tls {
    fn default() -> Self {
        Self {
            count: presets::TLS_COUNT,
            omega_b: presets::OMEGA_B,
            delta_b: 0.0,
            kappa1: presets::KAPPA1,
            kappa2: presets::KAPPA2,
            omega_drive: ComplexValue::Real(0.0),
            coupling: ComplexValue::Real(presets::COUPLING),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "Omega_B")]
    OmegaB,
    #[serde(rename = "Delta_B")]
    DeltaB,
    #[serde(rename = "Delta_0")]
    Delta0,
    #[serde(rename = "gamma_0")]
    Gamma0,
    #[serde(rename = "tau")]
    Tau,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::OmegaB => "Omega_B",
            SweepVariable::DeltaB => "Delta_B",
            SweepVariable::Delta0 => "Delta_0",
            SweepVariable::Gamma0 => "gamma_0",
            SweepVariable::Tau => "tau",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub scale: Spacing,
}

impl Sweep {
    pub fn new(variable: SweepVariable, min: f64, max: f64, count: usize, scale: Spacing) -> Self {
        Self {
            variable,
            min,
            max,
            count,
            scale,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let (lo, hi) = match self.scale {
            Spacing::Linear => (self.min, self.max),
            Spacing::Log => (self.min.ln(), self.max.ln()),
        };
        (0..n)
            .map(|k| {
                if k == 0 {
                    return self.min;
                }
                if k + 1 == n {
                    return self.max;
                }
                let x = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                match self.scale {
                    Spacing::Linear => x,
                    Spacing::Log => x.exp(),
                }
            })
            .map(|x| x.clamp(self.min, self.max))
            .collect()
    }

    fn validate(&self, section: &str) -> Result<(), CliError> {
        let err =
            |field: &str, msg: String| Err(CliError::config(format!("{section}.{field}"), msg));
        if self.count < 2 {
            return err("count", format!("must be at least 2, got {}", self.count));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return err("min", "sweep bounds must be finite".into());
        }
        if self.min >= self.max {
            return err(
                "max",
                format!("must exceed min ({} >= {})", self.min, self.max),
            );
        }
        if self.scale == Spacing::Log && self.min <= 0.0 {
            return err(
                "min",
                format!("log sweeps need a positive lower bound, got {}", self.min),
            );
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Oracle {
    /// Number of TLS in the exact model; the coupling is rescaled so that
    /// `N G²` matches the configured bath.
    pub n_tls: usize,
    pub fock_start: usize,
    pub dim_cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            n_tls: 1,
            fock_start: 8,
            dim_cap: tlsbath::oracle::DEFAULT_DIM_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub environment: Environment,
    pub mode: Mode,
    pub tls: Tls,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_y: Option<Sweep>,
    pub oracle: Oracle,
    pub output: Output,
}

impl Config {
    /// Reads `path` (if any), applies the overrides in order and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::config(p.display().to_string(), format!("cannot read: {e}"))
                })?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::config(p.display().to_string(), e.to_string()))?
            }
            None => toml::Table::new(),
        };
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::config(item.clone(), "expected key=value".into()))?;
            set_path(&mut table, key.trim(), parse_value(value.trim()))?;
        }
        let config: Config =
            serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
                let path = e.path().to_string();
                let message = e.into_inner().to_string();
                CliError::config(path, message.lines().next().unwrap_or_default().to_string())
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let finite = [
            ("environment.temperature", self.environment.temperature),
            ("mode.Delta_0", self.mode.delta_0),
            ("mode.gamma_0", self.mode.gamma_0),
            ("tls.omega_B", self.tls.omega_b),
            ("tls.Delta_B", self.tls.delta_b),
            ("tls.kappa1", self.tls.kappa1),
            ("tls.kappa2", self.tls.kappa2),
        ];
        for (path, x) in finite {
            if !x.is_finite() {
                return Err(CliError::config(path, format!("must be finite, got {x}")));
            }
        }
        for (path, z) in [
            ("mode.Omega_0", self.mode.omega_0),
            ("tls.Omega_B", self.tls.omega_drive),
            ("tls.G", self.tls.coupling),
        ] {
            if !z.is_finite() {
                return Err(CliError::config(path, "must be finite".into()));
            }
        }
        if self.tls.count == 0 {
            return Err(CliError::config("tls.count", "must be at least 1".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate("sweep")?;
        }
        if let Some(s) = &self.sweep_y {
            s.validate("sweep_y")?;
            if s.variable == SweepVariable::Tau {
                return Err(CliError::config(
                    "sweep_y.variable",
                    "tau cannot be a map axis".into(),
                ));
            }
        }
        if self.oracle.n_tls == 0 || self.oracle.n_tls > tlsbath::oracle::MAX_TLS {
            return Err(CliError::config(
                "oracle.n_tls",
                format!("must be between 1 and {}", tlsbath::oracle::MAX_TLS),
            ));
        }
        let omega_d = self.tls.omega_b - self.tls.delta_b;
        let checks = [
            (
                "environment.temperature",
                self.environment.temperature >= 0.0,
                "must be non-negative",
            ),
            (
                "mode.gamma_0",
                self.mode.gamma_0 >= 0.0,
                "must be non-negative",
            ),
            ("tls.omega_B", self.tls.omega_b > 0.0, "must be positive"),
            ("tls.kappa1", self.tls.kappa1 > 0.0, "must be positive"),
            ("tls.kappa2", self.tls.kappa2 >= 0.0, "must be non-negative"),
            (
                "tls.Delta_B",
                omega_d > 0.0,
                "must leave a positive drive frequency omega_B - Delta_B",
            ),
            (
                "mode.Delta_0",
                omega_d + self.mode.delta_0 > 0.0,
                "must leave a positive mode frequency",
            ),
        ];
        for (path, ok, msg) in checks {
            if !ok {
                return Err(CliError::config(path, msg.into()));
            }
        }
        let setup = self.setup();
        setup
            .env
            .validate()
            .and(setup.mode.validate())
            .and(setup.bath().validate())
            .map_err(|e| CliError::config("tls", e.to_string()))
    }

    /// Physical setup at the configured (unswept) point.
    pub fn setup(&self) -> SingleModeSetup {
        let omega_d = self.tls.omega_b - self.tls.delta_b;
        SingleModeSetup {
            env: BathEnvironment {
                temperature: self.environment.temperature,
                omega_d,
            },
            mode: ModeParams {
                omega: omega_d + self.mode.delta_0,
                gamma: self.mode.gamma_0,
                drive: self.mode.omega_0.value(),
            },
            count: self.tls.count,
            tls: TlsParams {
                omega_b: self.tls.omega_b,
                kappa1: self.tls.kappa1,
                kappa2: self.tls.kappa2,
                drive: self.tls.omega_drive.value(),
                couplings: vec![self.tls.coupling.value()],
            },
        }
    }

    /// Fully resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// Applies a sweep value to a setup. The bath drive keeps its configured
/// phase.
pub fn apply(setup: &SingleModeSetup, variable: SweepVariable, x: f64) -> SingleModeSetup {
    let s = setup.clone();
    match variable {
        SweepVariable::OmegaB => {
            let d = s.tls.drive;
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            s.with_drive(phase * x)
        }
        SweepVariable::DeltaB => s.with_delta_b(x),
        SweepVariable::Delta0 => s.with_delta_0(x),
        SweepVariable::Gamma0 => s.with_gamma_0(x),
        SweepVariable::Tau => s,
    }
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<(), CliError> {
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::config(key, "empty key segment".into()));
    }
    let mut cur = table;
    for (k, part) in parts.iter().enumerate() {
        if k + 1 == parts.len() {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => {
                return Err(CliError::config(
                    parts[..=k].join("."),
                    "is a value, not a section".into(),
                ))
            }
        };
    }
    Ok(())
}
