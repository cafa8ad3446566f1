//! Scenario configuration: a strict TOML schema with defaults.

use crate::dynamics::{DynamicsOptions, Mode};
use crate::error::{Error, Result};
use crate::model::{ReservoirSpec, SystemParams};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default = "d_h")]
    pub h: f64,
    #[serde(default = "d_delta")]
    pub delta: f64,
    #[serde(default = "d_omega")]
    pub omega: f64,
    #[serde(default = "d_x12")]
    pub x12: f64,
}

fn d_h() -> f64 {
    0.1
}
fn d_delta() -> f64 {
    1e-3
}
fn d_omega() -> f64 {
    8f64.sqrt()
}
fn d_x12() -> f64 {
    1.0
}

impl Default for SystemSection {
    fn default() -> Self {
        SystemSection {
            h: d_h(),
            delta: d_delta(),
            omega: d_omega(),
            x12: d_x12(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirSection {
    #[serde(default = "d_s")]
    pub s: f64,
    #[serde(default = "d_j")]
    pub j: f64,
    #[serde(default = "d_lambda")]
    pub lambda: f64,
}

fn d_s() -> f64 {
    1.0
}
fn d_j() -> f64 {
    1e-4
}
fn d_lambda() -> f64 {
    10.0
}

impl Default for ReservoirSection {
    fn default() -> Self {
        ReservoirSection {
            s: d_s(),
            j: d_j(),
            lambda: d_lambda(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// Defaults to `3/(Γ₂,A + Γ₂,B)`.
    pub t_max: Option<f64>,
    #[serde(default = "d_points")]
    pub n_points: usize,
}

fn d_points() -> usize {
    500
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            t_max: None,
            n_points: d_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSection {
    pub t_star: f64,
    pub t_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "d_path")]
    pub path: String,
    #[serde(default)]
    pub format: Format,
}

fn d_path() -> String {
    "out".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            path: d_path(),
            format: Format::Csv,
        }
    }
}

fn d_mode() -> Mode {
    Mode::Nonstationary
}
fn d_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub reservoir_a: ReservoirSection,
    #[serde(default)]
    pub reservoir_b: ReservoirSection,
    #[serde(default = "d_mode")]
    pub mode: Mode,
    #[serde(default)]
    pub time: TimeSection,
    pub scan: Option<ScanSection>,
    pub correlation: Option<CorrelationSection>,
    #[serde(default = "d_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    #[serde(default)]
    pub vacuum: crate::dynamics::VacuumMode,
    #[serde(default = "d_true")]
    pub resummed: bool,
    #[serde(default = "d_true")]
    pub double_sector: bool,
}

fn d_true() -> bool {
    true
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection {
            vacuum: Default::default(),
            resummed: true,
            double_sector: true,
        }
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            system: Default::default(),
            reservoir_a: Default::default(),
            reservoir_b: Default::default(),
            mode: d_mode(),
            time: Default::default(),
            scan: None,
            correlation: None,
            tolerance: d_tol(),
            dynamics: Default::default(),
            output: Default::default(),
        }
    }
}

fn relabel(e: Error, prefix: &str) -> Error {
    match e {
        Error::Domain { field, msg } => Error::config(format!("{prefix}.{field}"), msg),
        other => other,
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<root>", e.message().to_string()))?;
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path.is_empty() || path == "." { "<root>".into() } else { path }, e.inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn system(&self) -> Result<SystemParams> {
        let s = SystemParams {
            h: self.system.h,
            delta: self.system.delta,
            omega: self.system.omega,
            x12: self.system.x12,
        };
        s.validate().map_err(|e| relabel(e, "system"))?;
        Ok(s)
    }

    pub fn reservoirs(&self) -> Result<(ReservoirSpec, ReservoirSpec)> {
        let mk = |r: &ReservoirSection, name: &str| {
            let spec = ReservoirSpec {
                s: r.s,
                j: r.j,
                lambda: r.lambda,
            };
            spec.validate().map_err(|e| relabel(e, name)).map(|_| spec)
        };
        Ok((mk(&self.reservoir_a, "reservoir_a")?, mk(&self.reservoir_b, "reservoir_b")?))
    }

    pub fn dynamics_options(&self) -> DynamicsOptions {
        DynamicsOptions {
            vacuum: self.dynamics.vacuum,
            resummed: self.dynamics.resummed,
            double_sector: self.dynamics.double_sector,
            tolerance: self.tolerance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system()?;
        self.reservoirs()?;
        if !(self.tolerance > 0.0 && self.tolerance <= 1e-3) {
            return Err(Error::config("tolerance", "must lie in (0, 1e-3]"));
        }
        if let Some(t) = self.time.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::config("time.t_max", "must be positive"));
            }
        }
        if self.time.n_points < 2 {
            return Err(Error::config("time.n_points", "need at least 2 points"));
        }
        if let Some(s) = &self.scan {
            if s.n_z == 0 {
                return Err(Error::config("scan.n_z", "must be positive"));
            }
            if !(s.z_max >= s.z_min) {
                return Err(Error::config("scan.z_max", "must be >= z_min"));
            }
            if !(s.z_min >= 0.0 && 1.0 - 0.5 * s.z_max > 0.0) {
                return Err(Error::config("scan.z_max", "type parameters 1 -/+ z/2 must stay positive"));
            }
        }
        if let Some(c) = &self.correlation {
            if !(c.t_star >= 0.0 && c.t_max > c.t_star) {
                return Err(Error::config("correlation.t_max", "need 0 <= t_star < t_max"));
            }
            if c.n_points < 3 {
                return Err(Error::config("correlation.n_points", "need at least 3 points"));
            }
        }
        Ok(())
    }
}

/// Exit code for a given error: 2 for configuration/domain problems, 3 for
/// numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Domain { .. } | Error::DivergentMoment(_) => 2,
        _ => 3,
    }
}
