//! Run configuration: a single JSON object, parsed strictly.
//!
//! ```json
//! {
//!   "mode": "readout",
//!   "groups": {"kappa_c": 2, "r": 10, "omega_T": 0.5},
//!   "grid": {"n_time": 512, "n_space": 512},
//!   "scan": {"from": 0, "to": 2, "points": 21}
//! }
//! ```
//!
//! Exactly one of `groups` (dimensionless) or `physical` must be present.
//! Unknown keys anywhere are rejected, and every message names the key path.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{derive_groups, DimensionlessGroups, Grid, PhysicalParams, DEFAULT_EPSILON_PRODUCT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Readout,
    Memory,
    Dispersion,
    OracleCompare,
    SymplecticCheck,
    PacketVelocity,
    LaplaceCheck,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Readout => "readout",
            Mode::Memory => "memory",
            Mode::Dispersion => "dispersion",
            Mode::OracleCompare => "oracle-compare",
            Mode::SymplecticCheck => "symplectic-check",
            Mode::PacketVelocity => "packet-velocity",
            Mode::LaplaceCheck => "laplace-check",
        }
    }

    fn needs_scan(&self) -> bool {
        matches!(self, Mode::Readout | Mode::Memory)
    }
}

/// Dimensionless parameter block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupsBlock {
    pub kappa_c: f64,
    pub r: f64,
    #[serde(rename = "omega_T", default, skip_serializing_if = "Option::is_none")]
    pub omega_t: Option<f64>,
    #[serde(rename = "q_L", default, skip_serializing_if = "Option::is_none")]
    pub q_l: Option<f64>,
    #[serde(rename = "kappa2_L", default)]
    pub kappa2_l: f64,
    #[serde(rename = "Omega_T", default)]
    pub omega_total_t: f64,
    #[serde(rename = "eps_xi3_T", default = "default_eps")]
    pub eps_xi3_t: f64,
    #[serde(rename = "eps_jx_L", default = "default_eps")]
    pub eps_jx_l: f64,
}

fn default_eps() -> f64 {
    DEFAULT_EPSILON_PRODUCT
}

/// Detection mode and check settings; all optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeBlock {
    #[serde(rename = "omega_T", default, skip_serializing_if = "Option::is_none")]
    pub omega_t: Option<f64>,
    #[serde(rename = "q_L", default, skip_serializing_if = "Option::is_none")]
    pub q_l: Option<f64>,
    /// Laplace variables sT for laplace-check.
    #[serde(rename = "s_T", default, skip_serializing_if = "Option::is_none")]
    pub s_t: Option<Vec<f64>>,
    /// Packet carrier q0L for packet-velocity.
    #[serde(rename = "q0_L", default, skip_serializing_if = "Option::is_none")]
    pub q0_l: Option<f64>,
    /// Packet bandwidth (1/L); defaults to 0.1·q0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    /// Number of random profiles for oracle-compare.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRange {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl ScanRange {
    /// Evenly spaced values from `from` to `to` inclusive.
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.from],
            n => {
                let step = (self.to - self.from) / (n - 1) as f64;
                (0..n)
                    .map(|i| if i + 1 == n { self.to } else { self.from + step * i as f64 })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelBlock {
    Groups(GroupsBlock),
    Physical(PhysicalParams),
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub model: ModelBlock,
    pub grid: Grid,
    pub scan: Option<ScanRange>,
    pub probe: ProbeBlock,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Syntax(String),
    #[error("config must be a single JSON object")]
    NotAnObject,
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

const TOP_LEVEL_KEYS: &[&str] = &["mode", "groups", "physical", "grid", "scan", "probe", "output"];

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let obj = value.as_object().ok_or(ConfigError::NotAnObject)?;
    let mut problems = Vec::new();

    for key in obj.keys() {
        if !TOP_LEVEL_KEYS.contains(&key.as_str()) {
            problems.push(format!("{key}: unknown key"));
        }
    }
    let mode: Option<Mode> = block(obj, "mode", &mut problems, true);
    if !obj.contains_key("groups") && !obj.contains_key("physical") {
        problems.push("groups|physical: missing parameter block (provide exactly one)".into());
    }
    if obj.contains_key("groups") && obj.contains_key("physical") {
        problems.push("groups, physical: conflicting parameter blocks (provide exactly one)".into());
    }
    let groups: Option<GroupsBlock> = block(obj, "groups", &mut problems, false);
    let physical: Option<PhysicalParams> = block(obj, "physical", &mut problems, false);
    let grid: Option<Grid> = block(obj, "grid", &mut problems, true);
    let needs_scan = mode.is_some_and(|m| m.needs_scan());
    let scan: Option<ScanRange> = block(obj, "scan", &mut problems, needs_scan);
    let probe: ProbeBlock = block(obj, "probe", &mut problems, false).unwrap_or_default();
    let output: Option<PathBuf> = block(obj, "output", &mut problems, false);

    if !problems.is_empty() {
        return Err(ConfigError::Invalid(problems));
    }
    let model = match (groups, physical) {
        (Some(g), None) => ModelBlock::Groups(g),
        (None, Some(p)) => ModelBlock::Physical(p),
        _ => unreachable!("block presence checked above"),
    };
    let config = RunConfig {
        mode: mode.expect("mode checked above"),
        model,
        grid: grid.expect("grid checked above"),
        scan,
        probe,
        output,
    };
    config.validate().map_err(ConfigError::Invalid)?;
    Ok(config)
}

fn block<T: for<'de> Deserialize<'de>>(
    obj: &Map<String, Value>,
    key: &str,
    problems: &mut Vec<String>,
    required: bool,
) -> Option<T> {
    match obj.get(key) {
        None => {
            if required {
                problems.push(format!("{key}: missing required key"));
            }
            None
        }
        Some(v) => match T::deserialize(v) {
            Ok(t) => Some(t),
            Err(e) => {
                problems.push(format!("{key}: {e}"));
                None
            }
        },
    }
}

impl RunConfig {
    /// Semantic checks that go beyond the JSON shape.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut problems = Vec::new();
        fn finite(problems: &mut Vec<String>, path: &str, v: f64) {
            if !v.is_finite() {
                problems.push(format!("{path}: must be finite, got {v}"));
            }
        }
        match &self.model {
            ModelBlock::Groups(g) => {
                finite(&mut problems, "groups.kappa_c", g.kappa_c);
                finite(&mut problems, "groups.kappa2_L", g.kappa2_l);
                finite(&mut problems, "groups.Omega_T", g.omega_total_t);
                finite(&mut problems, "groups.eps_xi3_T", g.eps_xi3_t);
                finite(&mut problems, "groups.eps_jx_L", g.eps_jx_l);
                if let Some(w) = g.omega_t {
                    finite(&mut problems, "groups.omega_T", w);
                }
                if let Some(q) = g.q_l {
                    finite(&mut problems, "groups.q_L", q);
                }
            }
            ModelBlock::Physical(p) => {
                if let Err(e) = p.validate() {
                    problems.push(format!("physical: {e}"));
                }
            }
        }
        if let Some(s) = &self.scan {
            finite(&mut problems, "scan.from", s.from);
            finite(&mut problems, "scan.to", s.to);
            if s.points == 0 {
                problems.push("scan.points: empty range".into());
            }
        }
        if let Some(s) = &self.probe.s_t {
            if s.is_empty() {
                problems.push("probe.s_T: empty list".into());
            }
            for v in s {
                if !(v.is_finite() && *v > 0.0) {
                    problems.push(format!("probe.s_T: entries must be positive and finite, got {v}"));
                }
            }
        }
        if let Err(e) = self.grid.validate() {
            problems.push(format!("grid: {e}"));
        }
        if let ModelBlock::Groups(g) = &self.model {
            if g.r == 0.0 || !g.r.is_finite() {
                problems.push(format!("groups.r: must be finite and nonzero, got {}", g.r));
            } else if g.kappa_c != 0.0 && g.r.signum() != g.kappa_c.signum() {
                problems.push("groups.r: must have the sign of kappa_c".into());
            }
            if g.omega_t.is_some() && self.probe.omega_t.is_some() {
                problems.push("groups.omega_T, probe.omega_T: conflicting values".into());
            }
            if g.q_l.is_some() && self.probe.q_l.is_some() {
                problems.push("groups.q_L, probe.q_L: conflicting values".into());
            }
        }
        let needs = match self.mode {
            Mode::Readout | Mode::Dispersion => Some(("omega_T", self.omega_t())),
            Mode::Memory => Some(("q_L", self.q_l())),
            _ => None,
        };
        if let Some((name, None)) = needs {
            problems.push(format!(
                "groups.{name}|probe.{name}: required for mode {}",
                self.mode.name()
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    /// Detection frequency ωT from whichever block carries it.
    pub fn omega_t(&self) -> Option<f64> {
        match &self.model {
            ModelBlock::Groups(g) => g.omega_t.or(self.probe.omega_t),
            ModelBlock::Physical(_) => self.probe.omega_t,
        }
    }

    /// Spatial mode qL from whichever block carries it.
    pub fn q_l(&self) -> Option<f64> {
        match &self.model {
            ModelBlock::Groups(g) => g.q_l.or(self.probe.q_l),
            ModelBlock::Physical(_) => self.probe.q_l,
        }
    }

    /// Reduced groups at the configured κc (zero for unset ωT or qL).
    pub fn groups(&self) -> crate::Result<DimensionlessGroups> {
        let (w, q) = (self.omega_t().unwrap_or(0.0), self.q_l().unwrap_or(0.0));
        match &self.model {
            ModelBlock::Groups(g) => DimensionlessGroups::from_reduced(
                g.kappa_c,
                g.r,
                w,
                q,
                g.kappa2_l,
                g.omega_total_t,
                g.eps_xi3_t,
                g.eps_jx_l,
            ),
            ModelBlock::Physical(p) => derive_groups(p, w, q),
        }
    }

    /// Physical parameters: as given, or the canonical set for the groups.
    pub fn physical(&self) -> crate::Result<PhysicalParams> {
        match &self.model {
            ModelBlock::Physical(p) => Ok(*p),
            ModelBlock::Groups(_) => PhysicalParams::canonical(&self.groups()?),
        }
    }

    /// Replaces both grid sizes by `n`.
    pub fn override_grid(&mut self, n: usize) -> crate::Result<()> {
        self.grid = Grid::square(n)?;
        Ok(())
    }
}
