//! Run configuration: INI-style `[section]` blocks of `key = value` lines.
//!
//! ```text
//! [geometry]
//! m = 1
//! N = 24
//! [target]
//! kind = sphere        # or torus
//! n = 2
//! [initial]
//! family = torus_mode
//! lambda = 0.1
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use thiserror::Error;

use crate::geometry::HeisenbergModel;
use crate::initial::{Family, InitialSpec};
use crate::target::TargetManifold;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("key outside any section: {0}")]
    Unsectioned(String),
    #[error("unknown key {section}.{key}")]
    UnknownKey { section: String, key: String },
    #[error("missing required key {0}")]
    MissingKey(&'static str),
    #[error("{key}: expected {expected}, got {value:?}")]
    Type {
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSettings {
    pub cfl: f64,
    pub t_max: f64,
    pub tol_tau: f64,
    /// `None`: 1e4 times the initial sup density.
    pub rho_max: Option<f64>,
    pub cadence: usize,
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            cfl: 0.5,
            t_max: 1.0,
            tol_tau: 1e-4,
            rho_max: None,
            cadence: 50,
        }
    }
}

/// Unset entries are resolved against the constructed initial map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ControlSettings {
    pub d: Option<f64>,
    pub c1: f64,
    pub c2: Option<f64>,
    pub s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub m: usize,
    pub resolution: usize,
    pub target: TargetManifold,
    pub flow: FlowSettings,
    pub control: ControlSettings,
    pub initial: InitialSpec,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

const KEYS: &[(&str, &[&str])] = &[
    ("geometry", &["m", "N"]),
    ("target", &["kind", "n"]),
    ("flow", &["cfl", "t_max", "tol_tau", "rho_max", "cadence"]),
    ("control", &["D", "C1", "C2", "s"]),
    (
        "initial",
        &[
            "family",
            "lambda",
            "base",
            "modes",
            "smoothing_steps",
            "seed",
        ],
    ),
    ("output", &["dir"]),
];

struct Table {
    entries: Vec<(String, String, String)>,
}

impl Table {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
    }

    fn get<V: FromStr>(
        &self,
        section: &str,
        key: &str,
        expected: &'static str,
    ) -> Result<Option<V>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| ConfigError::Type {
                key: format!("{section}.{key}"),
                expected,
                value: v.to_string(),
            }),
        }
    }

    fn list<V: FromStr>(
        &self,
        section: &str,
        key: &str,
        expected: &'static str,
    ) -> Result<Option<Vec<V>>, ConfigError> {
        let Some(raw) = self.raw(section, key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|item| {
                item.trim().parse().map_err(|_| ConfigError::Type {
                    key: format!("{section}.{key}"),
                    expected,
                    value: raw.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn strip_comment(v: &str) -> &str {
    match v.find('#') {
        Some(i) => v[..i].trim(),
        None => v.trim(),
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be finite and > 0 (got {v})")))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut entries = Vec::new();
    for (section, props) in ini.iter() {
        let Some(section) = section else {
            if let Some((k, _)) = props.iter().next() {
                return Err(ConfigError::Unsectioned(k.to_string()));
            }
            continue;
        };
        let Some((_, allowed)) = KEYS.iter().find(|(s, _)| *s == section) else {
            return Err(ConfigError::UnknownSection(section.to_string()));
        };
        for (k, v) in props.iter() {
            if !allowed.contains(&k) {
                return Err(ConfigError::UnknownKey {
                    section: section.to_string(),
                    key: k.to_string(),
                });
            }
            entries.push((
                section.to_string(),
                k.to_string(),
                strip_comment(v).to_string(),
            ));
        }
    }
    let table = Table { entries };

    let m: usize = table
        .get("geometry", "m", "integer")?
        .ok_or(ConfigError::MissingKey("geometry.m"))?;
    HeisenbergModel::new(m).map_err(|e| invalid("geometry.m", e.to_string()))?;
    let resolution: usize = table
        .get("geometry", "N", "integer")?
        .ok_or(ConfigError::MissingKey("geometry.N"))?;
    if resolution < 4 {
        return Err(invalid(
            "geometry.N",
            format!("must be >= 4 (got {resolution})"),
        ));
    }

    let kind: String = table
        .get("target", "kind", "sphere|torus")?
        .ok_or(ConfigError::MissingKey("target.kind"))?;
    let n: usize = table.get("target", "n", "integer")?.unwrap_or(2);
    if n == 0 {
        return Err(invalid("target.n", "must be >= 1"));
    }
    let target = match kind.as_str() {
        "sphere" => TargetManifold::sphere(n),
        "torus" => TargetManifold::torus(n),
        other => {
            return Err(ConfigError::Type {
                key: "target.kind".into(),
                expected: "sphere|torus",
                value: other.into(),
            })
        }
    };

    let defaults = FlowSettings::default();
    let flow = FlowSettings {
        cfl: table.get("flow", "cfl", "number")?.unwrap_or(defaults.cfl),
        t_max: table
            .get("flow", "t_max", "number")?
            .unwrap_or(defaults.t_max),
        tol_tau: table
            .get("flow", "tol_tau", "number")?
            .unwrap_or(defaults.tol_tau),
        rho_max: table.get("flow", "rho_max", "number")?,
        cadence: table
            .get("flow", "cadence", "integer")?
            .unwrap_or(defaults.cadence),
    };
    if !(flow.cfl > 0.0 && flow.cfl <= 1.0) {
        return Err(invalid(
            "flow.cfl",
            format!("must lie in (0, 1] (got {})", flow.cfl),
        ));
    }
    positive("flow.t_max", flow.t_max)?;
    positive("flow.tol_tau", flow.tol_tau)?;
    if let Some(r) = flow.rho_max {
        if !(r > 0.0) {
            return Err(invalid("flow.rho_max", format!("must be > 0 (got {r})")));
        }
    }
    if flow.cadence == 0 {
        return Err(invalid("flow.cadence", "must be >= 1"));
    }

    let control = ControlSettings {
        d: table.get("control", "D", "number")?,
        c1: table.get("control", "C1", "number")?.unwrap_or(0.0),
        c2: table.get("control", "C2", "number")?,
        s: table.get("control", "s", "number")?,
    };
    if let Some(d) = control.d {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(invalid(
                "control.D",
                format!("must be finite and >= 0 (got {d})"),
            ));
        }
    }
    if !(control.c1 >= 0.0 && control.c1.is_finite()) {
        return Err(invalid(
            "control.C1",
            format!("must be finite and >= 0 (got {})", control.c1),
        ));
    }
    if let Some(c2) = control.c2 {
        positive("control.C2", c2)?;
    }
    if let Some(s) = control.s {
        positive("control.s", s)?;
    }
    if let (Some(d), Some(c2), Some(s)) = (control.d, control.c2, control.s) {
        let s_max = crate::analysis::window_bound(d, c2);
        if s >= s_max {
            return Err(invalid(
                "control.s",
                format!("window must be below 1/(D(4D+2)C2) = {s_max} (got {s})"),
            ));
        }
    }

    let family_name: String = table
        .get("initial", "family", "family name")?
        .ok_or(ConfigError::MissingKey("initial.family"))?;
    let family: Family = family_name.parse().map_err(|_| ConfigError::Type {
        key: "initial.family".into(),
        expected: "constant|torus_mode|equator|bump_averaged|smoothed_noise",
        value: family_name.clone(),
    })?;
    let lambda: f64 = table.get("initial", "lambda", "number")?.unwrap_or(0.1);
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(
            "initial.lambda",
            format!("must be finite and >= 0 (got {lambda})"),
        ));
    }
    let base: Option<Vec<f64>> = table.list("initial", "base", "comma-separated numbers")?;
    if let Some(b) = &base {
        if b.len() != target.ambient_dim() {
            return Err(invalid(
                "initial.base",
                format!(
                    "needs {} components for {target} (got {})",
                    target.ambient_dim(),
                    b.len()
                ),
            ));
        }
    }
    let modes: Option<Vec<i64>> = table.list("initial", "modes", "comma-separated integers")?;
    if let Some(k) = &modes {
        if k.len() != 2 * m {
            return Err(invalid(
                "initial.modes",
                format!("needs 2m = {} integers (got {})", 2 * m, k.len()),
            ));
        }
    }
    let initial = InitialSpec {
        family,
        lambda,
        base,
        modes,
        smoothing_steps: table
            .get("initial", "smoothing_steps", "integer")?
            .unwrap_or(20),
    };
    let seed = table.get("initial", "seed", "integer")?.unwrap_or(0);
    let output_dir = table.raw("output", "dir").map(PathBuf::from);

    Ok(RunConfig {
        m,
        resolution,
        target,
        flow,
        control,
        initial,
        seed,
        output_dir,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}
