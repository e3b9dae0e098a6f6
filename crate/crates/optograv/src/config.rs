//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment. Parameter keys are the
//! field names of [`SystemParams`]; the rest are listed in [`RunConfig::set`].
//! `sweep` may repeat, every other key overwrites.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use optograv_core::mean_field::Regime;
use optograv_core::model::Dims;
use optograv_core::params::Coupling;
use optograv_core::SystemParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: &'static str,
    },
    #[error("regime {regime} does not match the parameters ({reason})")]
    RegimeConflict {
        regime: Regime,
        reason: &'static str,
    },
    #[error("invalid parameters: {0}")]
    Params(#[from] optograv_core::Error),
}

pub type ConfigResult<T> = Result<T, ConfigError>;

pub const PARAM_NAMES: [&str; 12] = [
    "omega_b",
    "kappa",
    "lambda",
    "gamma_a",
    "gamma_b",
    "eta",
    "chi",
    "upsilon",
    "mass",
    "g",
    "theta_tilt",
    "force",
];

fn param_mut<'a>(p: &'a mut SystemParams, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "omega_b" => &mut p.omega_b,
        "kappa" => &mut p.kappa,
        "lambda" => &mut p.lambda,
        "gamma_a" => &mut p.gamma_a,
        "gamma_b" => &mut p.gamma_b,
        "eta" => &mut p.eta,
        "chi" => &mut p.chi,
        "upsilon" => &mut p.upsilon,
        "mass" => &mut p.mass,
        "g" => &mut p.g,
        "theta_tilt" => &mut p.theta_tilt,
        "force" => &mut p.force,
        _ => return None,
    })
}

pub fn param_value(p: &SystemParams, name: &str) -> Option<f64> {
    let mut q = *p;
    param_mut(&mut q, name).map(|v| *v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        let t = |k: usize| k as f64 / (n - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..n).map(|k| self.min + (self.max - self.min) * t(k)).collect(),
            Spacing::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n).map(|k| (a + (b - a) * t(k)).exp()).collect()
            }
        }
    }
}

impl FromStr for SweepAxis {
    type Err = ConfigError;

    /// `name:min:max:count[:linear|:log]`
    fn from_str(s: &str) -> ConfigResult<Self> {
        let bad = |reason| ConfigError::BadValue {
            key: "sweep".into(),
            value: s.into(),
            reason,
        };
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("expected name:min:max:count[:linear|log]"));
        }
        let name = parts[0];
        if !PARAM_NAMES.contains(&name) {
            return Err(bad("not a parameter name"));
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad("not a number"));
        let (min, max) = (num(parts[1])?, num(parts[2])?);
        let count: usize = parts[3].parse().map_err(|_| bad("count is not an integer"))?;
        if count == 0 {
            return Err(bad("count must be at least 1"));
        }
        let spacing = match parts.get(4) {
            None | Some(&"linear") => Spacing::Linear,
            Some(&"log") => Spacing::Log,
            Some(_) => return Err(bad("spacing must be linear or log")),
        };
        if spacing == Spacing::Log && (min <= 0.0 || max <= 0.0) {
            return Err(bad("log spacing needs positive bounds"));
        }
        Ok(Self {
            name: name.into(),
            min,
            max,
            count,
            spacing,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = ConfigError;
    fn from_str(s: &str) -> ConfigResult<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            _ => Err(ConfigError::BadValue {
                key: "format".into(),
                value: s.into(),
                reason: "expected csv or jsonl",
            }),
        }
    }
}

pub fn parse_dims(s: &str) -> ConfigResult<Dims> {
    let bad = |reason| ConfigError::BadValue {
        key: "dims".into(),
        value: s.into(),
        reason,
    };
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| bad("expected integers")))
        .collect::<ConfigResult<_>>()?;
    match v[..] {
        [a, b] => Ok(Dims::two_mode(a, b)),
        [a, b, c] => Ok(Dims::three_mode(a, b, c)),
        _ => Err(bad("expected A,B or A,B,C")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub sweeps: Vec<SweepAxis>,
    pub regime: Option<Regime>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub oracle: bool,
    pub dims: Dims,
    /// Reserved; every computation is deterministic.
    pub seed: u64,
    pub preset: Option<String>,
    /// Parameter keys set by the file or the command line.
    pub explicit: BTreeSet<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            sweeps: Vec::new(),
            regime: None,
            out: None,
            format: Format::Csv,
            oracle: false,
            dims: Dims::two_mode(5, 5),
            seed: 0,
            preset: None,
            explicit: BTreeSet::new(),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> ConfigResult<f64> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
        reason: "not a number",
    })
}

impl RunConfig {
    pub fn from_file(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> ConfigResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// `key=value` as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> ConfigResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: 0 })?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> ConfigResult<()> {
        if let Some(slot) = param_mut(&mut self.params, key) {
            *slot = parse_f64(key, value)?;
            self.explicit.insert(key.into());
            return Ok(());
        }
        match key {
            "coupling" => match value {
                "nonreciprocal" => {
                    self.params.lambda = self.params.kappa;
                    self.explicit.insert("lambda".into());
                }
                "reciprocal" => {
                    self.params.lambda = 0.0;
                    self.explicit.insert("lambda".into());
                }
                _ => {
                    return Err(ConfigError::BadValue {
                        key: key.into(),
                        value: value.into(),
                        reason: "expected nonreciprocal or reciprocal",
                    })
                }
            },
            "sweep" => self.sweeps.push(value.parse()?),
            "regime" => {
                self.regime = Some(value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: value.into(),
                    reason: "unknown regime",
                })?)
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "oracle" => {
                self.oracle = value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: value.into(),
                    reason: "expected true or false",
                })?
            }
            "dims" => self.dims = parse_dims(value)?,
            "seed" => {
                self.seed = value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: value.into(),
                    reason: "expected an unsigned integer",
                })?
            }
            "preset" => self.preset = Some(value.into()),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Sets parameters the user left alone; keeps `lambda` tied to
    /// `kappa` when the coupling was not chosen explicitly.
    pub fn preset_defaults(&mut self, values: &[(&str, f64)]) {
        let nonreciprocal = self.params.lambda == self.params.kappa;
        for &(key, v) in values {
            if !self.explicit.contains(key) {
                if let Some(slot) = param_mut(&mut self.params, key) {
                    *slot = v;
                }
            }
        }
        if nonreciprocal && !self.explicit.contains("lambda") {
            self.params.lambda = self.params.kappa;
        }
    }

    /// Applies the regime's coupling to `lambda` and checks the drives agree.
    pub fn resolve_regime(&mut self) -> ConfigResult<()> {
        let Some(regime) = self.regime else {
            return Ok(());
        };
        match regime.coupling() {
            Coupling::Nonreciprocal => self.params.lambda = self.params.kappa,
            _ => self.params.lambda = 0.0,
        }
        let name = regime.name();
        let conflict = |reason| ConfigError::RegimeConflict { regime, reason };
        if name.ends_with("two-photon") && self.params.chi == 0.0 {
            return Err(conflict("chi is zero"));
        }
        if name.ends_with("parametric") && self.params.upsilon == 0.0 {
            return Err(conflict("upsilon is zero"));
        }
        if name.ends_with("single") && (self.params.chi != 0.0 || self.params.upsilon != 0.0) {
            return Err(conflict("a parametric drive is set"));
        }
        Ok(())
    }

    /// Every parameter point of the sweep, the last axis varying fastest.
    pub fn points(&self) -> ConfigResult<Vec<SystemParams>> {
        let mut points = vec![self.params];
        for axis in &self.sweeps {
            let values = axis.values();
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for &v in &values {
                    let mut q = *p;
                    *param_mut(&mut q, &axis.name).ok_or_else(|| ConfigError::UnknownKey(axis.name.clone()))? = v;
                    // Sweeping kappa keeps the chosen coupling.
                    if axis.name == "kappa" && p.lambda == p.kappa && !self.sweeps.iter().any(|a| a.name == "lambda") {
                        q.lambda = v;
                    }
                    next.push(q);
                }
            }
            points = next;
        }
        for p in &points {
            p.validate()?;
        }
        Ok(points)
    }
}
