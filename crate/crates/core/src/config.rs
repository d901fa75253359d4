//! Flat key=value run configuration: parsing and canonical rendering.
//!
//! One `key=value` pair per line, `#` starts a comment. Complex values are
//! split into `_re`/`_im` keys. The canonical rendering emits every key in
//! a fixed order with shortest-round-trip numbers, so
//! `parse_config(render_config(c)) == c` exactly.

use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

use crate::model::{ChirpedDrive, DriveSignal, MeanFieldState, SystemParams};

/// Everything a single run needs: physics, drive, initial state and
/// integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub a0: Complex64,
    pub b0: Complex64,
    pub drive: DriveSignal,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
}

impl RunConfig {
    pub fn mf0(&self) -> MeanFieldState {
        MeanFieldState::new(self.a0, self.b0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("ParseError: line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("MissingKey: `{key}` is required")]
    MissingKey { key: &'static str },
    #[error("ConflictingDriveKeys: {detail}")]
    ConflictingDriveKeys { detail: String },
}

const CONSTANT_KEYS: [&str; 2] = ["drive.omega0_re", "drive.omega0_im"];
const CHIRPED_KEYS: [&str; 4] = ["drive.chi0", "drive.alpha", "drive.beta", "drive.t0"];

const KNOWN_KEYS: [&str; 20] = [
    "delta",
    "kappa",
    "gamma",
    "coupling_a",
    "coupling_b",
    "n_th",
    "drive.kind",
    "drive.omega0_re",
    "drive.omega0_im",
    "drive.chi0",
    "drive.alpha",
    "drive.beta",
    "drive.t0",
    "a0_re",
    "a0_im",
    "b0_re",
    "b0_im",
    "dt",
    "t_end",
    "sample_every",
];

struct RawConfig {
    entries: HashMap<String, (usize, String)>,
}

impl RawConfig {
    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn f64_required(&self, key: &'static str) -> Result<f64, ConfigError> {
        let (line, raw) = self
            .get(key)
            .ok_or(ConfigError::MissingKey { key })?;
        parse_f64(*line, key, raw)
    }

    fn f64_or(&self, key: &'static str, default: f64) -> Result<f64, ConfigError> {
        match self.get(key) {
            Some((line, raw)) => parse_f64(*line, key, raw),
            None => Ok(default),
        }
    }
}

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64, ConfigError> {
    let value: f64 = raw.parse().map_err(|_| ConfigError::Parse {
        line,
        reason: format!("invalid number `{raw}` for key `{key}`"),
    })?;
    if !value.is_finite() {
        return Err(ConfigError::Parse {
            line,
            reason: format!("key `{key}` must be finite"),
        });
    }
    Ok(value)
}

fn check_positive(raw: &RawConfig, key: &'static str, value: f64) -> Result<(), ConfigError> {
    if value <= 0.0 {
        let line = raw.get(key).map(|(l, _)| *l).unwrap_or(0);
        return Err(ConfigError::Parse {
            line,
            reason: format!("key `{key}` must be > 0"),
        });
    }
    Ok(())
}

fn check_nonnegative(raw: &RawConfig, key: &'static str, value: f64) -> Result<(), ConfigError> {
    if value < 0.0 {
        let line = raw.get(key).map(|(l, _)| *l).unwrap_or(0);
        return Err(ConfigError::Parse {
            line,
            reason: format!("key `{key}` must be >= 0"),
        });
    }
    Ok(())
}

/// Parse the flat key=value format. Unknown and duplicate keys are errors.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: HashMap<String, (usize, String)> = HashMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                reason: format!("expected key=value, got `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::Parse {
                line,
                reason: format!("unknown key `{key}`"),
            });
        }
        if entries.contains_key(key) {
            return Err(ConfigError::Parse {
                line,
                reason: format!("duplicate key `{key}`"),
            });
        }
        entries.insert(key.to_string(), (line, value.to_string()));
    }
    let raw = RawConfig { entries };

    let params = SystemParams {
        delta: raw.f64_required("delta")?,
        kappa: raw.f64_required("kappa")?,
        gamma: raw.f64_required("gamma")?,
        coupling_a: raw.f64_required("coupling_a")?,
        coupling_b: raw.f64_required("coupling_b")?,
        n_th: raw.f64_required("n_th")?,
    };
    check_nonnegative(&raw, "kappa", params.kappa)?;
    check_nonnegative(&raw, "gamma", params.gamma)?;
    check_nonnegative(&raw, "n_th", params.n_th)?;

    let (kind_line, kind) = raw
        .get("drive.kind")
        .ok_or(ConfigError::MissingKey { key: "drive.kind" })?;
    let drive = match kind.as_str() {
        "constant" => {
            if let Some(key) = CHIRPED_KEYS.iter().find(|k| raw.get(k).is_some()) {
                return Err(ConfigError::ConflictingDriveKeys {
                    detail: format!("`{key}` is not valid with drive.kind=constant"),
                });
            }
            DriveSignal::Constant {
                omega0: Complex64::new(
                    raw.f64_or("drive.omega0_re", 0.0)?,
                    raw.f64_or("drive.omega0_im", 0.0)?,
                ),
            }
        }
        "chirped" => {
            if let Some(key) = CONSTANT_KEYS.iter().find(|k| raw.get(k).is_some()) {
                return Err(ConfigError::ConflictingDriveKeys {
                    detail: format!("`{key}` is not valid with drive.kind=chirped"),
                });
            }
            let chirp = ChirpedDrive {
                chi0: raw.f64_required("drive.chi0")?,
                alpha: raw.f64_required("drive.alpha")?,
                beta: raw.f64_required("drive.beta")?,
                t0: raw.f64_required("drive.t0")?,
            };
            check_positive(&raw, "drive.chi0", chirp.chi0)?;
            check_positive(&raw, "drive.alpha", chirp.alpha)?;
            if params.coupling_b == 0.0 {
                return Err(ConfigError::Parse {
                    line: *kind_line,
                    reason: "chirped drive requires coupling_b != 0".to_string(),
                });
            }
            DriveSignal::Chirped(chirp)
        }
        other => {
            return Err(ConfigError::Parse {
                line: *kind_line,
                reason: format!("drive.kind must be `constant` or `chirped`, got `{other}`"),
            });
        }
    };

    let dt = raw.f64_or("dt", 1e-3)?;
    check_positive(&raw, "dt", dt)?;
    let t_end = raw.f64_required("t_end")?;
    check_positive(&raw, "t_end", t_end)?;
    let sample_every = match raw.get("sample_every") {
        Some((line, value)) => value.parse::<usize>().ok().filter(|&n| n >= 1).ok_or(
            ConfigError::Parse {
                line: *line,
                reason: format!("key `sample_every` must be a positive integer, got `{value}`"),
            },
        )?,
        None => 100,
    };

    Ok(RunConfig {
        params,
        a0: Complex64::new(raw.f64_or("a0_re", 0.0)?, raw.f64_or("a0_im", 0.0)?),
        b0: Complex64::new(raw.f64_or("b0_re", 0.0)?, raw.f64_or("b0_im", 0.0)?),
        drive,
        dt,
        t_end,
        sample_every,
    })
}

/// Canonical rendering: every key, fixed order, shortest round-trip
/// numbers.
pub fn render_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let p = &cfg.params;
    let _ = writeln!(out, "delta={}", p.delta);
    let _ = writeln!(out, "kappa={}", p.kappa);
    let _ = writeln!(out, "gamma={}", p.gamma);
    let _ = writeln!(out, "coupling_a={}", p.coupling_a);
    let _ = writeln!(out, "coupling_b={}", p.coupling_b);
    let _ = writeln!(out, "n_th={}", p.n_th);
    match &cfg.drive {
        DriveSignal::Constant { omega0 } => {
            let _ = writeln!(out, "drive.kind=constant");
            let _ = writeln!(out, "drive.omega0_re={}", omega0.re);
            let _ = writeln!(out, "drive.omega0_im={}", omega0.im);
        }
        DriveSignal::Chirped(chirp) => {
            let _ = writeln!(out, "drive.kind=chirped");
            let _ = writeln!(out, "drive.chi0={}", chirp.chi0);
            let _ = writeln!(out, "drive.alpha={}", chirp.alpha);
            let _ = writeln!(out, "drive.beta={}", chirp.beta);
            let _ = writeln!(out, "drive.t0={}", chirp.t0);
        }
    }
    let _ = writeln!(out, "a0_re={}", cfg.a0.re);
    let _ = writeln!(out, "a0_im={}", cfg.a0.im);
    let _ = writeln!(out, "b0_re={}", cfg.b0.re);
    let _ = writeln!(out, "b0_im={}", cfg.b0.im);
    let _ = writeln!(out, "dt={}", cfg.dt);
    let _ = writeln!(out, "t_end={}", cfg.t_end);
    let _ = writeln!(out, "sample_every={}", cfg.sample_every);
    out
}
