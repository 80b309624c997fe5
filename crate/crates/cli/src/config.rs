//! Run configuration: a flat key-value config file merged with command-line
//! flags, flags winning. Angles require an explicit unit (`degrees` or
//! `radians`) whenever any of them is present; there is no default.

use std::path::Path;

use qkd_core::device::{DeviceModel, MeasurementAngles, PreparationAngles};
use qkd_core::edp::PauliChannel;

use crate::CliError;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_STATISTICAL: i32 = 3;
pub const EXIT_NO_KEY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleUnit {
    Degrees,
    Radians,
}

/// Everything a command might need, all optional until validated.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub alpha: [Option<f64>; 4],
    pub beta: [Option<f64>; 4],
    pub unit: Option<AngleUnit>,
    pub p: [Option<f64>; 4],
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub q_step: Option<f64>,
    pub n_pulses: Option<u64>,
    pub seed: Option<u64>,
    pub eve: Option<String>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::new(EXIT_VALIDATION, msg)
}

impl RawConfig {
    /// Parses the flat `key = value` format. Blank lines and lines starting
    /// with `#` are skipped; unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RawConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let f = |what: &str| -> Result<f64, CliError> {
                value
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("line {}: bad number for {what}", lineno + 1)))
            };
            match key {
                "alpha1" => cfg.alpha[0] = Some(f(key)?),
                "alpha2" => cfg.alpha[1] = Some(f(key)?),
                "alpha3" => cfg.alpha[2] = Some(f(key)?),
                "alpha4" => cfg.alpha[3] = Some(f(key)?),
                "beta1" => cfg.beta[0] = Some(f(key)?),
                "beta2" => cfg.beta[1] = Some(f(key)?),
                "beta3" => cfg.beta[2] = Some(f(key)?),
                "beta4" => cfg.beta[3] = Some(f(key)?),
                "p00" => cfg.p[0] = Some(f(key)?),
                "p01" => cfg.p[1] = Some(f(key)?),
                "p10" => cfg.p[2] = Some(f(key)?),
                "p11" => cfg.p[3] = Some(f(key)?),
                "q_min" => cfg.q_min = Some(f(key)?),
                "q_max" => cfg.q_max = Some(f(key)?),
                "q_step" => cfg.q_step = Some(f(key)?),
                "n_pulses" => {
                    cfg.n_pulses = Some(value.parse().map_err(|_| {
                        invalid(format!("line {}: bad integer for n_pulses", lineno + 1))
                    })?)
                }
                "seed" => {
                    cfg.seed = Some(value.parse().map_err(|_| {
                        invalid(format!("line {}: bad integer for seed", lineno + 1))
                    })?)
                }
                "eve" => cfg.eve = Some(value.to_string()),
                "unit" => {
                    cfg.unit = Some(match value {
                        "degrees" => AngleUnit::Degrees,
                        "radians" => AngleUnit::Radians,
                        other => {
                            return Err(invalid(format!(
                                "line {}: unit must be `degrees` or `radians`, got `{other}`",
                                lineno + 1
                            )))
                        }
                    })
                }
                other => {
                    return Err(invalid(format!(
                        "line {}: unknown config key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Overlays `flags` on top of `self`; any field the flags set wins.
    pub fn merged_with(mut self, flags: RawConfig) -> Self {
        for i in 0..4 {
            if flags.alpha[i].is_some() {
                self.alpha[i] = flags.alpha[i];
            }
            if flags.beta[i].is_some() {
                self.beta[i] = flags.beta[i];
            }
            if flags.p[i].is_some() {
                self.p[i] = flags.p[i];
            }
        }
        self.unit = flags.unit.or(self.unit);
        self.q_min = flags.q_min.or(self.q_min);
        self.q_max = flags.q_max.or(self.q_max);
        self.q_step = flags.q_step.or(self.q_step);
        self.n_pulses = flags.n_pulses.or(self.n_pulses);
        self.seed = flags.seed.or(self.seed);
        self.eve = flags.eve.or(self.eve);
        self
    }

    fn any_angle_present(&self) -> bool {
        self.alpha
            .iter()
            .chain(self.beta.iter())
            .any(Option::is_some)
    }

    /// The device model in radians. Angles default to zero; a unit is
    /// mandatory as soon as any angle is given.
    pub fn device_model(&self) -> Result<DeviceModel, CliError> {
        let scale = match (self.any_angle_present(), self.unit) {
            (false, _) => 1.0,
            (true, Some(AngleUnit::Radians)) => 1.0,
            (true, Some(AngleUnit::Degrees)) => std::f64::consts::PI / 180.0,
            (true, None) => {
                return Err(invalid(
                    "angles given without a unit: pass --degrees or --radians \
                     (or `unit = ...` in the config file)",
                ))
            }
        };
        let a: Vec<f64> = self
            .alpha
            .iter()
            .map(|v| v.unwrap_or(0.0) * scale)
            .collect();
        let b: Vec<f64> = self.beta.iter().map(|v| v.unwrap_or(0.0) * scale).collect();
        let prep =
            PreparationAngles::new(a[0], a[1], a[2], a[3]).map_err(|e| invalid(e.to_string()))?;
        let meas =
            MeasurementAngles::new(b[0], b[1], b[2], b[3]).map_err(|e| invalid(e.to_string()))?;
        Ok(DeviceModel::new(prep, meas))
    }

    /// The Pauli channel; defaults to noiseless when no probability is
    /// given, otherwise missing entries count as zero.
    pub fn channel(&self) -> Result<PauliChannel, CliError> {
        if self.p.iter().all(Option::is_none) {
            return Ok(PauliChannel::identity());
        }
        let p: Vec<f64> = self.p.iter().map(|v| v.unwrap_or(0.0)).collect();
        PauliChannel::new(p[0], p[1], p[2], p[3]).map_err(|e| invalid(e.to_string()))
    }

    pub fn sweep_range(&self) -> Result<(f64, f64, f64), CliError> {
        let q_min = self.q_min.ok_or_else(|| invalid("sweep needs q_min"))?;
        let q_max = self.q_max.ok_or_else(|| invalid("sweep needs q_max"))?;
        let q_step = self.q_step.ok_or_else(|| invalid("sweep needs q_step"))?;
        if !q_step.is_finite() || q_step <= 0.0 {
            return Err(invalid(format!("q_step must be positive, got {q_step}")));
        }
        if q_min.is_nan() || q_max.is_nan() || q_min > q_max {
            return Err(invalid(format!(
                "q_min {q_min} must not exceed q_max {q_max}"
            )));
        }
        Ok((q_min, q_max, q_step))
    }

    pub fn n_pulses(&self) -> u64 {
        self.n_pulses.unwrap_or(1_000_000)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn eve(&self) -> &str {
        self.eve.as_deref().unwrap_or("none")
    }
}
