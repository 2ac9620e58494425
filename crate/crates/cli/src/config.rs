//! Run configuration: JSON file merged over per-figure presets.

use anyhow::{bail, Context, Result};
use clickhd_core::{SchemeFile, SpectralSetupFile, StateFile};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralSetupFile>,
    /// Shots for the `sample` command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Photon-number cutoff for photoelectric output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

/// A phase (or grid) sweep of one criterion.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    /// One of: variance, fourth_order, nonlinear_squeezing, sum_variance,
    /// xp_covariance, two_mode_minor, apd_count.
    pub criterion: String,
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_stop")]
    pub stop: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_stop() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_points() -> usize {
    256
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        (0..self.points)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / self.points as f64)
            .collect()
    }
}

/// Thermal-occupation grid for the `thermal-lo` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThermalSpec {
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_thermal_stop")]
    pub stop: f64,
    #[serde(default = "default_thermal_points")]
    pub points: usize,
    /// LO phase at which the variance criterion is evaluated.
    #[serde(default = "default_phi")]
    pub phi: f64,
}

fn default_thermal_stop() -> f64 {
    0.5
}

fn default_thermal_points() -> usize {
    11
}

fn default_phi() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl ThermalSpec {
    pub fn grid(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.start];
        }
        (0..self.points)
            .map(|i| {
                self.start + (self.stop - self.start) * i as f64 / (self.points - 1) as f64
            })
            .collect()
    }
}

/// Loads a config file and overlays it on a preset: any key present in the
/// file replaces the preset value.
pub fn load_merged(preset: RunConfig, path: Option<&std::path::Path>) -> Result<RunConfig> {
    let Some(path) = path else {
        return Ok(preset);
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let overlay: Value =
        serde_json::from_str(&text).with_context(|| format!("invalid JSON in {}", path.display()))?;
    let mut base = serde_json::to_value(&preset)?;
    merge(&mut base, overlay)?;
    serde_json::from_value(base).context("config does not match the expected schema")
}

fn merge(base: &mut Value, overlay: Value) -> Result<()> {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (key, value) in o {
                match b.get_mut(&key) {
                    Some(slot) if slot.is_object() && value.is_object() => merge(slot, value)?,
                    _ => {
                        b.insert(key, value);
                    }
                }
            }
            Ok(())
        }
        (base, overlay) => {
            *base = overlay;
            Ok(())
        }
    }
}

pub fn require_state(config: &RunConfig) -> Result<&StateFile> {
    match &config.state {
        Some(s) => Ok(s),
        None => bail!("config needs a \"state\" entry"),
    }
}

pub fn require_scheme(config: &RunConfig) -> Result<&SchemeFile> {
    match &config.scheme {
        Some(s) => Ok(s),
        None => bail!("config needs a \"scheme\" entry"),
    }
}
