//! JSON config files and the built-in presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::encodings::{EncodingKind, EncodingSpec, DEFAULT_THETA};
use crate::harness::{linspace, ExperimentConfig, DENSE_QUBIT_LIMIT};
use crate::noise::FULL_CONTRACTION_P;
use crate::sampling::ShotBudget;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: FULL_CONTRACTION_P,
            points: 16,
        }
    }
}

/// On-disk experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub encoding: EncodingSpec,
    pub k_values: Vec<usize>,
    #[serde(default)]
    pub p_grid: GridSpec,
    #[serde(default)]
    pub shots: ShotBudget,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to on for `n <= 8`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compute_trace_norm: Option<bool>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_extended_p: bool,
}

impl ConfigFile {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let encoding = match name {
            "fig1" => EncodingSpec::product(4),
            "fig2" => EncodingSpec::entangling(4, DEFAULT_THETA),
            other => {
                return Err(CliError::Config(format!(
                    "unknown preset {other:?}; expected fig1 or fig2"
                )))
            }
        };
        Ok(Self {
            encoding,
            k_values: vec![1, 2, 3],
            p_grid: GridSpec::default(),
            shots: ShotBudget::default(),
            seed: 0,
            compute_trace_norm: None,
            allow_extended_p: false,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds and validates the harness config.
    pub fn to_experiment(&self) -> Result<ExperimentConfig, CliError> {
        if self.p_grid.points == 0 {
            return Err(CliError::Config("p_grid.points must be at least 1".into()));
        }
        if !(self.p_grid.start.is_finite() && self.p_grid.stop.is_finite()) {
            return Err(CliError::Config("p_grid bounds must be finite".into()));
        }
        let cfg = ExperimentConfig {
            encoding: self.encoding,
            k_values: self.k_values.clone(),
            p_grid: linspace(self.p_grid.start, self.p_grid.stop, self.p_grid.points),
            budget: self.shots,
            master_seed: self.seed,
            compute_trace_norm: self.compute_trace_norm.unwrap_or(self.encoding.n <= DENSE_QUBIT_LIMIT),
            allow_extended_p: self.allow_extended_p,
        };
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }

    pub fn label(&self) -> String {
        match self.encoding.kind {
            EncodingKind::Product => format!("product_n{}", self.encoding.n),
            EncodingKind::Entangling => format!("entangling_n{}", self.encoding.n),
        }
    }
}
