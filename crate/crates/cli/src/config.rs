//! Experiment configuration: a flat JSON file describing the diffusion, the
//! jump/robustness grids, replication count, threshold rule, and seeding.
//! Command-line flags may override the file values.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use jumpsift_core::{DiffusionParams, JumpParams, ThresholdMode};
use serde::{Deserialize, Serialize};

fn default_replications() -> usize {
    100
}

fn default_threshold() -> ThresholdMode {
    ThresholdMode::GumbelQuantile { q: 0.05 }
}

fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.05).collect()
}

fn default_output_dir() -> String {
    "out".into()
}

/// Full experiment description. Serialized back into the run manifest so a
/// result directory is self-describing.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub diffusion: DiffusionParams,
    /// Jump size standard deviation, shared across the grid.
    pub sigma_j: f64,
    /// Initial state; defaults to the drift fixed point beta1/beta2.
    #[serde(default)]
    pub x0: Option<f64>,
    pub grid_n: Vec<usize>,
    pub grid_lambda: Vec<f64>,
    pub grid_mu_j: Vec<f64>,
    #[serde(default = "default_alpha_grid")]
    pub grid_alpha: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_threshold")]
    pub threshold_mode: ThresholdMode,
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.diffusion
            .validate()
            .map_err(|e| anyhow::anyhow!("diffusion: {e}"))?;
        if self.sigma_j < 0.0 || !self.sigma_j.is_finite() {
            bail!("sigma_j must be nonnegative");
        }
        if let Some(x0) = self.x0 {
            if x0 <= 0.0 || !x0.is_finite() {
                bail!("x0 must be positive");
            }
        }
        if self.grid_n.is_empty() || self.grid_lambda.is_empty() || self.grid_mu_j.is_empty() || self.grid_alpha.is_empty() {
            bail!("grids must be nonempty");
        }
        for &n in &self.grid_n {
            if n < 3 {
                bail!("grid_n values must be at least 3");
            }
        }
        for &lambda in &self.grid_lambda {
            JumpParams::new(lambda, 0.0, self.sigma_j).map_err(|e| anyhow::anyhow!("grid_lambda: {e}"))?;
        }
        for &mu in &self.grid_mu_j {
            if !mu.is_finite() {
                bail!("grid_mu_j values must be finite");
            }
        }
        for &alpha in &self.grid_alpha {
            if alpha < 0.0 || !alpha.is_finite() {
                bail!("grid_alpha values must be nonnegative");
            }
        }
        if self.replications < 1 {
            bail!("replications must be at least 1");
        }
        // Threshold parameters are validated when the threshold is resolved;
        // reject obviously bad ones now so the grid never starts.
        match self.threshold_mode {
            ThresholdMode::GumbelQuantile { q } => {
                if q <= 0.0 || q >= 1.0 || q.is_nan() {
                    bail!("threshold q must lie in (0, 1)");
                }
            }
            ThresholdMode::Additive { c } => {
                if c <= 0.0 || c.is_nan() {
                    bail!("threshold offset c must be positive");
                }
            }
            ThresholdMode::Fixed { value } => {
                if value <= 0.0 || value.is_nan() {
                    bail!("fixed threshold must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn x0_or_default(&self) -> f64 {
        self.x0.unwrap_or(self.diffusion.drift_fixed_point())
    }

    /// Grid cardinality |n| x |lambda| x |mu_j| x |alpha|.
    pub fn grid_size(&self) -> usize {
        self.grid_n.len() * self.grid_lambda.len() * self.grid_mu_j.len() * self.grid_alpha.len()
    }
}

/// Parses a threshold flag of the form `quantile:0.05`, `additive:1.5`, or
/// `fixed:3.512`.
pub fn parse_threshold_flag(s: &str) -> Result<ThresholdMode> {
    let (kind, value) = s
        .split_once(':')
        .with_context(|| format!("threshold '{s}' must look like kind:value"))?;
    let value: f64 = value
        .trim()
        .parse()
        .with_context(|| format!("threshold value in '{s}'"))?;
    match kind.trim() {
        "quantile" | "gumbel_quantile" => Ok(ThresholdMode::GumbelQuantile { q: value }),
        "additive" => Ok(ThresholdMode::Additive { c: value }),
        "fixed" => Ok(ThresholdMode::Fixed { value }),
        other => bail!("unknown threshold kind '{other}' (use quantile, additive, or fixed)"),
    }
}
