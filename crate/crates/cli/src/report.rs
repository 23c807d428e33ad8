//! Run configuration and the JSON report envelope.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Families {
    pub b: Vec<String>,
    pub a: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct GridOverrides {
    pub t: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
    pub phi: Option<Vec<f64>>,
    /// Pairs `[C1, C2]`.
    #[serde(alias = "C")]
    pub c: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct SeriesSelect {
    pub kind: String,
    pub k: Option<usize>,
    pub j: Option<usize>,
    pub t: Option<f64>,
    pub s: Option<f64>,
    pub phi: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
}

/// Validated run configuration (JSON file).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_families")]
    pub families: Families,
    #[serde(default, rename = "grids")]
    pub grid_overrides: Option<GridOverrides>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub series: Option<SeriesSelect>,
}

fn default_m() -> usize {
    2
}

fn default_n_max() -> u32 {
    4096
}

fn default_families() -> Families {
    Families {
        b: vec!["1".into(), "1".into()],
        a: vec!["0".into(), "0".into()],
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: default_m(),
            n_max: default_n_max(),
            families: default_families(),
            grid_overrides: None,
            seed: 0,
            series: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        if config.m == 0 || config.m > 8 {
            anyhow::bail!("config: m = {} outside 1..=8", config.m);
        }
        if config.families.b.len() != config.m || config.families.a.len() != config.m {
            anyhow::bail!(
                "config: families must list exactly m = {} rows (got {} b, {} a)",
                config.m,
                config.families.b.len(),
                config.families.a.len()
            );
        }
        Ok(config)
    }
}

/// Report envelope written to `--out`.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub schema_version: u32,
    pub command: &'static str,
    pub seed: u64,
    pub n_max: u32,
    pub config: &'a RunConfig,
    pub result: serde_json::Value,
}

impl<'a> Report<'a> {
    pub fn new(command: &'static str, config: &'a RunConfig, result: serde_json::Value) -> Self {
        Report {
            schema_version: 1,
            command,
            seed: config.seed,
            n_max: config.n_max,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}
