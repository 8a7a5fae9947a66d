//! TOML run configuration mirrored by command-line flags; flags win.

use crate::AppError;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub domain: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub epsilon: Option<f64>,
    pub kernel: Option<String>,
    pub operator: Option<String>,
    pub grid: Option<usize>,
    pub degree_floor: Option<f64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub smooth: SmoothConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default)]
    pub thickness: ThicknessConfig,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// "tri" or "mc".
    pub backend: Option<String>,
    pub max_area: Option<f64>,
    pub min_angle_deg: Option<f64>,
    pub mc_n: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothConfig {
    pub snapshots: Option<PathBuf>,
    pub rho: Option<f64>,
    pub piece_max_area: Option<f64>,
    pub synthesize: Option<usize>,
    pub packing: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub eps_list: Option<Vec<f64>>,
    pub field: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThicknessConfig {
    pub eps_list: Option<Vec<f64>>,
    pub probes: Option<usize>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, AppError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::validation(format!("config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| AppError::validation(format!("config {}: {e}", path.display())))
    }
}

/// `flag.or(config).ok_or(validation error)` for required settings.
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, AppError> {
    flag.or(file)
        .ok_or_else(|| AppError::validation(format!("missing required setting `{name}`")))
}

pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
