//! Run configuration: JSON config files merged under command-line flags.

use std::path::PathBuf;

use serde::Deserialize;

/// Keys accepted in a JSON config document. One document per run; any
/// unknown key is a hard error. Command-line flags override these.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub xi: Option<String>,
    pub xi_seed: Option<u64>,
    pub xi_file: Option<PathBuf>,
    pub kernel_file: Option<PathBuf>,
    pub j: Option<f64>,
    pub beta: Option<f64>,
    pub nodes: Option<usize>,
    pub scheme: Option<String>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
    pub damping: Option<f64>,
    pub dedup_radius: Option<f64>,
    pub perturbation: Option<f64>,
    pub k_max: Option<u32>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Flag-over-config resolution.
pub fn pick<T: Clone>(flag: &Option<T>, config: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| config.clone())
}

/// Output directory: flag, then config, then `TREEGIBBS_OUT`, then the
/// working directory.
pub fn resolve_out(flag: &Option<PathBuf>, config: &Option<PathBuf>) -> PathBuf {
    pick(flag, config)
        .or_else(|| std::env::var_os("TREEGIBBS_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
