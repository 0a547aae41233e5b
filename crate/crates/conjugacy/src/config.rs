//! Experiment configuration for grid runs, plus run-directory manifests.

use crate::error::{Error, Result};
use crate::group::GroupHandle;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const DEFAULT_PAIRS: usize = 2000;
pub const DEFAULT_LEN_MIN: u64 = 5;
pub const DEFAULT_LEN_MAX: u64 = 104;

fn default_pairs() -> usize {
    DEFAULT_PAIRS
}
fn default_len_min() -> u64 {
    DEFAULT_LEN_MIN
}
fn default_len_max() -> u64 {
    DEFAULT_LEN_MAX
}
fn default_seed() -> u64 {
    7
}
fn default_collection() -> String {
    "d0".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub group: String,
    /// path to a polycyclic presentation file when group is not built in
    pub presentation: Option<String>,
    #[serde(default = "default_collection")]
    pub collection: String,
    pub recipe: String,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_len_min")]
    pub len_min: u64,
    #[serde(default = "default_len_max")]
    pub len_max: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub pool_size: Option<usize>,
    #[serde(default)]
    pub ntnn: Option<NtnnGrid>,
    #[serde(default)]
    pub forest: Option<ForestGrid>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NtnnGrid {
    pub m: Vec<usize>,
    pub p: Vec<usize>,
    #[serde(default = "default_ntnn_criterion")]
    pub criterion: String,
    pub theta_alpha: Option<f64>,
    pub theta_omega: Option<f64>,
    pub restarts: Option<u64>,
    #[serde(default)]
    pub optimize: bool,
}

fn default_ntnn_criterion() -> String {
    "voting".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestGrid {
    pub trees: Vec<usize>,
    #[serde(default = "default_forest_criteria")]
    pub criteria: Vec<String>,
    pub depth_limit: Option<usize>,
}

fn default_forest_criteria() -> Vec<String> {
    vec!["gini".into(), "entropy".into()]
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))
    }

    pub fn resolve_group(&self) -> Result<GroupHandle> {
        resolve_group(&self.group, self.presentation.as_deref())
    }

    /// Stable digest of the fully resolved configuration.
    pub fn digest(&self) -> String {
        let js = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(js.as_bytes()))
    }
}

pub fn resolve_group(name: &str, presentation: Option<&str>) -> Result<GroupHandle> {
    match name {
        "bs12" => Ok(GroupHandle::bs12()),
        "gmbs23" => Ok(GroupHandle::gmbs23()),
        "sl2z" => GroupHandle::sl2z(),
        "heisenberg" => Ok(GroupHandle::heisenberg()),
        _ => {
            let path = presentation.ok_or_else(|| {
                Error::Config(format!(
                    "unknown group '{}'; pass a presentation file for polycyclic groups",
                    name
                ))
            })?;
            let g = GroupHandle::pcp_file(Path::new(path))?;
            if g.name != name {
                return Err(Error::Refusal(format!(
                    "presentation file defines group '{}', expected '{}'",
                    g.name, name
                )));
            }
            Ok(g)
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

/// Written into every run directory so results stay traceable to the
/// exact configuration and tool version that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_digest: String,
    pub command: String,
}

impl Manifest {
    pub fn new(config_digest: &str, command: &str) -> Manifest {
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: config_digest.to_string(),
            command: command.to_string(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let js = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("manifest.json"), js)?;
        Ok(())
    }
}
