use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use milpgen::agent::AgentConfig;
use milpgen::classes::{ClassId, ClassSizes};
use milpgen::generate::GenerateConfig;
use milpgen::sampler::SamplerConfig;
use milpgen::solve::SolverConfig;
use milpgen::teacher::BackendSpec;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub time_limit_s: f64,
    pub node_limit: u64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSettings { time_limit_s: d.time_limit.as_secs_f64(), node_limit: d.node_limit }
    }
}

impl SolverSettings {
    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            time_limit: Duration::from_secs_f64(self.time_limit_s.max(0.0)),
            node_limit: self.node_limit,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExecutorSpec {
    /// Solve the dataset's own model instead of running code.
    Oracle,
    /// Out-of-process runner speaking line JSON on stdin/stdout.
    Bridge { command: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateSection {
    pub counts: BTreeMap<ClassId, usize>,
    pub sizes: ClassSizes,
    pub sampler: SamplerConfig,
}

impl Default for GenerateSection {
    fn default() -> Self {
        let d = GenerateConfig::default();
        GenerateSection { counts: d.counts, sizes: d.sizes, sampler: d.sampler }
    }
}

/// Everything a config file may set. Flags override it.
#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub generate: GenerateSection,
    pub backend: Option<BackendSpec>,
    pub executor: Option<ExecutorSpec>,
    pub agent: AgentConfig,
    pub solver: SolverSettings,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}
