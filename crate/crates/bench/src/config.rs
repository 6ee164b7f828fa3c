use std::path::Path;

use hmt_core::episode::GenerationConfig;
use hmt_core::human::Level;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::AgentId;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Everything one benchmark run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub episodes_per_level: usize,
    pub seed: u64,
    pub levels: Vec<Level>,
    pub agent: AgentId,
    /// Share of goal- and utterance-irrelevant objects removed before the
    /// agent acts.
    pub filter_fraction: f64,
    /// Worker threads; 0 lets the pool pick one per core.
    pub workers: usize,
    pub generation: GenerationConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            episodes_per_level: 500,
            seed: 0,
            levels: Level::ALL.to_vec(),
            agent: AgentId::FiserPr,
            filter_fraction: 0.0,
            workers: 0,
            generation: GenerationConfig::default(),
        }
    }
}

impl BenchmarkConfig {
    pub fn budget(&self) -> usize {
        self.generation.budget
    }

    pub fn load(path: &Path) -> Result<BenchmarkConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let cfg: BenchmarkConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_owned()));
        if self.episodes_per_level == 0 {
            return bad("episodes_per_level must be at least 1");
        }
        if self.levels.is_empty() {
            return bad("levels must not be empty");
        }
        if !(0.0..=1.0).contains(&self.filter_fraction) {
            return bad("filter_fraction must lie in [0, 1]");
        }
        if self.generation.budget == 0 {
            return bad("budget must be at least 1");
        }
        if self.generation.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        Ok(())
    }

    /// Runs `f` on a pool with the configured number of workers.
    pub fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.workers).build().expect("thread pool");
        pool.install(f)
    }
}
