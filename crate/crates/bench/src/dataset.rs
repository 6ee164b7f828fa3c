//! Line-delimited JSON datasets: one header line, then one episode per
//! line.

use std::io::{BufRead, Write};

use hmt_core::episode::{generate_episode, Episode, GenerationConfig, GenerationError, EPISODE_SCHEMA_VERSION};
use hmt_core::human::Level;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::BenchmarkConfig;

pub const DATASET_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("dataset schema {found} does not match supported schema {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHeader {
    pub schema_version: u32,
    pub episode_schema_version: u32,
    pub master_seed: u64,
    pub episodes_per_level: usize,
    pub levels: Vec<Level>,
    pub generation: GenerationConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub header: DatasetHeader,
    pub episodes: Vec<Episode>,
}

impl Dataset {
    pub fn level(&self, level: Level) -> impl Iterator<Item = &Episode> {
        self.episodes.iter().filter(move |e| e.level == level)
    }
}

/// Seed of the `id`-th episode under a master seed (SplitMix64 finaliser).
pub fn episode_seed(master: u64, id: u64) -> u64 {
    let mut z = master.wrapping_add(id.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates `episodes_per_level` episodes for each configured level.
/// Episodes are numbered level by level; the result does not depend on the
/// number of workers.
pub fn generate_dataset(cfg: &BenchmarkConfig) -> Result<Dataset, GenerationError> {
    let n = cfg.episodes_per_level;
    let jobs: Vec<(u64, Level)> = cfg
        .levels
        .iter()
        .enumerate()
        .flat_map(|(k, &level)| (0..n).map(move |i| ((k * n + i) as u64, level)))
        .collect();
    let episodes = cfg.in_pool(|| {
        jobs.par_iter()
            .map(|&(id, level)| generate_episode(id, episode_seed(cfg.seed, id), level, &cfg.generation))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(Dataset {
        header: DatasetHeader {
            schema_version: DATASET_SCHEMA_VERSION,
            episode_schema_version: EPISODE_SCHEMA_VERSION,
            master_seed: cfg.seed,
            episodes_per_level: n,
            levels: cfg.levels.clone(),
            generation: cfg.generation.clone(),
        },
        episodes,
    })
}

pub fn write_dataset(ds: &Dataset, mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, &ds.header)?;
    out.write_all(b"\n")?;
    for ep in &ds.episodes {
        serde_json::to_writer(&mut out, ep)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_dataset(input: impl BufRead) -> Result<Dataset, DatasetError> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !l.as_ref().is_ok_and(|l| l.trim().is_empty()));
    let (_, first) = lines.next().ok_or(DatasetError::Malformed { line: 1, message: "empty file".into() })?;
    let first = first?;
    let raw: serde_json::Value =
        serde_json::from_str(&first).map_err(|e| DatasetError::Malformed { line: 1, message: e.to_string() })?;
    let found = raw.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if found != DATASET_SCHEMA_VERSION {
        return Err(DatasetError::SchemaMismatch { found, expected: DATASET_SCHEMA_VERSION });
    }
    let header: DatasetHeader =
        serde_json::from_value(raw).map_err(|e| DatasetError::Malformed { line: 1, message: e.to_string() })?;
    if header.episode_schema_version != EPISODE_SCHEMA_VERSION {
        return Err(DatasetError::SchemaMismatch { found: header.episode_schema_version, expected: EPISODE_SCHEMA_VERSION });
    }
    let mut episodes = Vec::new();
    for (i, line) in lines {
        let ep: Episode =
            serde_json::from_str(&line?).map_err(|e| DatasetError::Malformed { line: i + 1, message: e.to_string() })?;
        episodes.push(ep);
    }
    Ok(Dataset { header, episodes })
}
