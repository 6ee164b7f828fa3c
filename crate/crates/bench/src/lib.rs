//! Benchmark harness: seeded datasets, single-trial evaluation, the
//! failure taxonomy, the irrelevant-object filter and result tables.

pub mod agents;
pub mod config;
pub mod dataset;
pub mod evaluate;
pub mod filter;
pub mod report;

pub use agents::{act, AgentId, Decision, Refusal};
pub use config::{BenchmarkConfig, ConfigError};
pub use dataset::{generate_dataset, read_dataset, write_dataset, Dataset, DatasetError, DatasetHeader};
pub use evaluate::{classify_failure, evaluate, execute_plan, score, EpisodeResult, Execution, FailureClass};
pub use filter::{filter_episode, filter_irrelevant, irrelevant_objects};
pub use report::{render_failures, render_table, LevelSummary, Report};
