//! Per-level aggregates, the success table and the JSON results file.

use std::fmt::Write as _;

use hmt_core::human::Level;
use serde::{Deserialize, Serialize};

use crate::config::BenchmarkConfig;
use crate::evaluate::{EpisodeResult, FailureClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: Level,
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub planning_failure: usize,
    pub redundant_behavior: usize,
    pub incorrect_intention: usize,
}

impl LevelSummary {
    fn of(level: Level, results: &[&EpisodeResult]) -> LevelSummary {
        let count = |c: FailureClass| results.iter().filter(|r| r.failure == c).count();
        let successes = count(FailureClass::Success);
        LevelSummary {
            level,
            episodes: results.len(),
            successes,
            success_rate: if results.is_empty() { 0.0 } else { 100.0 * successes as f64 / results.len() as f64 },
            planning_failure: count(FailureClass::PlanningFailure),
            redundant_behavior: count(FailureClass::RedundantBehavior),
            incorrect_intention: count(FailureClass::IncorrectIntention),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub agent: String,
    pub config: BenchmarkConfig,
    pub levels: Vec<LevelSummary>,
    pub results: Vec<EpisodeResult>,
}

impl Report {
    pub fn new(agent: &str, cfg: &BenchmarkConfig, results: Vec<EpisodeResult>) -> Report {
        let mut present: Vec<Level> = results.iter().map(|r| r.level).collect();
        present.sort();
        present.dedup();
        let levels = present
            .into_iter()
            .map(|l| LevelSummary::of(l, &results.iter().filter(|r| r.level == l).collect::<Vec<_>>()))
            .collect();
        Report { agent: agent.to_owned(), config: cfg.clone(), levels, results }
    }

    pub fn rate(&self, level: Level) -> Option<f64> {
        self.levels.iter().find(|s| s.level == level).map(|s| s.success_rate)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// A success-rate table with one row per agent and one column per level.
pub fn render_table(reports: &[Report]) -> String {
    let mut levels: Vec<Level> = reports.iter().flat_map(|r| r.levels.iter().map(|s| s.level)).collect();
    levels.sort();
    levels.dedup();
    let width = reports.iter().map(|r| r.agent.len()).max().unwrap_or(0).max(5);
    let mut out = format!("{:<width$}", "Agent");
    for l in &levels {
        let _ = write!(out, " | {:>7}", format!("Level {}", l.number()));
    }
    out.push('\n');
    out.push_str(&"-".repeat(width + levels.len() * 10));
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{:<width$}", r.agent);
        for &l in &levels {
            match r.rate(l) {
                Some(x) => {
                    let _ = write!(out, " | {x:>7.1}");
                }
                None => out.push_str(" |       -"),
            }
        }
        out.push('\n');
    }
    out
}

/// Failure-class counts per level for one agent.
pub fn render_failures(r: &Report) -> String {
    let mut out = format!("{}: failure classes per level\n", r.agent);
    for s in &r.levels {
        let _ = writeln!(
            out,
            "  Level {}: {} episodes, {} success, {} planning, {} redundant, {} incorrect intention",
            s.level.number(),
            s.episodes,
            s.successes,
            s.planning_failure,
            s.redundant_behavior,
            s.incorrect_intention
        );
    }
    out
}
