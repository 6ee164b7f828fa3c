//! Single-trial execution and scoring.

use std::time::{Duration, Instant};

use hmt_core::episode::{Episode, GenerationConfig};
use hmt_core::human::{HumanModel, Level};
use hmt_core::{apply_action, Action, Agent, ObjectId, WorldError, WorldState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{act, AgentId, Decision, Refusal};
use crate::config::BenchmarkConfig;
use crate::dataset::Dataset;
use crate::report::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureClass {
    Success,
    PlanningFailure,
    RedundantBehavior,
    IncorrectIntention,
}

/// The outcome of running a plan in the stop state.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub final_state: WorldState,
    /// States before each executed action, paired with it.
    pub executed: Vec<(WorldState, Action)>,
    /// The first action that could not be applied, with its index.
    pub error: Option<(usize, WorldError)>,
    /// Whether the plan was longer than the budget.
    pub truncated: bool,
}

/// Applies at most `budget` actions, stopping at the first invalid one.
pub fn execute_plan(s: &WorldState, plan: &[Action], budget: usize) -> Execution {
    let mut state = s.clone();
    let mut executed = Vec::new();
    let mut error = None;
    for (i, a) in plan.iter().take(budget).enumerate() {
        match apply_action(&state, Agent::Robot, a) {
            Ok(next) => {
                executed.push((state, *a));
                state = next;
            }
            Err(e) => {
                error = Some((i, e));
                break;
            }
        }
    }
    Execution { final_state: state, executed, error, truncated: plan.len() > budget }
}

/// Object the agent was after: its own declaration, else the first object
/// its plan hands over or picks up.
fn intended(chosen: Option<ObjectId>, plan: &[Action]) -> Option<ObjectId> {
    chosen
        .or_else(|| plan.iter().find_map(|a| matches!(a, Action::GiveToHuman(_)).then(|| a.object()).flatten()))
        .or_else(|| plan.iter().find(|a| a.is_pick()).and_then(|a| a.object()))
}

/// Assigns the failure classes of a finished trial; the first is primary.
/// Planning failures: an invalid action, a plan cut off by the budget or
/// ending without a hand-over, or a move to a fixture lacking the object
/// the robot was after. Redundant behaviour: handing over an object that
/// already satisfies one of the goal's predicates or that the human has
/// just handled. Incorrect intention: handing over anything else that is
/// not the requested object.
pub fn classify_failure(ep: &Episode, decision: &Decision, exec: Option<&Execution>) -> Vec<FailureClass> {
    let Some(exec) = exec else {
        return match decision.plan {
            Err(Refusal::NoCandidate) => vec![FailureClass::IncorrectIntention],
            _ => vec![FailureClass::PlanningFailure],
        };
    };
    if exec.error.is_none() && ep.task.satisfied(&exec.final_state) {
        return vec![FailureClass::Success];
    }
    let plan: Vec<Action> = exec.executed.iter().map(|(_, a)| *a).collect();
    let target = intended(decision.chosen, decision.plan.as_deref().unwrap_or(&plan));
    let mut labels = Vec::new();
    let wandered = target.is_some_and(|o| {
        exec.executed.iter().any(|(s, a)| match a {
            Action::MoveTo(f) => s.robot().holding != Some(o) && s.fixture_of(o) != Some(*f),
            _ => false,
        })
    });
    let delivered = plan.iter().rev().find_map(|a| match a {
        Action::GiveToHuman(o) => Some(*o),
        _ => None,
    });
    if exec.error.is_some() || exec.truncated || wandered || delivered.is_none() {
        labels.push(FailureClass::PlanningFailure);
    }
    if let Some(d) = delivered {
        let s = ep.current();
        let placed = s
            .object(d)
            .is_some_and(|o| ep.goal.predicates.iter().any(|p| p.is_member(o) && p.holds_for(&s, o)));
        let handled = ep.trajectory.iter().any(|st| st.action.object() == Some(d));
        if placed || handled {
            labels.push(FailureClass::RedundantBehavior);
        } else if d != ep.task.object() {
            labels.push(FailureClass::IncorrectIntention);
        }
    }
    if labels.is_empty() {
        labels.push(FailureClass::PlanningFailure);
    }
    labels
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub episode_id: u64,
    pub level: Level,
    pub success: bool,
    pub steps_used: usize,
    pub failure: FailureClass,
    /// Every applicable class, primary first.
    pub labels: Vec<FailureClass>,
    pub chosen: Option<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refusal: Option<Refusal>,
    /// Not serialised, so result files stay reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Executes a decision in the episode's stop state and scores it.
pub fn score(ep: &Episode, decision: &Decision, budget: usize) -> EpisodeResult {
    let exec = decision.plan.as_ref().ok().map(|plan| execute_plan(&ep.current(), plan, budget));
    let labels = classify_failure(ep, decision, exec.as_ref());
    let failure = labels[0];
    EpisodeResult {
        episode_id: ep.id,
        level: ep.level,
        success: failure == FailureClass::Success,
        steps_used: exec.as_ref().map_or(0, |e| e.executed.len()),
        failure,
        labels,
        chosen: intended(decision.chosen, decision.plan.as_deref().unwrap_or(&[])),
        refusal: decision.plan.as_ref().err().cloned(),
        wall_time: Duration::ZERO,
    }
}

/// Runs one local agent on every episode, in parallel, with one trial
/// each. Results come back sorted by episode id.
pub fn evaluate(agent: AgentId, ds: &Dataset, cfg: &BenchmarkConfig) -> Report {
    let gen: &GenerationConfig = &ds.header.generation;
    let budget = cfg.budget();
    let mut results: Vec<EpisodeResult> = cfg.in_pool(|| {
        ds.episodes
            .par_iter()
            .map(|ep| {
                let t = Instant::now();
                let ep = crate::filter::filter_episode(ep, cfg.filter_fraction);
                let decision = act(agent, &ep, gen, &mut HumanModel::new());
                let mut r = score(&ep, &decision, budget);
                r.wall_time = t.elapsed();
                r
            })
            .collect()
    });
    results.sort_by_key(|r| r.episode_id);
    Report::new(agent.name(), cfg, results)
}
