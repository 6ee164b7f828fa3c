//! Reference agents: the category-copying heuristic, a uniform random
//! listener, and an oracle that knows the true task.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::episode::Episode;
use crate::goal::RobotTask;
use crate::human::Step;
use crate::language::{candidate_referents, ConstraintFormula};
use crate::planner::{grounded_planning, PlanError};
use crate::world::{Action, ObjectId, WorldState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("the utterance describes no object in the room")]
    NoCandidate,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// What an agent decided and how it will carry it out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentVerdict {
    pub task: Option<RobotTask>,
    pub plan: Vec<Action>,
    pub rationale: String,
}

fn verdict(s: &WorldState, o: ObjectId, budget: usize, rationale: &str) -> Result<AgentVerdict, BaselineError> {
    let task = RobotTask::HeldByHuman(o);
    let plan = grounded_planning(s, task, budget)?;
    Ok(AgentVerdict { task: Some(task), plan, rationale: rationale.to_owned() })
}

/// Grounds the formula, preferring objects whose genre matches something
/// the human picked up, then among those one whose noun matches too.
/// Remaining ties go to the lowest id.
pub fn heuristic_act(
    s: &WorldState,
    trajectory: &[Step],
    formula: &ConstraintFormula,
    budget: usize,
) -> Result<AgentVerdict, BaselineError> {
    let cands = candidate_referents(formula, s);
    if cands.is_empty() {
        return Err(BaselineError::NoCandidate);
    }
    let handled: Vec<_> = trajectory
        .iter()
        .filter(|st| st.action.is_pick())
        .filter_map(|st| st.action.object().and_then(|o| st.state.object(o)).map(|e| e.noun))
        .collect();
    let noun = |o: ObjectId| s.object(o).expect("candidate exists").noun;
    let same_genre: Vec<ObjectId> =
        cands.iter().copied().filter(|&o| handled.iter().any(|n| n.genre() == noun(o).genre())).collect();
    let same_noun: Vec<ObjectId> = same_genre.iter().copied().filter(|&o| handled.contains(&noun(o))).collect();
    match (same_noun.first(), same_genre.first()) {
        (Some(&o), _) => verdict(s, o, budget, "same noun as a handled object"),
        (None, Some(&o)) => verdict(s, o, budget, "same genre as a handled object"),
        _ => verdict(s, cands[0], budget, "lowest-id literal candidate"),
    }
}

/// Picks uniformly among the objects the formula literally describes.
pub fn random_act<R: Rng + ?Sized>(
    s: &WorldState,
    formula: &ConstraintFormula,
    budget: usize,
    rng: &mut R,
) -> Result<AgentVerdict, BaselineError> {
    let cands = candidate_referents(formula, s);
    let &o = cands.choose(rng).ok_or(BaselineError::NoCandidate)?;
    verdict(s, o, budget, "uniform literal candidate")
}

/// Plans directly for the episode's true task.
pub fn oracle_act(ep: &Episode, budget: usize) -> Result<AgentVerdict, BaselineError> {
    let s = ep.current();
    let plan = grounded_planning(&s, ep.task, budget)?;
    Ok(AgentVerdict { task: Some(ep.task), plan, rationale: "true task".to_owned() })
}
