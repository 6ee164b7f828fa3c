//! Shortest robot plans for concrete tasks.

use thiserror::Error;

use crate::goal::RobotTask;
use crate::world::{apply_action, applicable_actions, Action, Agent, Container, Location, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("no plan of at most {0} steps achieves the task")]
    NoPlanWithinBudget(usize),
}

/// The shortest action sequence after which `task` holds. Among equally
/// short plans, the one first in breadth-first order over canonically
/// ordered actions is returned.
pub fn grounded_planning(state: &WorldState, task: RobotTask, budget: usize) -> Result<Vec<Action>, PlanError> {
    if task.satisfied(state) {
        return Ok(Vec::new());
    }
    let mut plan = Vec::new();
    for depth in 1..=budget {
        if search(state, task, depth, &mut plan) {
            return Ok(plan);
        }
    }
    Err(PlanError::NoPlanWithinBudget(budget))
}

/// Depth-first search for a plan of exactly `left` more steps; with an
/// admissible bound this visits plans in lexicographic action order, so
/// the first hit equals breadth-first search's first hit at that depth.
fn search(state: &WorldState, task: RobotTask, left: usize, plan: &mut Vec<Action>) -> bool {
    if task.satisfied(state) {
        return left == 0;
    }
    if left == 0 || lower_bound(state, task) > left {
        return false;
    }
    for a in applicable_actions(state, Agent::Robot) {
        let next = apply_action(state, Agent::Robot, &a).expect("applicable");
        plan.push(a);
        if search(&next, task, left - 1, plan) {
            return true;
        }
        plan.pop();
    }
    false
}

/// Steps the robot needs at least, counting one per distinct obligation:
/// reaching the object, opening each closed layer, freeing its hand,
/// picking, reaching the destination, and the final hand-over or put.
pub fn lower_bound(state: &WorldState, task: RobotTask) -> usize {
    let o = task.object();
    let Some(entity) = state.object(o) else { return usize::MAX };
    let robot = state.robot();
    let at = robot.at;
    let dest = match task {
        RobotTask::HeldByHuman(_) => Some(state.human().at),
        RobotTask::OnTopOf(_, f) => Some(f),
        RobotTask::Inside(_, Container::Fixture(f)) => Some(f),
        RobotTask::Inside(_, Container::Object(b)) => match state.object(b).map(|e| e.location) {
            Some(Location::HeldBy(_)) => None,
            _ => state.fixture_of(b),
        },
    };
    let dest_closed = match task {
        RobotTask::Inside(_, c) => usize::from(!state.is_container_open(c)),
        _ => 0,
    };
    if matches!(task, RobotTask::HeldByHuman(_)) && state.human().holding.is_some() {
        return usize::MAX;
    }
    let mut h = 1 + dest_closed;
    if robot.holding == Some(o) {
        h += usize::from(dest.is_some_and(|d| d != at));
        return h;
    }
    if entity.location == Location::HeldBy(Agent::Human) {
        // Retrieve from the human is impossible; only put-down by the human
        // could free it, which the robot cannot cause.
        return usize::MAX;
    }
    let fo = state.fixture_of(o);
    h += 1 + state.closed_holders(o).len() + usize::from(robot.holding.is_some());
    h += usize::from(fo != Some(at));
    h += usize::from(dest.is_some_and(|d| Some(d) != fo));
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::action_text;
    use crate::vocab::{Fixture, Noun};
    use crate::world::{Attributes, ObjectEntity, ObjectId};

    #[test]
    fn hand_over_from_the_sofa() {
        let objects = vec![ObjectEntity {
            id: ObjectId(0),
            noun: Noun::named("document"),
            instance: 2,
            attributes: Attributes { dusty: true, ..Attributes::default() },
            location: Location::OnTopOf(Fixture::Sofa),
        }];
        let w = WorldState::new(objects, vec![], Fixture::Table, Fixture::Floor).unwrap();
        let plan = grounded_planning(&w, RobotTask::HeldByHuman(ObjectId(0)), 5).unwrap();
        let mut s = w.clone();
        let mut text = Vec::new();
        for a in &plan {
            text.push(action_text(&s, a));
            s = apply_action(&s, Agent::Robot, a).unwrap();
        }
        assert_eq!(text, ["move to sofa", "pick up document 2", "move to table", "give document 2 to human"]);
        assert_eq!(grounded_planning(&w, RobotTask::HeldByHuman(ObjectId(0)), 3), Err(PlanError::NoPlanWithinBudget(3)));
        assert_eq!(grounded_planning(&s, RobotTask::HeldByHuman(ObjectId(0)), 1), Ok(vec![]));
    }
}
