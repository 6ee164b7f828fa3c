//! The simulated human: a Boltzmann-rational actor working through its goal
//! one predicate at a time, who at some point stops and asks for help.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goal::{satisfied, HumanGoal, Predicate, RobotTask};
use crate::language::{ConstraintFormula, Determiner, RequestVerb};
use crate::pragmatics::{bit, members, set_of, Game, Lexicon, ObjectSet};
use crate::progress::{boltzmann, Progress, HORIZON};
use crate::vocab::Color;
use crate::world::{apply_action, applicable_actions, Action, Agent, ObjectId, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RationalityParams {
    /// Inverse temperature of the human's action choice; `inf` is greedy.
    #[serde(with = "beta_serde")]
    pub beta: f64,
    /// Weight of utterance cost against informativeness.
    pub lambda: f64,
    /// Inverse temperature of the soft-max speaker inside the pragmatic
    /// listener.
    pub alpha: f64,
    pub gamma: f64,
    /// Longest human trajectory simulated.
    pub horizon: usize,
}

impl Default for RationalityParams {
    fn default() -> Self {
        RationalityParams { beta: 5.0, lambda: 0.2, alpha: 10.0, gamma: 1.0, horizon: HORIZON as usize }
    }
}

mod beta_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(b: &f64, s: S) -> Result<S::Ok, S::Error> {
        if b.is_infinite() {
            Repr::Text("inf".into()).serialize(s)
        } else {
            Repr::Num(*b).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid beta `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HumanError {
    #[error("predicate {0} cannot be progressed from this state")]
    Unreachable(String),
    #[error("no unsatisfied predicate remains")]
    NothingRemaining,
    #[error("no object's hand-over progresses {0}")]
    NoUsefulTask(String),
    #[error("no utterance meets the level's requirements")]
    NoDistinguishingUtterance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Level {
    L1,
    L2,
    L3,
    L4,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::L1, Level::L2, Level::L3, Level::L4];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.number()
    }
}

impl TryFrom<u8> for Level {
    type Error = String;
    fn try_from(n: u8) -> Result<Level, String> {
        Level::ALL.get(usize::from(n).wrapping_sub(1)).copied().ok_or_else(|| format!("level must be 1-4, got {n}"))
    }
}

/// One observed human step: the state acted in and the action taken.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub state: WorldState,
    pub action: Action,
}

/// Distances and action likelihoods for the human under a hypothesised
/// goal. Caches are per instance.
#[derive(Default)]
pub struct HumanModel {
    pub progress: Progress,
}

impl HumanModel {
    pub fn new() -> HumanModel {
        HumanModel::default()
    }

    pub fn distance(&mut self, state: &WorldState, p: &Predicate) -> u32 {
        self.progress.distance(state, Agent::Human, p)
    }

    /// P(a | s, G): Boltzmann over the actions that leave every predicate
    /// already satisfied still satisfied, scored by distance decrease on
    /// the first unsatisfied predicate. Empty once the goal is complete.
    pub fn action_distribution(&mut self, state: &WorldState, goal: &HumanGoal, beta: f64) -> Vec<(Action, f64)> {
        let Some(cur) = goal.current(state) else { return Vec::new() };
        let p = &goal.predicates[cur];
        let held: Vec<&Predicate> = goal.predicates.iter().filter(|q| satisfied(q, state)).collect();
        let base = i64::from(self.distance(state, p));
        let mut acts = Vec::new();
        let mut deltas = Vec::new();
        for a in applicable_actions(state, Agent::Human) {
            let next = apply_action(state, Agent::Human, &a).expect("applicable");
            if held.iter().all(|q| satisfied(q, &next)) {
                deltas.push(base - i64::from(self.distance(&next, p)));
                acts.push(a);
            }
        }
        boltzmann(acts, &deltas, beta)
    }

    /// Objects whose arrival in the human's empty hand shortens the human's
    /// own plan for `p`.
    pub fn useful_objects(&mut self, state: &WorldState, p: &Predicate) -> Vec<ObjectId> {
        if state.human().holding.is_some() || satisfied(p, state) {
            return Vec::new();
        }
        let d = self.distance(state, p);
        let ids: Vec<ObjectId> = p.members(state).filter(|o| !p.holds_for(state, o)).map(|o| o.id).collect();
        ids.into_iter()
            .filter(|&o| {
                let mut s = state.clone();
                s.force_hold(Agent::Human, o);
                self.distance(&s, p) < d
            })
            .collect()
    }
}

/// Samples the human's trajectory until the goal is complete.
pub fn plan_human_trajectory<R: Rng + ?Sized>(
    model: &mut HumanModel,
    s0: &WorldState,
    goal: &HumanGoal,
    params: &RationalityParams,
    rng: &mut R,
) -> Result<Vec<Step>, HumanError> {
    let mut steps = Vec::new();
    let mut s = s0.clone();
    while let Some(cur) = goal.current(&s) {
        let p = &goal.predicates[cur];
        if steps.len() >= params.horizon || model.distance(&s, p) >= HORIZON {
            return Err(HumanError::Unreachable(p.to_string()));
        }
        let dist = model.action_distribution(&s, goal, params.beta);
        let a = sample(&dist, rng).ok_or_else(|| HumanError::Unreachable(p.to_string()))?;
        let next = apply_action(&s, Agent::Human, &a).expect("applicable");
        steps.push(Step { state: s, action: a });
        s = next;
    }
    Ok(steps)
}

fn sample<R: Rng + ?Sized>(dist: &[(Action, f64)], rng: &mut R) -> Option<Action> {
    let idx = WeightedIndex::new(dist.iter().map(|(_, p)| *p)).ok()?;
    Some(dist[idx.sample(rng)].0)
}

/// The state after `t` human steps.
pub fn state_at(s0: &WorldState, steps: &[Step], t: usize) -> WorldState {
    match steps.get(t) {
        Some(step) => step.state.clone(),
        None if t == 0 => s0.clone(),
        None => {
            let last = steps.last().expect("t > 0 implies steps");
            apply_action(&last.state, Agent::Human, &last.action).expect("trajectory replays")
        }
    }
}

/// Number of (predicate, member) pairs already in their goal relation.
fn units_done(goal: &HumanGoal, s: &WorldState) -> usize {
    goal.predicates.iter().map(|p| p.members(s).filter(|o| p.holds_for(s, o)).count()).sum()
}

/// Candidate stop steps: those at which the goal is incomplete and the
/// human's hand is empty, restricted to steps after the first unit of
/// progress when there are any.
pub fn stop_candidates(s0: &WorldState, steps: &[Step], goal: &HumanGoal) -> Vec<usize> {
    let states: Vec<WorldState> = (0..=steps.len()).map(|t| state_at(s0, steps, t)).collect();
    let open: Vec<usize> =
        (0..states.len()).filter(|&t| !goal.complete(&states[t]) && states[t].human().holding.is_none()).collect();
    let start = units_done(goal, &states[0]);
    let informative: Vec<usize> = open.iter().copied().filter(|&t| units_done(goal, &states[t]) > start).collect();
    if informative.is_empty() {
        open
    } else {
        informative
    }
}

/// Picks the stop step t′ uniformly from [`stop_candidates`] and the
/// subgoal p* from the predicates unsatisfied at t′, the one being worked
/// on weighted 2:1.
pub fn choose_stop_and_subgoal<R: Rng + ?Sized>(
    s0: &WorldState,
    steps: &[Step],
    goal: &HumanGoal,
    rng: &mut R,
) -> Result<(usize, Predicate), HumanError> {
    let &t = stop_candidates(s0, steps, goal).choose(rng).ok_or(HumanError::NothingRemaining)?;
    let p = choose_subgoal(goal, &state_at(s0, steps, t), rng)?;
    Ok((t, p))
}

/// P(p* = p | G, s): remaining predicates, the current one weighted 2:1.
pub fn subgoal_distribution(goal: &HumanGoal, s: &WorldState) -> Vec<(usize, f64)> {
    let Some(cur) = goal.current(s) else { return Vec::new() };
    let weights: Vec<(usize, f64)> = goal
        .predicates
        .iter()
        .enumerate()
        .filter(|(_, p)| !satisfied(p, s))
        .map(|(k, _)| (k, if k == cur { 2.0 } else { 1.0 }))
        .collect();
    let z: f64 = weights.iter().map(|(_, w)| w).sum();
    weights.into_iter().map(|(k, w)| (k, w / z)).collect()
}

fn choose_subgoal<R: Rng + ?Sized>(goal: &HumanGoal, s: &WorldState, rng: &mut R) -> Result<Predicate, HumanError> {
    let dist = subgoal_distribution(goal, s);
    let idx = WeightedIndex::new(dist.iter().map(|(_, w)| *w)).map_err(|_| HumanError::NothingRemaining)?;
    Ok(goal.predicates[dist[idx.sample(rng)].0].clone())
}

/// A hand-over of one object that progresses `p`, uniform among the
/// useful ones, restricted to the preferred color when one is given.
pub fn choose_robot_task<R: Rng + ?Sized>(
    model: &mut HumanModel,
    s: &WorldState,
    p: &Predicate,
    preference: Option<Color>,
    rng: &mut R,
) -> Result<RobotTask, HumanError> {
    let useful: Vec<ObjectId> = model
        .useful_objects(s, p)
        .into_iter()
        .filter(|&o| preference.is_none_or(|c| s.object(o).and_then(|e| e.attributes.color) == Some(c)))
        .collect();
    let &o = useful.choose(rng).ok_or_else(|| HumanError::NoUsefulTask(p.to_string()))?;
    Ok(RobotTask::HeldByHuman(o))
}

/// Content formulas the level's speaker would choose for `target`, given
/// the goal-relevant objects `useful`. Ties are all returned; the caller
/// draws among them.
///
/// Level 1 talks to a literal listener over the whole room, level 2 to a
/// literal listener who knows the subgoal, level 3 to a pragmatic one.
/// Each returned formula already satisfies the level's defining property.
pub fn level_utterances(
    level: Level,
    lex: &Lexicon,
    s: &WorldState,
    useful: ObjectSet,
    target: ObjectId,
    params: &RationalityParams,
) -> Vec<usize> {
    let everyone = set_of(s.object_ids());
    match level {
        Level::L1 => {
            let g = Game::new(lex, everyone, params.lambda, params.alpha);
            g.best_literal(target).into_iter().filter(|&u| g.literal(u) == bit(target)).collect()
        }
        Level::L2 => {
            let g = Game::new(lex, useful, params.lambda, params.alpha);
            g.best_literal(target)
                .into_iter()
                .filter(|&u| g.literal(u) == bit(target) && (lex.extension(u) & everyone).count_ones() >= 2)
                .collect()
        }
        Level::L3 => {
            let g = Game::new(lex, useful, params.lambda, params.alpha);
            g.best_pragmatic(target)
                .into_iter()
                .filter(|&u| g.literal(u).count_ones() >= 2 && g.pragmatic_set(u) == bit(target))
                .collect()
        }
        Level::L4 => level4_utterances(lex, s, useful, target, params),
    }
}

fn color_of(s: &WorldState, o: ObjectId) -> Option<Color> {
    s.object(o).and_then(|e| e.attributes.color)
}

/// The level-4 speaker assumes the listener knows their color preference.
/// It picks the cheapest formula without a color word whose goal-relevant
/// extension holds the target, at least one other object, and no other
/// object of the target's color. Without the preference, the pragmatic
/// listener must still be left with a tie.
fn level4_utterances(lex: &Lexicon, s: &WorldState, useful: ObjectSet, target: ObjectId, params: &RationalityParams) -> Vec<usize> {
    let Some(v) = color_of(s, target) else { return Vec::new() };
    let game = Game::new(lex, useful, params.lambda, params.alpha);
    let ok: Vec<usize> = (0..lex.len())
        .filter(|&u| {
            let ext = lex.extension(u) & useful;
            lex.formulas[u].color.is_none()
                && ext & bit(target) != 0
                && ext.count_ones() >= 2
                && members(ext).filter(|&o| color_of(s, o) == Some(v)).count() == 1
                && game.pragmatic_set(u).count_ones() >= 2
        })
        .collect();
    crate::pragmatics::argmax(ok.into_iter().map(|u| (u, -params.lambda * lex.cost(u))))
}

/// Surface choices that carry no meaning: the request verb always, and
/// the determiner where the grammar offers a choice.
pub fn dress<R: Rng + ?Sized>(content: ConstraintFormula, level: Level, rng: &mut R) -> ConstraintFormula {
    let verb = *RequestVerb::ALL.choose(rng).expect("verbs");
    let det = if level == Level::L4 {
        let a = ConstraintFormula { det: Determiner::A, ..content };
        if a.check().is_ok() && rng.gen_bool(0.5) {
            Determiner::A
        } else {
            Determiner::OneOf
        }
    } else if content.pro_form() && content.attribute_count() == 0 {
        Determiner::That
    } else {
        Determiner::The
    };
    ConstraintFormula { verb, det, ..content }
}
