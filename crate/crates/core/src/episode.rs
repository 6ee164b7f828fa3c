//! Whole benchmark episodes drawn from the generative model.

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goal::{sample_goal, HumanGoal, Predicate, RobotTask};
use crate::human::{
    dress, level_utterances, plan_human_trajectory, state_at, stop_candidates, subgoal_distribution, HumanModel,
    Level, RationalityParams, Step,
};
use crate::language::{realize, ConstraintFormula, Utterance};
use crate::planner::grounded_planning;
use crate::pragmatics::{set_of, Lexicon};
use crate::vocab::Color;
use crate::world::{ObjectId, WorldState};
use crate::worldgen::{generate_world, WorldConfig};

pub const EPISODE_SCHEMA_VERSION: u32 = 1;

/// A color preference prior for level-4 episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferencePrior(pub Vec<(Color, f64)>);

impl Default for PreferencePrior {
    fn default() -> Self {
        PreferencePrior(vec![(Color::Red, 0.5), (Color::Green, 0.3), (Color::Blue, 0.2)])
    }
}

impl PreferencePrior {
    pub fn mass(&self, c: Color) -> f64 {
        self.0.iter().find(|(d, _)| *d == c).map_or(0.0, |(_, w)| *w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub world: WorldConfig,
    pub rationality: RationalityParams,
    pub preference_prior: PreferencePrior,
    /// Every episode's task must be achievable by the robot within this
    /// many steps.
    pub budget: usize,
    pub max_attempts: usize,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            world: WorldConfig::default(),
            rationality: RationalityParams::default(),
            preference_prior: PreferencePrior::default(),
            budget: 5,
            max_attempts: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerationError {
    #[error("no level-{level} episode found for seed {seed} after {attempts} attempts")]
    GenerationExhausted { level: u8, seed: u64, attempts: usize },
}

/// One benchmark instance. `trajectory` holds only the observed steps, so
/// the stop state is the state after its last action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Episode {
    pub id: u64,
    pub seed: u64,
    pub level: Level,
    pub initial: WorldState,
    pub goal: HumanGoal,
    pub trajectory: Vec<Step>,
    pub subgoal: Predicate,
    pub task: RobotTask,
    pub utterance: Utterance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<Color>,
}

impl Episode {
    pub fn stop(&self) -> usize {
        self.trajectory.len()
    }

    /// The state the robot acts in.
    pub fn current(&self) -> WorldState {
        state_at(&self.initial, &self.trajectory, self.trajectory.len())
    }
}

/// Derives the rng seed of one attempt from the episode seed.
fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (attempt as u64).wrapping_mul(0xD1B5_4A32_D192_ED03).rotate_left(17)
}

/// Draws one episode of the given level. Attempts that cannot meet the
/// level's definition are discarded and redrawn from a fresh stream.
pub fn generate_episode(id: u64, seed: u64, level: Level, cfg: &GenerationConfig) -> Result<Episode, GenerationError> {
    let mut model = HumanModel::new();
    for attempt in 0..cfg.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed(seed, attempt));
        if let Some(ep) = try_episode(id, seed, level, cfg, &mut model, &mut rng) {
            return Ok(ep);
        }
    }
    Err(GenerationError::GenerationExhausted { level: level.number(), seed, attempts: cfg.max_attempts })
}

/// One way an attempt can end: stop step, subgoal, target, preference and
/// content formula, with its unnormalised generative weight.
struct Draw {
    weight: f64,
    stop: usize,
    subgoal: usize,
    target: ObjectId,
    preference: Option<Color>,
    formula: ConstraintFormula,
}

/// Samples world, goal and trajectory, then draws (t′, p*, target,
/// utterance) from the generative model conditioned on the level's
/// definition holding. Conditioning is done by enumerating the
/// qualifying outcomes with their weights rather than by rejection.
fn try_episode(
    id: u64,
    seed: u64,
    level: Level,
    cfg: &GenerationConfig,
    model: &mut HumanModel,
    rng: &mut ChaCha8Rng,
) -> Option<Episode> {
    let s0 = generate_world(&cfg.world, rng);
    let goal = sample_goal(&s0, rng)?;
    let steps = plan_human_trajectory(model, &s0, &goal, &cfg.rationality, rng).ok()?;
    let pool = stop_candidates(&s0, &steps, &goal);
    let mut draws: Vec<Draw> = Vec::new();
    for &t in &pool {
        let s = state_at(&s0, &steps, t);
        let mut lex: Option<Lexicon> = None;
        for (k, pk) in subgoal_distribution(&goal, &s) {
            let w = pk / pool.len() as f64;
            let useful_ids: Vec<ObjectId> = model
                .useful_objects(&s, &goal.predicates[k])
                .into_iter()
                .filter(|&o| grounded_planning(&s, RobotTask::HeldByHuman(o), cfg.budget).is_ok())
                .collect();
            // Levels 3 and 4 are ambiguous within the useful set itself.
            let needed = if matches!(level, Level::L3 | Level::L4) { 2 } else { 1 };
            if useful_ids.len() < needed {
                continue;
            }
            let lex = lex.get_or_insert_with(|| Lexicon::new(&s));
            for (p, v, o, u) in target_draws(level, &s, &useful_ids, lex, cfg) {
                draws.push(Draw { weight: w * p, stop: t, subgoal: k, target: o, preference: v, formula: lex.formulas[u] });
            }
        }
    }
    let idx = WeightedIndex::new(draws.iter().map(|d| d.weight)).ok()?;
    let d = &draws[idx.sample(rng)];
    let formula = dress(d.formula, level, rng);
    let surface = realize(&formula, rng);
    Some(Episode {
        id,
        seed,
        level,
        initial: s0,
        subgoal: goal.predicates[d.subgoal].clone(),
        goal,
        trajectory: steps[..d.stop].to_vec(),
        task: RobotTask::HeldByHuman(d.target),
        utterance: Utterance { surface, formula },
        preference: d.preference,
    })
}

/// Weighted (target, preference, formula) outcomes for one stop state and
/// subgoal. Below level 4 the target is uniform over the useful objects;
/// at level 4 the preference is drawn first and the target among the
/// useful objects of that color. The formula is uniform over the
/// speaker's best ones that meet the level's definition.
fn target_draws(
    level: Level,
    s: &WorldState,
    useful_ids: &[ObjectId],
    lex: &Lexicon,
    cfg: &GenerationConfig,
) -> Vec<(f64, Option<Color>, ObjectId, usize)> {
    let useful = set_of(useful_ids.iter().copied());
    let mut out = Vec::new();
    let mut push = |w: f64, v: Option<Color>, o: ObjectId| {
        let options = level_utterances(level, lex, s, useful, o, &cfg.rationality);
        for &u in &options {
            out.push((w / options.len() as f64, v, o, u));
        }
    };
    if level == Level::L4 {
        let support = preference_support(s, useful_ids, &cfg.preference_prior);
        if support.len() < 2 {
            return Vec::new();
        }
        for (v, pv) in support {
            let of_color: Vec<ObjectId> = useful_ids.iter().copied().filter(|&o| color_of(s, o) == Some(v)).collect();
            for &o in &of_color {
                push(pv / of_color.len() as f64, Some(v), o);
            }
        }
    } else {
        for &o in useful_ids {
            push(1.0 / useful_ids.len() as f64, None, o);
        }
    }
    out
}

fn color_of(s: &WorldState, o: ObjectId) -> Option<Color> {
    s.object(o).and_then(|e| e.attributes.color)
}

/// Colors among the useful objects, with the prior renormalised over them.
pub fn preference_support(s: &WorldState, useful: &[ObjectId], prior: &PreferencePrior) -> Vec<(Color, f64)> {
    let mut colors: Vec<Color> = useful.iter().filter_map(|&o| s.object(o).and_then(|e| e.attributes.color)).collect();
    colors.sort();
    colors.dedup();
    let z: f64 = colors.iter().map(|&c| prior.mass(c)).sum();
    if z <= 0.0 {
        return Vec::new();
    }
    colors.into_iter().map(|c| (c, prior.mass(c) / z)).filter(|(_, w)| *w > 0.0).collect()
}

/// The level-4 draw distribution in the episode's stop state and subgoal
/// as (probability, target, content formula). Used to compute exact
/// success expectations.
pub fn level4_outcomes(ep: &Episode, cfg: &GenerationConfig) -> Vec<(f64, ObjectId, ConstraintFormula)> {
    let s = ep.current();
    let useful_ids: Vec<ObjectId> = HumanModel::new()
        .useful_objects(&s, &ep.subgoal)
        .into_iter()
        .filter(|&o| grounded_planning(&s, RobotTask::HeldByHuman(o), cfg.budget).is_ok())
        .collect();
    let lex = Lexicon::new(&s);
    let draws = target_draws(Level::L4, &s, &useful_ids, &lex, cfg);
    let z: f64 = draws.iter().map(|(p, ..)| p).sum();
    draws.into_iter().map(|(p, _, o, u)| (p / z, o, lex.formulas[u])).collect()
}
