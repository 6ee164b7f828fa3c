//! Inference for the robot: which goal the human has, which predicate they
//! need help with, which object they asked for, and how to bring it.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::goal::{goal_prior, HumanGoal, Predicate, Qualifier, Quantifier, RobotTask, Target, Verb};
use crate::human::{state_at, subgoal_distribution, HumanModel, RationalityParams, Step};
use crate::language::{ConstraintFormula, Determiner};
use crate::planner::{grounded_planning, PlanError};
use crate::pragmatics::{members, set_of, Game, Lexicon, ObjectSet, TIE_EPS};
use crate::vocab::{Fixture, ObjectClass};
use crate::episode::PreferencePrior;
use crate::world::{apply_action, applicable_actions, Action, Agent, Container, ObjectId, WorldState};

/// Additive smoothing on every categorical factor.
pub const EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiserError {
    #[error("the goal space is empty or no goal explains the trajectory")]
    EmptyGoalSpace,
    #[error("no candidate object fits the utterance and the inferred subgoal")]
    NoCandidate,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalPosterior {
    pub entries: Vec<(HumanGoal, f64)>,
}

impl GoalPosterior {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn probability(&self, g: &HumanGoal) -> f64 {
        self.entries.iter().find(|(h, _)| h == g).map_or(0.0, |(_, p)| *p)
    }
}

/// Exact Bayes over the enumerated goal space:
/// P(G | τ) ∝ P(G) · Π_t P(a_t | s_t, G).
pub fn goal_posterior(
    model: &mut HumanModel,
    s0: &WorldState,
    steps: &[Step],
    params: &RationalityParams,
) -> Result<GoalPosterior, FiserError> {
    let prior = goal_prior(s0);
    if prior.is_empty() {
        return Err(FiserError::EmptyGoalSpace);
    }
    // Goals that agree on the current predicate and on which predicates are
    // already satisfied share the same action distribution.
    let mut cache: HashMap<(usize, Vec<&Predicate>), f64> = HashMap::new();
    let mut logs = Vec::with_capacity(prior.len());
    for (g, p) in &prior {
        let mut lp = p.ln();
        for (t, step) in steps.iter().enumerate() {
            let Some(cur) = g.current(&step.state) else {
                lp = f64::NEG_INFINITY;
                break;
            };
            let mut key: Vec<&Predicate> = vec![&g.predicates[cur]];
            let mut held: Vec<&Predicate> =
                g.predicates.iter().filter(|q| crate::goal::satisfied(q, &step.state)).collect();
            held.sort();
            held.dedup();
            key.extend(held);
            let like = *cache.entry((t, key)).or_insert_with(|| {
                model
                    .action_distribution(&step.state, g, params.beta)
                    .into_iter()
                    .find(|(a, _)| *a == step.action)
                    .map_or(0.0, |(_, q)| q)
            });
            lp += like.ln();
            if lp == f64::NEG_INFINITY {
                break;
            }
        }
        logs.push(lp);
    }
    let best = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(FiserError::EmptyGoalSpace);
    }
    let weights: Vec<f64> = logs.iter().map(|&l| (l - best).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(GoalPosterior { entries: prior.into_iter().map(|(g, _)| g).zip(weights.into_iter().map(|w| w / z)).collect() })
}

/// Marginal posterior over the predicate the human needs help with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicatePosterior {
    pub entries: Vec<(Predicate, f64)>,
    /// True when no hypothesis was consistent with the utterance and the
    /// unconditioned posterior was used instead.
    pub inconsistent: bool,
}

impl PredicatePosterior {
    /// The most probable predicate; ties go to the smallest in predicate
    /// order.
    pub fn argmax(&self) -> Option<&Predicate> {
        let best = self.entries.iter().map(|(_, p)| *p).fold(f64::NEG_INFINITY, f64::max);
        self.entries.iter().filter(|(_, p)| *p >= best - TIE_EPS).map(|(q, _)| q).min()
    }
}

/// Objects a hand-over to the human would help with `p`, memoised per
/// predicate for one state.
pub struct UsefulCache<'s> {
    state: &'s WorldState,
    sets: HashMap<Predicate, ObjectSet>,
}

impl<'s> UsefulCache<'s> {
    pub fn new(state: &'s WorldState) -> Self {
        UsefulCache { state, sets: HashMap::new() }
    }

    pub fn get(&mut self, model: &mut HumanModel, p: &Predicate) -> ObjectSet {
        if let Some(&s) = self.sets.get(p) {
            return s;
        }
        let s = set_of(model.useful_objects(self.state, p));
        self.sets.insert(p.clone(), s);
        s
    }
}

/// P(p* | τ, u) from the goal posterior and the subgoal model, keeping only
/// (goal, predicate) pairs for which some object the utterance literally
/// describes would help.
pub fn predicate_posterior(
    model: &mut HumanModel,
    posterior: &GoalPosterior,
    s: &WorldState,
    formula: &ConstraintFormula,
) -> PredicatePosterior {
    let literal = set_of(s.objects().filter(|o| formula.admits(s, o)).map(|o| o.id));
    let mut useful = UsefulCache::new(s);
    let mut kept: BTreeMap<Predicate, f64> = BTreeMap::new();
    let mut all: BTreeMap<Predicate, f64> = BTreeMap::new();
    for (g, pg) in &posterior.entries {
        if *pg == 0.0 {
            continue;
        }
        for (k, pk) in subgoal_distribution(g, s) {
            let p = &g.predicates[k];
            *all.entry(p.clone()).or_default() += pg * pk;
            if useful.get(model, p) & literal != 0 {
                *kept.entry(p.clone()).or_default() += pg * pk;
            }
        }
    }
    let inconsistent = kept.is_empty();
    let chosen = if inconsistent { all } else { kept };
    let z: f64 = chosen.values().sum();
    PredicatePosterior { entries: chosen.into_iter().map(|(p, m)| (p, m / z)).collect(), inconsistent }
}

/// The subject of a QSVO tuple: class with its optional qualifier.
pub type Subject = (ObjectClass, Option<Qualifier>);

/// The factored QSVO distribution
/// log P[Q] + log P[V] + log P[S|Q,V] + log P[O|Q,V].
#[derive(Debug, Clone, PartialEq)]
pub struct TupleDistribution {
    pub quantifiers: Vec<Quantifier>,
    pub verbs: Vec<Verb>,
    pub subjects: Vec<Subject>,
    pub objects: Vec<Option<Target>>,
    pub p_q: Vec<f64>,
    pub p_v: Vec<f64>,
    /// Indexed `[q][v][s]`.
    pub p_s: Vec<Vec<Vec<f64>>>,
    /// Indexed `[q][v][o]`.
    pub p_o: Vec<Vec<Vec<f64>>>,
}

fn smooth(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    let z = total + EPSILON * counts.len() as f64;
    counts.iter().map(|c| (c + EPSILON) / z).collect()
}

impl TupleDistribution {
    /// Builds the factors from an exact predicate posterior. The
    /// vocabularies are the values occurring in `space`, which must include
    /// the posterior's support.
    pub fn from_posterior(post: &PredicatePosterior, space: &[Predicate]) -> TupleDistribution {
        let mut quantifiers: Vec<Quantifier> = space.iter().map(|p| p.quantifier).collect();
        let mut verbs: Vec<Verb> = space.iter().map(|p| p.verb).collect();
        let mut subjects: Vec<Subject> = space.iter().map(|p| (p.subject, p.qualifier)).collect();
        let mut objects: Vec<Option<Target>> = space.iter().map(|p| p.object).collect();
        quantifiers.sort();
        quantifiers.dedup();
        verbs.sort();
        verbs.dedup();
        subjects.sort();
        subjects.dedup();
        objects.sort();
        objects.dedup();
        let (nq, nv, ns, no) = (quantifiers.len(), verbs.len(), subjects.len(), objects.len());
        let mut cq = vec![0.0; nq];
        let mut cv = vec![0.0; nv];
        let mut cs = vec![vec![vec![0.0; ns]; nv]; nq];
        let mut co = vec![vec![vec![0.0; no]; nv]; nq];
        for (p, m) in &post.entries {
            let q = quantifiers.binary_search(&p.quantifier).expect("in space");
            let v = verbs.binary_search(&p.verb).expect("in space");
            let s = subjects.binary_search(&(p.subject, p.qualifier)).expect("in space");
            let o = objects.binary_search(&p.object).expect("in space");
            cq[q] += m;
            cv[v] += m;
            cs[q][v][s] += m;
            co[q][v][o] += m;
        }
        TupleDistribution {
            p_q: smooth(&cq),
            p_v: smooth(&cv),
            p_s: cs.iter().map(|row| row.iter().map(|c| smooth(c)).collect()).collect(),
            p_o: co.iter().map(|row| row.iter().map(|c| smooth(c)).collect()).collect(),
            quantifiers,
            verbs,
            subjects,
            objects,
        }
    }

    /// Combined log-score of tuple indices (q, v, s, o).
    pub fn log_score(&self, q: usize, v: usize, s: usize, o: usize) -> f64 {
        self.p_q[q].ln() + self.p_v[v].ln() + self.p_s[q][v][s].ln() + self.p_o[q][v][o].ln()
    }

    /// Σ exp(log-score) over every tuple of the vocabularies.
    pub fn total_mass(&self) -> f64 {
        let mut total = 0.0;
        for q in 0..self.quantifiers.len() {
            for v in 0..self.verbs.len() {
                for s in 0..self.subjects.len() {
                    for o in 0..self.objects.len() {
                        total += self.log_score(q, v, s, o).exp();
                    }
                }
            }
        }
        total
    }

    /// The highest-scoring tuple, first in vocabulary order on ties.
    pub fn argmax(&self) -> Predicate {
        let mut best = (f64::NEG_INFINITY, (0, 0, 0, 0));
        for q in 0..self.quantifiers.len() {
            for v in 0..self.verbs.len() {
                for s in 0..self.subjects.len() {
                    for o in 0..self.objects.len() {
                        let x = self.log_score(q, v, s, o);
                        if x > best.0 + TIE_EPS {
                            best = (x, (q, v, s, o));
                        }
                    }
                }
            }
        }
        let (q, v, s, o) = best.1;
        Predicate {
            quantifier: self.quantifiers[q],
            subject: self.subjects[s].0,
            qualifier: self.subjects[s].1,
            verb: self.verbs[v],
            object: self.objects[o],
        }
    }
}

/// All distinct predicates of the goal space of `s0`, sorted.
pub fn predicate_space(s0: &WorldState) -> Vec<Predicate> {
    let mut ps: Vec<Predicate> = crate::goal::enumerate_goal_space(s0).into_iter().flat_map(|g| g.predicates).collect();
    ps.sort();
    ps.dedup();
    ps
}

/// Plan recognition: the predicate posterior given trajectory and
/// utterance, its argmax, and the factored tuple distribution.
pub fn plan_recognition(
    model: &mut HumanModel,
    s0: &WorldState,
    steps: &[Step],
    formula: &ConstraintFormula,
    params: &RationalityParams,
) -> Result<(Predicate, PredicatePosterior, TupleDistribution), FiserError> {
    let post = goal_posterior(model, s0, steps, params)?;
    let s = state_at(s0, steps, steps.len());
    let preds = predicate_posterior(model, &post, &s, formula);
    let p = preds.argmax().ok_or(FiserError::EmptyGoalSpace)?.clone();
    let tuples = TupleDistribution::from_posterior(&preds, &predicate_space(s0));
    Ok((p, preds, tuples))
}

/// What task recognition conditions on.
#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    /// A committed subgoal p*.
    Subgoal(Predicate),
    /// A distribution over subgoals, marginalised inside recognition.
    Marginal(Vec<(Predicate, f64)>),
}

/// Pragmatic-listener weights for the objects `formula` could mean among
/// those useful for one predicate. Indefinite requests do not invite the
/// speaker-alternative reasoning, so every literal candidate weighs the
/// same.
pub fn listener_weights(
    lex: &Lexicon,
    useful: ObjectSet,
    formula: &ConstraintFormula,
    params: &RationalityParams,
) -> Vec<(ObjectId, f64)> {
    let literal = set_of(
        (0..lex.len())
            .find(|&u| lex.formulas[u] == formula.meaning())
            .map(|u| members(lex.extension(u)).collect::<Vec<_>>())
            .unwrap_or_default(),
    );
    let cand = literal & useful;
    if cand == 0 {
        return Vec::new();
    }
    let uniform = || {
        let n = f64::from(cand.count_ones());
        members(cand).map(|o| (o, 1.0 / n)).collect()
    };
    if matches!(formula.det, Determiner::A | Determiner::OneOf) {
        return uniform();
    }
    let Some(u) = lex.index_of(formula) else { return uniform() };
    let game = Game::new(lex, useful, params.lambda, params.alpha);
    let l1 = game.l1(u);
    if l1.is_empty() {
        uniform()
    } else {
        l1
    }
}

/// Resolves the utterance into a hand-over task. Ties in listener weight
/// go to the object whose color the preference prior favours, then to the
/// lowest id.
pub fn task_recognition(
    model: &mut HumanModel,
    s: &WorldState,
    evidence: &Evidence,
    formula: &ConstraintFormula,
    params: &RationalityParams,
    prior: &PreferencePrior,
) -> Result<RobotTask, FiserError> {
    let lex = Lexicon::new(s);
    let mut useful = UsefulCache::new(s);
    let mut score: BTreeMap<ObjectId, f64> = BTreeMap::new();
    let weighted: Vec<(Predicate, f64)> = match evidence {
        Evidence::Subgoal(p) => vec![(p.clone(), 1.0)],
        Evidence::Marginal(m) => m.clone(),
    };
    for (p, m) in &weighted {
        if *m == 0.0 {
            continue;
        }
        let f = useful.get(model, p);
        for (o, w) in listener_weights(&lex, f, formula, params) {
            *score.entry(o).or_default() += m * w;
        }
    }
    let best = score.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<ObjectId> = score.iter().filter(|(_, &w)| w >= best - TIE_EPS && w > 0.0).map(|(&o, _)| o).collect();
    let pick = tied
        .iter()
        .copied()
        .max_by(|&a, &b| {
            let pa = s.object(a).and_then(|e| e.attributes.color).map_or(0.0, |c| prior.mass(c));
            let pb = s.object(b).and_then(|e| e.attributes.color).map_or(0.0, |c| prior.mass(c));
            pa.total_cmp(&pb).then(b.cmp(&a))
        })
        .ok_or(FiserError::NoCandidate)?;
    Ok(RobotTask::HeldByHuman(pick))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Task recognition marginalises over subgoals.
    Fiser,
    /// Plan recognition commits to p* first.
    FiserPr,
}

/// The robot's view of an episode.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub initial: &'a WorldState,
    pub trajectory: &'a [Step],
    pub formula: &'a ConstraintFormula,
}

/// Full pipeline outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct FiserOutcome {
    pub task: RobotTask,
    pub plan: Vec<Action>,
    pub subgoal: Option<Predicate>,
    pub inconsistent: bool,
}

/// Plan recognition (variant-dependent), task recognition, then grounded
/// planning.
pub fn fiser_act(
    model: &mut HumanModel,
    obs: Observation<'_>,
    variant: Variant,
    budget: usize,
    params: &RationalityParams,
    prior: &PreferencePrior,
) -> Result<FiserOutcome, FiserError> {
    let s = state_at(obs.initial, obs.trajectory, obs.trajectory.len());
    let post = goal_posterior(model, obs.initial, obs.trajectory, params)?;
    let preds = predicate_posterior(model, &post, &s, obs.formula);
    let (evidence, subgoal) = match variant {
        Variant::FiserPr => {
            let p = preds.argmax().ok_or(FiserError::EmptyGoalSpace)?.clone();
            (Evidence::Subgoal(p.clone()), Some(p))
        }
        Variant::Fiser => (Evidence::Marginal(preds.entries.clone()), None),
    };
    let task = task_recognition(model, &s, &evidence, obs.formula, params, prior)?;
    let plan = grounded_planning(&s, task, budget)?;
    Ok(FiserOutcome { task, plan, subgoal, inconsistent: preds.inconsistent })
}

/// The action template of an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    MoveTo,
    PickUp,
    PickUpFrom,
    PutInto,
    PutOnto,
    TakeFrom,
    GiveToHuman,
    Open,
}

/// An action argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Arg {
    None,
    Fixture(Fixture),
    Object(ObjectId),
    Container(Container),
}

pub fn split(a: &Action) -> (ActionKind, Arg, Arg) {
    match *a {
        Action::MoveTo(f) => (ActionKind::MoveTo, Arg::Fixture(f), Arg::None),
        Action::PickUp(o) => (ActionKind::PickUp, Arg::Object(o), Arg::None),
        Action::PickUpFrom(o, f) => (ActionKind::PickUpFrom, Arg::Object(o), Arg::Fixture(f)),
        Action::PutInto(o, c) => (ActionKind::PutInto, Arg::Object(o), Arg::Container(c)),
        Action::PutOnto(o, f) => (ActionKind::PutOnto, Arg::Object(o), Arg::Fixture(f)),
        Action::TakeFrom(o, c) => (ActionKind::TakeFrom, Arg::Object(o), Arg::Container(c)),
        Action::GiveToHuman(o) => (ActionKind::GiveToHuman, Arg::Object(o), Arg::None),
        Action::Open(c) => (ActionKind::Open, Arg::Container(c), Arg::None),
    }
}

/// Factored next-action distribution
/// log P[Action] + log P[Arg1|Action] + log P[Arg2|Action] over the full
/// action grammar of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionScore {
    pub kind: BTreeMap<ActionKind, f64>,
    pub arg1: BTreeMap<ActionKind, BTreeMap<Arg, f64>>,
    pub arg2: BTreeMap<ActionKind, BTreeMap<Arg, f64>>,
}

impl ActionScore {
    pub fn log_score(&self, a: &Action) -> f64 {
        let (k, x, y) = split(a);
        let pk = self.kind.get(&k).copied().unwrap_or(0.0);
        let px = self.arg1.get(&k).and_then(|m| m.get(&x)).copied().unwrap_or(0.0);
        let py = self.arg2.get(&k).and_then(|m| m.get(&y)).copied().unwrap_or(0.0);
        pk.ln() + px.ln() + py.ln()
    }

    /// The applicable action with the highest score, first in canonical
    /// order on ties.
    pub fn best_applicable(&self, s: &WorldState) -> Option<Action> {
        let mut best: Option<(f64, Action)> = None;
        for a in applicable_actions(s, Agent::Robot) {
            let x = self.log_score(&a);
            if best.is_none_or(|(b, _)| x > b + TIE_EPS) {
                best = Some((x, a));
            }
        }
        best.map(|(_, a)| a)
    }
}

fn smooth_map<K: Ord + Copy>(keys: &[K], mass: &BTreeMap<K, f64>) -> BTreeMap<K, f64> {
    let counts: Vec<f64> = keys.iter().map(|k| mass.get(k).copied().unwrap_or(0.0)).collect();
    keys.iter().copied().zip(smooth(&counts)).collect()
}

/// Scores derived from the planner: every applicable action that starts
/// some shortest plan for `task` gets equal mass; factors are its
/// marginals, smoothed over the grammar.
pub fn action_scores(s: &WorldState, task: RobotTask, budget: usize) -> ActionScore {
    let grammar = s.action_grammar();
    let mut firsts = Vec::new();
    if let Ok(plan) = grounded_planning(s, task, budget) {
        if !plan.is_empty() {
            for a in applicable_actions(s, Agent::Robot) {
                let next = apply_action(s, Agent::Robot, &a).expect("applicable");
                if grounded_planning(&next, task, plan.len() - 1).is_ok() {
                    firsts.push(a);
                }
            }
        }
    }
    let w = 1.0 / firsts.len().max(1) as f64;
    let mut kinds: Vec<ActionKind> = grammar.iter().map(|a| split(a).0).collect();
    kinds.sort();
    kinds.dedup();
    let mut mk: BTreeMap<ActionKind, f64> = BTreeMap::new();
    let mut m1: BTreeMap<ActionKind, BTreeMap<Arg, f64>> = BTreeMap::new();
    let mut m2: BTreeMap<ActionKind, BTreeMap<Arg, f64>> = BTreeMap::new();
    for a in &firsts {
        let (k, x, y) = split(a);
        *mk.entry(k).or_default() += w;
        *m1.entry(k).or_default().entry(x).or_default() += w;
        *m2.entry(k).or_default().entry(y).or_default() += w;
    }
    let mut arg1 = BTreeMap::new();
    let mut arg2 = BTreeMap::new();
    for &k in &kinds {
        let mut xs: Vec<Arg> = grammar.iter().map(split).filter(|t| t.0 == k).map(|t| t.1).collect();
        let mut ys: Vec<Arg> = grammar.iter().map(split).filter(|t| t.0 == k).map(|t| t.2).collect();
        xs.sort();
        xs.dedup();
        ys.sort();
        ys.dedup();
        arg1.insert(k, smooth_map(&xs, m1.get(&k).unwrap_or(&BTreeMap::new())));
        arg2.insert(k, smooth_map(&ys, m2.get(&k).unwrap_or(&BTreeMap::new())));
    }
    ActionScore { kind: smooth_map(&kinds, &mk), arg1, arg2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::human::plan_human_trajectory;
    use crate::human::tests::{boxing_goal, boxing_world};
    use crate::language::parse;
    use crate::render::action_text;
    use crate::vocab::Noun;
    use crate::world::{Attributes, Location, ObjectEntity};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn boxing_episode() -> (WorldState, Vec<Step>) {
        let w = boxing_world();
        let greedy = RationalityParams { beta: f64::INFINITY, ..Default::default() };
        let steps =
            plan_human_trajectory(&mut HumanModel::new(), &w, &boxing_goal(), &greedy, &mut ChaCha8Rng::seed_from_u64(0))
                .unwrap();
        (w, steps[..6].to_vec())
    }

    #[test]
    fn dusty_one_in_the_boxing_scene() {
        let (w, steps) = boxing_episode();
        let u = parse("Please give me the dusty one.").unwrap();
        let params = RationalityParams::default();
        let mut m = HumanModel::new();
        let (p, preds, tuples) = plan_recognition(&mut m, &w, &steps, &u, &params).unwrap();
        assert_eq!(p, boxing_goal().predicates[0]);
        assert!(!preds.inconsistent);
        assert_eq!(tuples.argmax(), p);
        let obs = Observation { initial: &w, trajectory: &steps, formula: &u };
        for variant in [Variant::FiserPr, Variant::Fiser] {
            let out = fiser_act(&mut m, obs, variant, 5, &params, &PreferencePrior::default()).unwrap();
            assert_eq!(out.task, RobotTask::HeldByHuman(ObjectId(1)));
            let mut s = state_at(&w, &steps, steps.len());
            let mut text = Vec::new();
            for a in &out.plan {
                text.push(action_text(&s, a));
                s = apply_action(&s, Agent::Robot, a).unwrap();
            }
            assert_eq!(text.first().map(String::as_str), Some("move to sofa"));
            assert_eq!(text.last().map(String::as_str), Some("give document 2 to human"));
        }
    }

    #[test]
    fn empty_trajectory_leaves_the_prior() {
        let w = boxing_world();
        let post = goal_posterior(&mut HumanModel::new(), &w, &[], &RationalityParams::default()).unwrap();
        let prior = goal_prior(&w);
        assert_eq!(post.entries.len(), prior.len());
        for ((g, p), (h, q)) in post.entries.iter().zip(&prior) {
            assert_eq!(g, h);
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn posterior_normalises() {
        let (w, steps) = boxing_episode();
        let post = goal_posterior(&mut HumanModel::new(), &w, &steps, &RationalityParams::default()).unwrap();
        assert!((post.total() - 1.0).abs() < 1e-9);
        assert!(post.entries.iter().all(|(_, p)| *p >= 0.0));
        assert!(post.probability(&boxing_goal()) > 0.0);
    }

    #[test]
    fn single_literal_candidate_wins_regardless_of_pragmatics() {
        let (w, steps) = boxing_episode();
        let s = state_at(&w, &steps, steps.len());
        let u = parse("Please bring me the dusty document.").unwrap();
        let p = boxing_goal().predicates[0].clone();
        let task = task_recognition(
            &mut HumanModel::new(),
            &s,
            &Evidence::Subgoal(p),
            &u,
            &RationalityParams::default(),
            &PreferencePrior::default(),
        );
        assert_eq!(task, Ok(RobotTask::HeldByHuman(ObjectId(1))));
    }

    #[test]
    fn nothing_useful_means_no_candidate() {
        let (w, steps) = boxing_episode();
        let s = state_at(&w, &steps, steps.len());
        let u = parse("Could you pass the box?").unwrap();
        let p = boxing_goal().predicates[0].clone();
        let task = task_recognition(
            &mut HumanModel::new(),
            &s,
            &Evidence::Subgoal(p),
            &u,
            &RationalityParams::default(),
            &PreferencePrior::default(),
        );
        assert_eq!(task, Err(FiserError::NoCandidate));
    }

    #[test]
    fn smoothing_normalises() {
        let p = smooth(&[0.0, 0.25, 0.75]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > 0.0 && p[2] > p[1]);
    }

    #[test]
    fn tuple_factors_normalise_and_recover_the_mode() {
        let (w, _) = boxing_episode();
        let space = predicate_space(&w);
        let post = PredicatePosterior {
            entries: vec![(space[0].clone(), 0.3), (space[space.len() - 1].clone(), 0.7)],
            inconsistent: false,
        };
        let t = TupleDistribution::from_posterior(&post, &space);
        assert!((t.total_mass() - 1.0).abs() < 1e-9);
        assert_eq!(t.argmax(), space[space.len() - 1]);
        assert!((t.p_q.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unique_first_action_tops_the_action_scores() {
        let objects = vec![ObjectEntity {
            id: ObjectId(0),
            noun: Noun::named("document"),
            instance: 2,
            attributes: Attributes::default(),
            location: Location::OnTopOf(Fixture::Sofa),
        }];
        let w = WorldState::new(objects, vec![], Fixture::Table, Fixture::Floor).unwrap();
        let task = RobotTask::HeldByHuman(ObjectId(0));
        let scores = action_scores(&w, task, 5);
        assert_eq!(scores.best_applicable(&w), Some(Action::MoveTo(Fixture::Sofa)));
        assert!((scores.kind.values().sum::<f64>() - 1.0).abs() < 1e-9);
        for m in scores.arg1.values().chain(scores.arg2.values()) {
            assert!((m.values().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
