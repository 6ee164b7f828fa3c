//! Quantified goal predicates, the goal-template library and the human's
//! goal space.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{catalog, Color, Fixture, Genre, Noun, ObjectClass, Size};
use crate::world::{Agent, Container, Location, ObjectEntity, ObjectId, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("malformed predicate: {0}")]
    Malformed(String),
    #[error("template {template} cannot be instantiated: no members for {class}")]
    Uninstantiable { template: usize, class: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantifier {
    ForAll,
    Exists,
}

impl Quantifier {
    pub const ALL: [Quantifier; 2] = [Quantifier::ForAll, Quantifier::Exists];

    pub fn name(self) -> &'static str {
        match self {
            Quantifier::ForAll => "for-all",
            Quantifier::Exists => "exists",
        }
    }
}

/// Boolean object state that a predicate may constrain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateAttr {
    Open,
    Toggled,
    Cooked,
    Frozen,
    Sliced,
    Dusty,
    Stained,
}

impl StateAttr {
    pub const ALL: [StateAttr; 7] = [
        StateAttr::Open,
        StateAttr::Toggled,
        StateAttr::Cooked,
        StateAttr::Frozen,
        StateAttr::Sliced,
        StateAttr::Dusty,
        StateAttr::Stained,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateAttr::Open => "open",
            StateAttr::Toggled => "toggled",
            StateAttr::Cooked => "cooked",
            StateAttr::Frozen => "frozen",
            StateAttr::Sliced => "sliced",
            StateAttr::Dusty => "dusty",
            StateAttr::Stained => "stained",
        }
    }

    pub fn value_of(self, o: &ObjectEntity) -> Option<bool> {
        let a = &o.attributes;
        match self {
            StateAttr::Open => a.open,
            StateAttr::Toggled => a.toggled,
            StateAttr::Cooked => Some(a.cooked),
            StateAttr::Frozen => Some(a.frozen),
            StateAttr::Sliced => Some(a.sliced),
            StateAttr::Dusty => Some(a.dusty),
            StateAttr::Stained => Some(a.stained),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verb", content = "state")]
pub enum Verb {
    Inside,
    OnTopOf,
    HeldByHuman,
    StateEquals(StateAttr, bool),
}

impl Verb {
    pub fn name(self) -> String {
        match self {
            Verb::Inside => "inside".into(),
            Verb::OnTopOf => "on-top-of".into(),
            Verb::HeldByHuman => "held-by-human".into(),
            Verb::StateEquals(a, v) => format!("{}={v}", a.name()),
        }
    }
}

/// The object slot of a predicate: a fixture, or any member of a class of
/// portable containers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Fixture(Fixture),
    Class(ObjectClass),
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Fixture(f) => f.name(),
            Target::Class(c) => c.surface(),
        }
    }

    pub fn admits(self, state: &WorldState, c: Container) -> bool {
        match (self, c) {
            (Target::Fixture(f), Container::Fixture(g)) => f == g,
            (Target::Class(class), Container::Object(o)) => state.object(o).is_some_and(|e| class.contains(e.noun)),
            _ => false,
        }
    }
}

/// Optional attribute restriction on a predicate's subject class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qualifier {
    Color(Color),
    Size(Size),
    Dusty,
}

impl Qualifier {
    pub fn holds(self, o: &ObjectEntity) -> bool {
        match self {
            Qualifier::Color(c) => o.attributes.color == Some(c),
            Qualifier::Size(s) => o.attributes.size == Some(s),
            Qualifier::Dusty => o.attributes.dusty,
        }
    }
}

/// A quantified goal condition ⟨Quantifier, Subject, Verb, Object⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Predicate {
    pub quantifier: Quantifier,
    pub subject: ObjectClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qualifier: Option<Qualifier>,
    pub verb: Verb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<Target>,
}

impl Predicate {
    pub fn new(quantifier: Quantifier, subject: ObjectClass, verb: Verb, object: Option<Target>) -> Result<Predicate, GoalError> {
        let p = Predicate { quantifier, subject, qualifier: None, verb, object };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), GoalError> {
        let ok = match (self.verb, self.object) {
            (Verb::Inside, Some(Target::Fixture(f))) => f.is_container(),
            (Verb::Inside, Some(Target::Class(c))) => catalog().nouns().any(|n| c.contains(n) && n.holds()),
            (Verb::OnTopOf, Some(Target::Fixture(f))) => !f.is_container(),
            (Verb::HeldByHuman | Verb::StateEquals(..), None) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GoalError::Malformed(self.to_string()))
        }
    }

    pub fn is_member(&self, o: &ObjectEntity) -> bool {
        self.subject.contains(o.noun) && self.qualifier.is_none_or(|q| q.holds(o))
    }

    pub fn members<'a>(&'a self, state: &'a WorldState) -> impl Iterator<Item = &'a ObjectEntity> + 'a {
        state.objects().filter(move |o| self.is_member(o))
    }

    /// Whether a single object stands in the verb relation.
    pub fn holds_for(&self, state: &WorldState, o: &ObjectEntity) -> bool {
        match self.verb {
            Verb::Inside => match (o.location, self.object) {
                (Location::Inside(c), Some(t)) => t.admits(state, c),
                _ => false,
            },
            Verb::OnTopOf => matches!((o.location, self.object), (Location::OnTopOf(f), Some(Target::Fixture(g))) if f == g),
            Verb::HeldByHuman => o.location == Location::HeldBy(Agent::Human),
            Verb::StateEquals(attr, v) => attr.value_of(o) == Some(v),
        }
    }

    /// Mentions a class (as subject or container target) that covers `noun`.
    pub fn mentions(&self, noun: Noun) -> bool {
        self.subject.contains(noun) || matches!(self.object, Some(Target::Class(c)) if c.contains(noun))
    }
}

/// Evaluates a predicate on a state. Universals over an empty class hold.
pub fn satisfied(p: &Predicate, state: &WorldState) -> bool {
    let mut members = p.members(state);
    match p.quantifier {
        Quantifier::ForAll => members.all(|o| p.holds_for(state, o)),
        Quantifier::Exists => members.any(|o| p.holds_for(state, o)),
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let subject = match self.subject {
            ObjectClass::Noun(n) => n.name().to_string(),
            ObjectClass::Genre(g) => g.name().to_string(),
        };
        let subject = match self.qualifier {
            Some(Qualifier::Color(c)) => format!("{} {subject}", c.name()),
            Some(Qualifier::Size(s)) => format!("{} {subject}", s.name()),
            Some(Qualifier::Dusty) => format!("dusty {subject}"),
            None => subject,
        };
        let object = match self.object {
            Some(Target::Fixture(x)) => x.name().to_string(),
            Some(Target::Class(ObjectClass::Noun(n))) => n.name().to_string(),
            Some(Target::Class(ObjectClass::Genre(g))) => g.name().to_string(),
            None => "-".into(),
        };
        write!(f, "<{}, {subject}, {}, {object}>", self.quantifier.name(), self.verb.name())
    }
}

fn parse_class(word: &str) -> Result<ObjectClass, GoalError> {
    let cat = catalog();
    cat.noun(word)
        .map(ObjectClass::Noun)
        .or_else(|| cat.genre(word).map(ObjectClass::Genre))
        .ok_or_else(|| GoalError::UnknownClass(word.to_string()))
}

impl FromStr for Predicate {
    type Err = GoalError;

    /// Parses the display form, e.g. `<for-all, document, inside, box>`.
    fn from_str(s: &str) -> Result<Predicate, GoalError> {
        let inner = s.trim().trim_start_matches(['<', '⟨']).trim_end_matches(['>', '⟩']);
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [q, subj, verb, obj] = parts[..] else {
            return Err(GoalError::Malformed(s.to_string()));
        };
        let quantifier = match q {
            "for-all" | "forall" => Quantifier::ForAll,
            "exists" => Quantifier::Exists,
            _ => return Err(GoalError::Malformed(format!("quantifier {q}"))),
        };
        let mut words: Vec<&str> = subj.split_whitespace().collect();
        let head = words.pop().ok_or_else(|| GoalError::Malformed(s.to_string()))?;
        let qualifier = match words[..] {
            [] => None,
            ["dusty"] => Some(Qualifier::Dusty),
            [w] => Color::from_name(w)
                .map(Qualifier::Color)
                .or_else(|| Size::from_name(w).map(Qualifier::Size))
                .map(Some)
                .ok_or_else(|| GoalError::Malformed(format!("qualifier {w}")))?,
            _ => return Err(GoalError::Malformed(s.to_string())),
        };
        let subject = parse_class(head)?;
        let verb = match verb {
            "inside" => Verb::Inside,
            "on-top-of" => Verb::OnTopOf,
            "held-by-human" => Verb::HeldByHuman,
            other => {
                let (attr, val) = other.split_once('=').ok_or_else(|| GoalError::Malformed(format!("verb {other}")))?;
                let attr = StateAttr::ALL
                    .into_iter()
                    .find(|a| a.name() == attr)
                    .ok_or_else(|| GoalError::Malformed(format!("attribute {attr}")))?;
                let val: bool = val.parse().map_err(|_| GoalError::Malformed(format!("value {val}")))?;
                Verb::StateEquals(attr, val)
            }
        };
        let object = match obj {
            "-" | "" => None,
            name => Some(Fixture::from_name(name).map(Target::Fixture).map_or_else(|| parse_class(name).map(Target::Class), Ok)?),
        };
        let p = Predicate { quantifier, subject, qualifier, verb, object };
        p.check()?;
        Ok(p)
    }
}

/// A concrete task for the robot over specific objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotTask {
    HeldByHuman(ObjectId),
    Inside(ObjectId, Container),
    OnTopOf(ObjectId, Fixture),
}

impl RobotTask {
    pub fn object(self) -> ObjectId {
        match self {
            RobotTask::HeldByHuman(o) | RobotTask::Inside(o, _) | RobotTask::OnTopOf(o, _) => o,
        }
    }

    pub fn satisfied(self, state: &WorldState) -> bool {
        let Some(o) = state.object(self.object()) else { return false };
        match self {
            RobotTask::HeldByHuman(_) => o.location == Location::HeldBy(Agent::Human),
            RobotTask::Inside(_, c) => o.location == Location::Inside(c),
            RobotTask::OnTopOf(_, f) => o.location == Location::OnTopOf(f),
        }
    }

    pub fn describe(self, state: &WorldState) -> String {
        let name = |o: ObjectId| state.object(o).map(|e| e.name()).unwrap_or_else(|| o.to_string());
        match self {
            RobotTask::HeldByHuman(o) => format!("human-holding({})", name(o)),
            RobotTask::Inside(o, c) => format!("inside({}, {})", name(o), state.container_name(c)),
            RobotTask::OnTopOf(o, f) => format!("on-top-of({}, {f})", name(o)),
        }
    }
}

/// A grounded human goal: an ordered list of predicates worked on in turn.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HumanGoal {
    pub template: usize,
    pub bindings: Vec<Noun>,
    pub predicates: Vec<Predicate>,
}

impl HumanGoal {
    /// Index of the first unsatisfied predicate, the one currently being
    /// worked on.
    pub fn current(&self, state: &WorldState) -> Option<usize> {
        self.predicates.iter().position(|p| !satisfied(p, state))
    }

    pub fn remaining<'a>(&'a self, state: &'a WorldState) -> impl Iterator<Item = &'a Predicate> + 'a {
        self.predicates.iter().filter(move |p| !satisfied(p, state))
    }

    pub fn complete(&self, state: &WorldState) -> bool {
        self.current(state).is_none()
    }

    pub fn name(&self) -> &'static str {
        &templates()[self.template].name
    }
}

/// Fraction of the goal's predicates that hold.
pub fn reward(state: &WorldState, goal: &HumanGoal) -> f64 {
    if goal.predicates.is_empty() {
        return 1.0;
    }
    let hit = goal.predicates.iter().filter(|p| satisfied(p, state)).count();
    hit as f64 / goal.predicates.len() as f64
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SubjectSkeleton {
    Slot(usize),
    Class(ObjectClass),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PredicateSkeleton {
    quantifier: Quantifier,
    subject: SubjectSkeleton,
    verb: Verb,
    object: Target,
}

#[derive(Debug, Clone)]
pub struct GoalTemplate {
    pub id: usize,
    pub name: String,
    pub description: String,
    pub slots: Vec<Genre>,
    skeletons: Vec<PredicateSkeleton>,
}

#[derive(Deserialize)]
struct RawLibrary {
    templates: Vec<RawTemplate>,
}

#[derive(Deserialize)]
struct RawTemplate {
    id: usize,
    name: String,
    description: String,
    slots: Vec<String>,
    predicates: Vec<[String; 4]>,
}

fn parse_ref(s: &str) -> Result<ObjectClass, GoalError> {
    match s.split_once(':') {
        Some(("noun", n)) => catalog().noun(n).map(ObjectClass::Noun).ok_or_else(|| GoalError::UnknownClass(n.into())),
        Some(("genre", g)) => catalog().genre(g).map(ObjectClass::Genre).ok_or_else(|| GoalError::UnknownClass(g.into())),
        _ => Err(GoalError::Malformed(s.into())),
    }
}

fn load_templates(text: &str) -> Result<Vec<GoalTemplate>, GoalError> {
    let raw: RawLibrary = serde_json::from_str(text).map_err(|e| GoalError::Malformed(e.to_string()))?;
    let mut out = Vec::new();
    for (i, t) in raw.templates.into_iter().enumerate() {
        if t.id != i {
            return Err(GoalError::Malformed(format!("template ids must be dense, got {}", t.id)));
        }
        let slots = t
            .slots
            .iter()
            .map(|g| catalog().genre(g).ok_or_else(|| GoalError::UnknownClass(g.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut skeletons = Vec::new();
        for [q, s, v, o] in t.predicates {
            let quantifier = match q.as_str() {
                "for-all" => Quantifier::ForAll,
                "exists" => Quantifier::Exists,
                _ => return Err(GoalError::Malformed(q)),
            };
            let subject = match s.strip_prefix('$') {
                Some(idx) => {
                    let idx: usize = idx.parse().map_err(|_| GoalError::Malformed(s.clone()))?;
                    if idx >= slots.len() {
                        return Err(GoalError::Malformed(s));
                    }
                    SubjectSkeleton::Slot(idx)
                }
                None => SubjectSkeleton::Class(parse_ref(&s)?),
            };
            let verb = match v.as_str() {
                "inside" => Verb::Inside,
                "on-top-of" => Verb::OnTopOf,
                _ => return Err(GoalError::Malformed(v)),
            };
            let object = match o.split_once(':') {
                Some(("fixture", f)) => Target::Fixture(Fixture::from_name(f).ok_or_else(|| GoalError::UnknownClass(f.into()))?),
                _ => Target::Class(parse_ref(&o)?),
            };
            skeletons.push(PredicateSkeleton { quantifier, subject, verb, object });
        }
        out.push(GoalTemplate { id: t.id, name: t.name, description: t.description, slots, skeletons });
    }
    Ok(out)
}

static TEMPLATES: LazyLock<Vec<GoalTemplate>> = LazyLock::new(|| {
    load_templates(include_str!("../data/goal_templates.json")).expect("bundled goal templates are valid")
});

/// The goal-template library, in id order.
pub fn templates() -> &'static [GoalTemplate] {
    &TEMPLATES
}

fn present_nouns(world: &WorldState) -> BTreeMap<Noun, usize> {
    let mut counts = BTreeMap::new();
    for o in world.objects() {
        *counts.entry(o.noun).or_insert(0) += 1;
    }
    counts
}

impl GoalTemplate {
    /// Candidate nouns for each slot: nouns of the slot genre present in the world.
    pub fn slot_candidates(&self, world: &WorldState) -> Vec<Vec<Noun>> {
        let present = present_nouns(world);
        self.slots.iter().map(|&g| present.keys().copied().filter(|n| n.genre() == g).collect()).collect()
    }

    fn fixed_classes_present(&self, world: &WorldState) -> Result<(), GoalError> {
        let present = present_nouns(world);
        let has = |c: ObjectClass| present.keys().any(|&n| c.contains(n));
        for sk in &self.skeletons {
            if let SubjectSkeleton::Class(c) = sk.subject {
                if !has(c) {
                    return Err(GoalError::Uninstantiable { template: self.id, class: c.to_string() });
                }
            }
            if let Target::Class(c) = sk.object {
                if !has(c) {
                    return Err(GoalError::Uninstantiable { template: self.id, class: c.to_string() });
                }
            }
        }
        Ok(())
    }

    /// Every valid slot binding, in lexicographic order. Slots of the same
    /// genre take distinct nouns.
    pub fn bindings(&self, world: &WorldState) -> Vec<Vec<Noun>> {
        if self.fixed_classes_present(world).is_err() {
            return Vec::new();
        }
        let cands = self.slot_candidates(world);
        let mut out = vec![Vec::new()];
        for c in &cands {
            let mut next = Vec::new();
            for partial in &out {
                for &n in c {
                    if !partial.contains(&n) {
                        let mut b = partial.clone();
                        b.push(n);
                        next.push(b);
                    }
                }
            }
            out = next;
        }
        out
    }

    pub fn ground(&self, bindings: &[Noun]) -> HumanGoal {
        let predicates = self
            .skeletons
            .iter()
            .map(|sk| Predicate {
                quantifier: sk.quantifier,
                subject: match sk.subject {
                    SubjectSkeleton::Slot(i) => ObjectClass::Noun(bindings[i]),
                    SubjectSkeleton::Class(c) => c,
                },
                qualifier: None,
                verb: sk.verb,
                object: Some(sk.object),
            })
            .collect();
        HumanGoal { template: self.id, bindings: bindings.to_vec(), predicates }
    }
}

/// Samples one grounding of a template uniformly over its valid bindings.
pub fn instantiate_template<R: Rng + ?Sized>(t: &GoalTemplate, world: &WorldState, rng: &mut R) -> Result<HumanGoal, GoalError> {
    t.fixed_classes_present(world)?;
    for (genre, cands) in t.slots.iter().zip(t.slot_candidates(world)) {
        if cands.is_empty() {
            return Err(GoalError::Uninstantiable { template: t.id, class: genre.to_string() });
        }
    }
    let all = t.bindings(world);
    let chosen = all
        .choose(rng)
        .ok_or_else(|| GoalError::Uninstantiable { template: t.id, class: "distinct slot nouns".into() })?;
    Ok(t.ground(chosen))
}

/// The complete grounded goal space of a world: every template under every
/// valid binding.
pub fn enumerate_goal_space(world: &WorldState) -> Vec<HumanGoal> {
    templates().iter().flat_map(|t| t.bindings(world).into_iter().map(move |b| t.ground(&b))).collect()
}

/// A goal with its prior probability: uniform over instantiable templates,
/// then uniform over each template's bindings.
pub fn goal_prior(world: &WorldState) -> Vec<(HumanGoal, f64)> {
    let per_template: Vec<Vec<Vec<Noun>>> = templates().iter().map(|t| t.bindings(world)).collect();
    let live = per_template.iter().filter(|b| !b.is_empty()).count();
    let mut out = Vec::new();
    for (t, bindings) in templates().iter().zip(&per_template) {
        let mass = 1.0 / live as f64 / bindings.len() as f64;
        for b in bindings {
            out.push((t.ground(b), mass));
        }
    }
    out
}

/// Samples a goal from the prior.
pub fn sample_goal<R: Rng + ?Sized>(world: &WorldState, rng: &mut R) -> Option<HumanGoal> {
    let live: Vec<&GoalTemplate> = templates().iter().filter(|t| !t.bindings(world).is_empty()).collect();
    let t = live.choose(rng)?;
    instantiate_template(t, world, rng).ok()
}
