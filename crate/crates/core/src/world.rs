//! Object-centric world state and the deterministic transition function.
//!
//! A [`WorldState`] is an immutable value: [`apply_action`] returns a new
//! state and never mutates its input. Agents move between fixtures by
//! teleporting and can only manipulate objects at their current fixture.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{Color, Fixture, Genre, Noun, Size};

/// Unique object index within one world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agent {
    Human,
    Robot,
}

/// Something objects can be put inside: a container fixture or a portable
/// container object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Container {
    Fixture(Fixture),
    Object(ObjectId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    OnTopOf(Fixture),
    Inside(Container),
    HeldBy(Agent),
}

/// Attribute values of an object. `open` is `Some` exactly for openable
/// nouns; `toggled` is `Some` for switchable ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attributes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Size>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dusty: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stained: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toggled: Option<bool>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub cooked: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub frozen: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub sliced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObjectEntity {
    pub id: ObjectId,
    pub noun: Noun,
    /// Per-noun instance number used in display names ("document 2").
    pub instance: u32,
    pub attributes: Attributes,
    pub location: Location,
}

impl ObjectEntity {
    pub fn genre(&self) -> Genre {
        self.noun.genre()
    }

    pub fn name(&self) -> String {
        format!("{} {}", self.noun.name(), self.instance)
    }

    pub fn is_closed(&self) -> bool {
        self.attributes.open == Some(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub at: Fixture,
    pub holding: Option<ObjectId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "args")]
pub enum Action {
    MoveTo(Fixture),
    PickUp(ObjectId),
    PickUpFrom(ObjectId, Fixture),
    PutInto(ObjectId, Container),
    PutOnto(ObjectId, Fixture),
    TakeFrom(ObjectId, Container),
    GiveToHuman(ObjectId),
    Open(Container),
}

impl Action {
    /// The object the action manipulates, if any.
    pub fn object(&self) -> Option<ObjectId> {
        match *self {
            Action::MoveTo(_) => None,
            Action::PickUp(o)
            | Action::PickUpFrom(o, _)
            | Action::PutInto(o, _)
            | Action::PutOnto(o, _)
            | Action::TakeFrom(o, _)
            | Action::GiveToHuman(o) => Some(o),
            Action::Open(Container::Object(o)) => Some(o),
            Action::Open(Container::Fixture(_)) => None,
        }
    }

    pub fn is_pick(&self) -> bool {
        matches!(self, Action::PickUp(_) | Action::PickUpFrom(..) | Action::TakeFrom(..))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("{agent:?} is at {at}, not where {what} is")]
    NotAtLocation { agent: Agent, at: Fixture, what: String },
    #[error("{0} is closed")]
    ContainerClosed(String),
    #[error("{0:?} is already holding something")]
    HandsFull(Agent),
    #[error("{0:?} is not holding that object")]
    HandEmpty(Agent),
    #[error("object {0} is not present there")]
    ObjectNotPresent(ObjectId),
    #[error("{0} cannot be opened")]
    NotOpenable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("object key {key} does not match entity id {id}")]
    IdMismatch { key: ObjectId, id: ObjectId },
    #[error("duplicate display name {0}")]
    DuplicateName(String),
    #[error("object {0}: open state must be present iff the noun is openable")]
    OpenState(ObjectId),
    #[error("object {0}: invalid location")]
    BadLocation(ObjectId),
    #[error("agent {0:?} holding record disagrees with object locations")]
    Holding(Agent),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WorldState {
    objects: BTreeMap<ObjectId, ObjectEntity>,
    /// Open flags of the openable fixtures, indexed by [`Fixture::index`].
    fixture_open: [bool; 16],
    human: AgentState,
    robot: AgentState,
}

impl WorldState {
    /// An empty room with both agents on the floor and every openable
    /// fixture closed.
    pub fn empty() -> WorldState {
        WorldState {
            objects: BTreeMap::new(),
            fixture_open: [false; 16],
            human: AgentState { at: Fixture::Floor, holding: None },
            robot: AgentState { at: Fixture::Floor, holding: None },
        }
    }

    /// Builds and validates a state.
    pub fn new(
        objects: impl IntoIterator<Item = ObjectEntity>,
        open_fixtures: impl IntoIterator<Item = Fixture>,
        human_at: Fixture,
        robot_at: Fixture,
    ) -> Result<WorldState, StateError> {
        let mut state = WorldState::empty();
        for f in open_fixtures {
            if f.openable() {
                state.fixture_open[f.index()] = true;
            }
        }
        state.human.at = human_at;
        state.robot.at = robot_at;
        for o in objects {
            if let Location::HeldBy(a) = o.location {
                state.agent_mut(a).holding = Some(o.id);
            }
            state.objects.insert(o.id, o);
        }
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let mut names = std::collections::BTreeSet::new();
        let mut held = [None, None];
        for (&key, o) in &self.objects {
            if key != o.id {
                return Err(StateError::IdMismatch { key, id: o.id });
            }
            if !names.insert((o.noun, o.instance)) {
                return Err(StateError::DuplicateName(o.name()));
            }
            if o.attributes.open.is_some() != o.noun.openable() {
                return Err(StateError::OpenState(o.id));
            }
            match o.location {
                Location::OnTopOf(f) if f.is_container() => return Err(StateError::BadLocation(o.id)),
                Location::Inside(Container::Fixture(f)) if !f.is_container() => {
                    return Err(StateError::BadLocation(o.id))
                }
                Location::Inside(Container::Object(c)) => {
                    let parent = self.objects.get(&c).ok_or(StateError::BadLocation(o.id))?;
                    // one level of portable nesting only
                    if !parent.noun.holds()
                        || o.noun.holds()
                        || matches!(parent.location, Location::Inside(Container::Object(_)))
                    {
                        return Err(StateError::BadLocation(o.id));
                    }
                }
                Location::HeldBy(a) => {
                    let slot = &mut held[a as usize];
                    if slot.is_some() {
                        return Err(StateError::Holding(a));
                    }
                    *slot = Some(o.id);
                }
                _ => {}
            }
        }
        for a in [Agent::Human, Agent::Robot] {
            if self.agent(a).holding != held[a as usize] {
                return Err(StateError::Holding(a));
            }
        }
        Ok(())
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectEntity> {
        self.objects.values()
    }

    pub fn object(&self, id: ObjectId) -> Option<&ObjectEntity> {
        self.objects.get(&id)
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.objects.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn agent(&self, agent: Agent) -> &AgentState {
        match agent {
            Agent::Human => &self.human,
            Agent::Robot => &self.robot,
        }
    }

    fn agent_mut(&mut self, agent: Agent) -> &mut AgentState {
        match agent {
            Agent::Human => &mut self.human,
            Agent::Robot => &mut self.robot,
        }
    }

    #[cfg(test)]
    pub(crate) fn insert_object(&mut self, o: ObjectEntity) {
        self.objects.insert(o.id, o);
    }

    #[cfg(test)]
    pub(crate) fn set_agent_at(&mut self, agent: Agent, f: Fixture) {
        self.agent_mut(agent).at = f;
    }

    #[cfg(test)]
    pub(crate) fn set_fixture_open(&mut self, f: Fixture, open: bool) {
        self.fixture_open[f.index()] = open;
    }

    #[cfg(test)]
    pub(crate) fn objects_mut(&mut self) -> impl Iterator<Item = &mut ObjectEntity> {
        self.objects.values_mut()
    }

    pub fn human(&self) -> &AgentState {
        &self.human
    }

    pub fn robot(&self) -> &AgentState {
        &self.robot
    }

    pub fn fixture_open(&self, f: Fixture) -> bool {
        self.fixture_open[f.index()]
    }

    /// Open fixtures in fixture order.
    pub fn open_fixtures(&self) -> impl Iterator<Item = Fixture> + '_ {
        Fixture::ALL.into_iter().filter(|f| f.openable() && self.fixture_open(*f))
    }

    pub fn find_by_name(&self, noun: Noun, instance: u32) -> Option<ObjectId> {
        self.objects.values().find(|o| o.noun == noun && o.instance == instance).map(|o| o.id)
    }

    /// The fixture an object ultimately rests at, or `None` when held.
    pub fn fixture_of(&self, id: ObjectId) -> Option<Fixture> {
        match self.objects.get(&id)?.location {
            Location::OnTopOf(f) | Location::Inside(Container::Fixture(f)) => Some(f),
            Location::Inside(Container::Object(c)) => self.fixture_of(c),
            Location::HeldBy(_) => None,
        }
    }

    /// Where an object is, counting held objects as being at the holder's fixture.
    pub fn place_of(&self, id: ObjectId) -> Option<Fixture> {
        match self.objects.get(&id)?.location {
            Location::HeldBy(a) => Some(self.agent(a).at),
            Location::Inside(Container::Object(c)) => self.place_of(c),
            _ => self.fixture_of(id),
        }
    }

    pub fn is_container_open(&self, c: Container) -> bool {
        match c {
            Container::Fixture(f) => !f.openable() || self.fixture_open(f),
            Container::Object(o) => self.objects.get(&o).is_some_and(|e| !e.is_closed()),
        }
    }

    /// Closed holders between an object and the open air, innermost first.
    pub fn closed_holders(&self, id: ObjectId) -> Vec<Container> {
        let mut out = Vec::new();
        let mut cur = id;
        while let Some(o) = self.objects.get(&cur) {
            match o.location {
                Location::Inside(c) => {
                    if !self.is_container_open(c) {
                        out.push(c);
                    }
                    match c {
                        Container::Object(p) => cur = p,
                        Container::Fixture(_) => break,
                    }
                }
                _ => break,
            }
        }
        out
    }

    /// Objects directly inside the given container, id-ascending.
    pub fn contents(&self, c: Container) -> impl Iterator<Item = &ObjectEntity> {
        self.objects.values().filter(move |o| o.location == Location::Inside(c))
    }

    pub fn container_name(&self, c: Container) -> String {
        match c {
            Container::Fixture(f) => f.name().to_string(),
            Container::Object(o) => self.objects.get(&o).map(|e| e.name()).unwrap_or_else(|| o.to_string()),
        }
    }

    fn object_or_err(&self, id: ObjectId) -> Result<&ObjectEntity, WorldError> {
        self.objects.get(&id).ok_or(WorldError::ObjectNotPresent(id))
    }

    fn require_here(&self, agent: Agent, id: ObjectId) -> Result<(), WorldError> {
        let at = self.agent(agent).at;
        match self.fixture_of(id) {
            Some(f) if f == at => Ok(()),
            Some(_) => Err(WorldError::NotAtLocation { agent, at, what: self.container_name(Container::Object(id)) }),
            None => Err(WorldError::ObjectNotPresent(id)),
        }
    }

    fn require_reachable(&self, id: ObjectId) -> Result<(), WorldError> {
        match self.closed_holders(id).first() {
            Some(&c) => Err(WorldError::ContainerClosed(self.container_name(c))),
            None => Ok(()),
        }
    }

    fn require_holding(&self, agent: Agent, id: ObjectId) -> Result<(), WorldError> {
        match self.agent(agent).holding {
            Some(h) if h == id => Ok(()),
            Some(_) => Err(WorldError::ObjectNotPresent(id)),
            None => Err(WorldError::HandEmpty(agent)),
        }
    }

    fn check_pick(&self, agent: Agent, id: ObjectId) -> Result<(), WorldError> {
        self.object_or_err(id)?;
        self.require_here(agent, id)?;
        self.require_reachable(id)?;
        if self.agent(agent).holding.is_some() {
            return Err(WorldError::HandsFull(agent));
        }
        Ok(())
    }

    fn check_container_here(&self, agent: Agent, c: Container) -> Result<(), WorldError> {
        let at = self.agent(agent).at;
        match c {
            Container::Fixture(f) => {
                if !f.is_container() {
                    return Err(WorldError::InvalidArgument(format!("{f} is not a container")));
                }
                if f != at {
                    return Err(WorldError::NotAtLocation { agent, at, what: f.name().into() });
                }
            }
            Container::Object(o) => {
                let e = self.object_or_err(o)?;
                if !e.noun.holds() {
                    return Err(WorldError::InvalidArgument(format!("{} is not a container", e.name())));
                }
                self.require_here(agent, o)?;
                self.require_reachable(o)?;
            }
        }
        Ok(())
    }

    /// Checks every precondition of `action` for `agent` without building the
    /// successor state.
    pub fn check(&self, agent: Agent, action: &Action) -> Result<(), WorldError> {
        let me = self.agent(agent);
        match *action {
            // Moving to the current fixture is a legal no-op that still costs a step.
            Action::MoveTo(_) => {}
            Action::PickUp(o) => self.check_pick(agent, o)?,
            Action::PickUpFrom(o, f) => {
                if self.object_or_err(o)?.location != Location::OnTopOf(f) {
                    return Err(WorldError::ObjectNotPresent(o));
                }
                self.check_pick(agent, o)?;
            }
            Action::TakeFrom(o, c) => {
                if self.object_or_err(o)?.location != Location::Inside(c) {
                    return Err(WorldError::ObjectNotPresent(o));
                }
                self.check_pick(agent, o)?;
            }
            Action::PutInto(o, c) => {
                self.require_holding(agent, o)?;
                self.check_container_here(agent, c)?;
                if !self.is_container_open(c) {
                    return Err(WorldError::ContainerClosed(self.container_name(c)));
                }
                if matches!(c, Container::Object(_)) && self.objects[&o].noun.holds() {
                    return Err(WorldError::InvalidArgument("containers cannot be nested".into()));
                }
            }
            Action::PutOnto(o, f) => {
                self.require_holding(agent, o)?;
                if f.is_container() {
                    return Err(WorldError::InvalidArgument(format!("{f} is not a surface")));
                }
                if me.at != f {
                    return Err(WorldError::NotAtLocation { agent, at: me.at, what: f.name().into() });
                }
            }
            Action::GiveToHuman(o) => {
                if agent != Agent::Robot {
                    return Err(WorldError::InvalidArgument("only the robot hands objects over".into()));
                }
                self.require_holding(agent, o)?;
                if self.human.at != me.at {
                    return Err(WorldError::NotAtLocation { agent, at: me.at, what: "human".into() });
                }
                if self.human.holding.is_some() {
                    return Err(WorldError::HandsFull(Agent::Human));
                }
            }
            Action::Open(c) => {
                match c {
                    Container::Fixture(f) => {
                        if !f.openable() {
                            return Err(WorldError::NotOpenable(f.name().into()));
                        }
                        if me.at != f {
                            return Err(WorldError::NotAtLocation { agent, at: me.at, what: f.name().into() });
                        }
                    }
                    Container::Object(o) => {
                        let e = self.object_or_err(o)?;
                        if !e.noun.openable() {
                            return Err(WorldError::NotOpenable(e.name()));
                        }
                        self.require_here(agent, o)?;
                        self.require_reachable(o)?;
                    }
                }
                if self.is_container_open(c) {
                    return Err(WorldError::InvalidArgument(format!("{} is already open", self.container_name(c))));
                }
            }
        }
        Ok(())
    }

    /// Every syntactically well-typed action over this world's fixtures and
    /// objects, applicable or not, in canonical order.
    pub fn action_grammar(&self) -> Vec<Action> {
        let ids: Vec<ObjectId> = self.object_ids().collect();
        let containers: Vec<Container> = Fixture::ALL
            .into_iter()
            .map(Container::Fixture)
            .chain(ids.iter().map(|&o| Container::Object(o)))
            .collect();
        let mut out = Vec::new();
        out.extend(Fixture::ALL.into_iter().map(Action::MoveTo));
        out.extend(ids.iter().map(|&o| Action::PickUp(o)));
        for &o in &ids {
            out.extend(Fixture::ALL.into_iter().map(|f| Action::PickUpFrom(o, f)));
            out.extend(containers.iter().map(|&c| Action::PutInto(o, c)));
            out.extend(Fixture::ALL.into_iter().map(|f| Action::PutOnto(o, f)));
            out.extend(containers.iter().map(|&c| Action::TakeFrom(o, c)));
        }
        out.extend(ids.iter().map(|&o| Action::GiveToHuman(o)));
        out.extend(containers.iter().map(|&c| Action::Open(c)));
        out.sort();
        out
    }

    fn set_location(&mut self, id: ObjectId, loc: Location) {
        if let Some(o) = self.objects.get_mut(&id) {
            o.location = loc;
        }
    }

    /// Removes an object; anything inside it is re-homed to the fixture the
    /// container rested at.
    pub(crate) fn remove_object(&mut self, id: ObjectId) {
        let Some(removed) = self.objects.remove(&id) else { return };
        if let Location::HeldBy(a) = removed.location {
            self.agent_mut(a).holding = None;
        }
        let rehome = match removed.location {
            Location::OnTopOf(f) => Location::OnTopOf(f),
            Location::Inside(c) => Location::Inside(c),
            Location::HeldBy(a) => {
                let at = self.agent(a).at;
                if at.is_container() {
                    Location::Inside(Container::Fixture(at))
                } else {
                    Location::OnTopOf(at)
                }
            }
        };
        let inner: Vec<ObjectId> = self.contents(Container::Object(id)).map(|o| o.id).collect();
        for c in inner {
            self.set_location(c, rehome);
        }
    }

    /// A copy without the given objects; contents of removed containers
    /// stay where the container was.
    pub fn without_objects(&self, ids: &[ObjectId]) -> WorldState {
        let mut s = self.clone();
        for &id in ids {
            s.remove_object(id);
        }
        s
    }

    /// Moves an object straight into an agent's hand. Used to evaluate
    /// hand-over tasks without planning.
    pub(crate) fn force_hold(&mut self, agent: Agent, id: ObjectId) {
        if let Some(prev) = self.agent(agent).holding {
            let at = self.agent(agent).at;
            let loc = if at.is_container() { Location::Inside(Container::Fixture(at)) } else { Location::OnTopOf(at) };
            self.set_location(prev, loc);
        }
        for a in [Agent::Human, Agent::Robot] {
            if self.agent(a).holding == Some(id) {
                self.agent_mut(a).holding = None;
            }
        }
        self.set_location(id, Location::HeldBy(agent));
        self.agent_mut(agent).holding = Some(id);
    }
}

/// Applies an action for an agent, returning the successor state.
pub fn apply_action(state: &WorldState, agent: Agent, action: &Action) -> Result<WorldState, WorldError> {
    state.check(agent, action)?;
    let mut next = state.clone();
    match *action {
        Action::MoveTo(f) => next.agent_mut(agent).at = f,
        Action::PickUp(o) | Action::PickUpFrom(o, _) | Action::TakeFrom(o, _) => {
            next.set_location(o, Location::HeldBy(agent));
            next.agent_mut(agent).holding = Some(o);
        }
        Action::PutInto(o, c) => {
            next.set_location(o, Location::Inside(c));
            next.agent_mut(agent).holding = None;
        }
        Action::PutOnto(o, f) => {
            next.set_location(o, Location::OnTopOf(f));
            next.agent_mut(agent).holding = None;
        }
        Action::GiveToHuman(o) => {
            next.set_location(o, Location::HeldBy(Agent::Human));
            next.robot.holding = None;
            next.human.holding = Some(o);
        }
        Action::Open(Container::Fixture(f)) => next.fixture_open[f.index()] = true,
        Action::Open(Container::Object(o)) => {
            if let Some(e) = next.objects.get_mut(&o) {
                e.attributes.open = Some(true);
            }
        }
    }
    Ok(next)
}

/// All actions `agent` can take in `state`, in canonical order (variant, then
/// arguments ascending).
pub fn applicable_actions(state: &WorldState, agent: Agent) -> Vec<Action> {
    let me = state.agent(agent);
    let here: Vec<&ObjectEntity> = state.objects().filter(|o| state.fixture_of(o.id) == Some(me.at)).collect();
    let mut candidates: Vec<Action> = Fixture::ALL.into_iter().map(Action::MoveTo).collect();
    candidates.push(Action::Open(Container::Fixture(me.at)));
    for o in &here {
        candidates.push(Action::PickUp(o.id));
        match o.location {
            Location::OnTopOf(f) => candidates.push(Action::PickUpFrom(o.id, f)),
            Location::Inside(c) => candidates.push(Action::TakeFrom(o.id, c)),
            Location::HeldBy(_) => {}
        }
        if o.noun.openable() {
            candidates.push(Action::Open(Container::Object(o.id)));
        }
    }
    if let Some(h) = me.holding {
        candidates.push(Action::PutInto(h, Container::Fixture(me.at)));
        candidates.push(Action::PutOnto(h, me.at));
        candidates.push(Action::GiveToHuman(h));
        for o in &here {
            if o.noun.holds() {
                candidates.push(Action::PutInto(h, Container::Object(o.id)));
            }
        }
    }
    candidates.retain(|a| state.check(agent, a).is_ok());
    candidates.sort();
    candidates.dedup();
    candidates
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(id: u32, noun: &str, instance: u32, location: Location) -> ObjectEntity {
        let noun = Noun::named(noun);
        let attributes = Attributes { open: noun.openable().then_some(false), ..Default::default() };
        ObjectEntity { id: ObjectId(id), noun, instance, attributes, location }
    }

    fn cabinet_world() -> WorldState {
        WorldState::new(
            [
                obj(0, "document", 0, Location::Inside(Container::Fixture(Fixture::Cabinet))),
                obj(1, "book", 0, Location::OnTopOf(Fixture::Sofa)),
            ],
            [Fixture::Cabinet],
            Fixture::Cabinet,
            Fixture::Floor,
        )
        .unwrap()
    }

    #[test]
    fn human_picks_up_document_at_open_cabinet() {
        let s = cabinet_world();
        let next = apply_action(&s, Agent::Human, &Action::PickUp(ObjectId(0))).unwrap();
        assert_eq!(next.human().holding, Some(ObjectId(0)));
        assert_eq!(next.object(ObjectId(0)).unwrap().location, Location::HeldBy(Agent::Human));
        assert_eq!(s.human().holding, None, "input state untouched");
    }

    #[test]
    fn open_refrigerator_flips_only_its_state() {
        let mut s = WorldState::empty();
        s.set_agent_at(Agent::Robot, Fixture::Refrigerator);
        let next = apply_action(&s, Agent::Robot, &Action::Open(Container::Fixture(Fixture::Refrigerator))).unwrap();
        assert!(next.fixture_open(Fixture::Refrigerator));
        let mut expected = s.clone();
        expected.set_fixture_open(Fixture::Refrigerator, true);
        assert_eq!(next, expected);
    }

    #[test]
    fn pick_with_full_hands_is_rejected() {
        let mut s = cabinet_world();
        s = apply_action(&s, Agent::Robot, &Action::MoveTo(Fixture::Sofa)).unwrap();
        s = apply_action(&s, Agent::Robot, &Action::PickUp(ObjectId(1))).unwrap();
        s = apply_action(&s, Agent::Robot, &Action::PutOnto(ObjectId(1), Fixture::Sofa)).unwrap();
        let s2 = apply_action(&s, Agent::Robot, &Action::PickUp(ObjectId(1))).unwrap();
        let mut extra = s2.clone();
        extra.insert_object(obj(2, "book", 1, Location::OnTopOf(Fixture::Sofa)));
        assert_eq!(apply_action(&extra, Agent::Robot, &Action::PickUp(ObjectId(2))), Err(WorldError::HandsFull(Agent::Robot)));
    }

    #[test]
    fn closed_container_blocks_access() {
        let mut s = cabinet_world();
        s.set_fixture_open(Fixture::Cabinet, false);
        assert!(matches!(apply_action(&s, Agent::Human, &Action::PickUp(ObjectId(0))), Err(WorldError::ContainerClosed(_))));
        assert!(matches!(
            apply_action(&s, Agent::Human, &Action::Open(Container::Fixture(Fixture::Sofa))),
            Err(WorldError::NotOpenable(_))
        ));
        assert!(matches!(
            apply_action(&s, Agent::Human, &Action::PickUp(ObjectId(1))),
            Err(WorldError::NotAtLocation { .. })
        ));
        assert_eq!(
            apply_action(&s, Agent::Human, &Action::PutOnto(ObjectId(1), Fixture::Cabinet)),
            Err(WorldError::HandEmpty(Agent::Human))
        );
    }

    #[test]
    fn empty_room_offers_only_moves() {
        let s = WorldState::empty();
        let acts = applicable_actions(&s, Agent::Robot);
        assert_eq!(acts.len(), 16);
        assert!(acts.iter().all(|a| matches!(a, Action::MoveTo(_))));
    }

    #[test]
    fn pick_then_put_back_restores_state() {
        let mut s = cabinet_world();
        s.set_agent_at(Agent::Robot, Fixture::Sofa);
        let held = apply_action(&s, Agent::Robot, &Action::PickUp(ObjectId(1))).unwrap();
        let back = apply_action(&held, Agent::Robot, &Action::PutOnto(ObjectId(1), Fixture::Sofa)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn nested_containers_rejected() {
        let res = WorldState::new(
            [
                obj(0, "box", 0, Location::OnTopOf(Fixture::Sofa)),
                obj(1, "box", 1, Location::Inside(Container::Object(ObjectId(0)))),
            ],
            [],
            Fixture::Floor,
            Fixture::Floor,
        );
        assert_eq!(res, Err(StateError::BadLocation(ObjectId(1))));
    }

    #[test]
    fn give_requires_colocated_human() {
        let mut s = cabinet_world();
        s.set_agent_at(Agent::Robot, Fixture::Sofa);
        let s = apply_action(&s, Agent::Robot, &Action::PickUp(ObjectId(1))).unwrap();
        assert!(matches!(
            apply_action(&s, Agent::Robot, &Action::GiveToHuman(ObjectId(1))),
            Err(WorldError::NotAtLocation { .. })
        ));
        let s = apply_action(&s, Agent::Robot, &Action::MoveTo(Fixture::Cabinet)).unwrap();
        let s = apply_action(&s, Agent::Robot, &Action::GiveToHuman(ObjectId(1))).unwrap();
        assert_eq!(s.human().holding, Some(ObjectId(1)));
        assert_eq!(s.robot().holding, None);
        s.validate().unwrap();
    }
}
