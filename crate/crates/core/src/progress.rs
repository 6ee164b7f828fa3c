//! Distance-to-satisfaction of a predicate for one agent, and the
//! progress signal the Boltzmann-rational human maximises.
//!
//! Distances are exact shortest-plan lengths, computed on a reduced model
//! that keeps only the objects a predicate can involve: its subject
//! members, the containers it targets, portable containers currently
//! holding a member, and whatever unrelated object the agent happens to
//! hold. Each solve explores the reduced model's whole reachable space
//! once and labels every node, so later queries along a trajectory are
//! table lookups.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::goal::{HumanGoal, Predicate, StateAttr, Target, Verb};
use crate::vocab::Fixture;
use crate::world::{apply_action, applicable_actions, Action, Agent, Container, Location, ObjectId, WorldState};

/// Distances at or beyond this value mean "cannot be satisfied".
pub const HORIZON: u32 = 64;

const MAX_ENTITIES: usize = 16;
const MAX_NODES: usize = 250_000;

const ELSEWHERE_OPEN: u8 = 16;
const ELSEWHERE_CLOSED: u8 = 17;
const IN_ENTITY: u8 = 16;
const HELD: u8 = 40;
const DONE: u8 = 41;
const UNAVAILABLE: u8 = 42;

/// Inverse temperature of the Boltzmann policy; `f64::INFINITY` is greedy
/// with ties broken by canonical action order.
pub type Beta = f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Role {
    Item,
    Target,
    Holder,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ProblemKey {
    predicate: Predicate,
    agent: Agent,
    entities: Vec<(ObjectId, Role)>,
    relevant: u16,
    /// Whether holders and targets may be carried around.
    carry: bool,
}

#[derive(Debug, Clone)]
struct Problem {
    key: ProblemKey,
    openable: Vec<bool>,
    holds: Vec<bool>,
    /// Classes of interchangeable items: same flags and holding nothing.
    /// Nodes store their locations sorted, so permuted states coincide.
    symmetric: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    loc: [u8; MAX_ENTITIES],
    ent_open: u16,
    fix_open: u16,
    pos: u8,
    junk: bool,
}

fn fixture_at(i: u8) -> Fixture {
    Fixture::ALL[i as usize]
}

fn fixture_is_open(node: &Node, f: u8) -> bool {
    node.fix_open & (1 << f) != 0
}

impl Problem {
    fn len(&self) -> usize {
        self.key.entities.len()
    }

    fn role(&self, e: usize) -> Role {
        self.key.entities[e].1
    }

    fn relevant(&self, f: u8) -> bool {
        self.key.relevant & (1 << f) != 0
    }

    fn build(state: &WorldState, agent: Agent, p: &Predicate, carry: bool) -> Option<(Problem, Node)> {
        let mut entities: Vec<(ObjectId, Role)> = Vec::new();
        let class_target = match p.object {
            Some(Target::Class(c)) => Some(c),
            _ => None,
        };
        for o in state.objects() {
            if p.is_member(o) {
                entities.push((o.id, Role::Item));
            } else if class_target.is_some_and(|c| c.contains(o.noun)) && o.noun.holds() {
                entities.push((o.id, Role::Target));
            }
        }
        let mut holders: Vec<ObjectId> = Vec::new();
        for &(id, role) in &entities {
            if role == Role::Item {
                if let Some(Location::Inside(Container::Object(c))) = state.object(id).map(|o| o.location) {
                    if !entities.iter().any(|&(e, _)| e == c) && !holders.contains(&c) {
                        holders.push(c);
                    }
                }
            }
        }
        entities.extend(holders.into_iter().map(|h| (h, Role::Holder)));
        entities.sort();
        if entities.len() > MAX_ENTITIES {
            return None;
        }
        let index = |id: ObjectId| entities.iter().position(|&(e, _)| e == id);

        let mut relevant: u16 = 0;
        if let Some(Target::Fixture(f)) = p.object {
            relevant |= 1 << f.index();
        }
        for &(id, _) in &entities {
            if let Some(f) = state.fixture_of(id) {
                relevant |= 1 << f.index();
            }
        }

        let mut node = Node { loc: [0; MAX_ENTITIES], ent_open: 0, fix_open: 0, pos: 0, junk: false };
        for f in Fixture::ALL {
            if !f.openable() || state.fixture_open(f) {
                node.fix_open |= 1 << f.index();
            }
        }
        let mut openable = Vec::with_capacity(entities.len());
        let mut holds = Vec::with_capacity(entities.len());
        for (i, &(id, role)) in entities.iter().enumerate() {
            let o = state.object(id).expect("entity exists");
            openable.push(o.noun.openable());
            holds.push(o.noun.holds());
            if o.attributes.open != Some(false) {
                node.ent_open |= 1 << i;
            }
            let done = role == Role::Item && p.holds_for(state, o);
            node.loc[i] = if done {
                DONE
            } else {
                match o.location {
                    Location::OnTopOf(f) | Location::Inside(Container::Fixture(f)) => f.index() as u8,
                    Location::Inside(Container::Object(c)) => IN_ENTITY + index(c).expect("holder is an entity") as u8,
                    Location::HeldBy(a) if a == agent => HELD,
                    Location::HeldBy(_) => UNAVAILABLE,
                }
            };
        }
        let me = state.agent(agent);
        let at = me.at.index() as u8;
        node.pos = if relevant & (1 << at) != 0 {
            at
        } else if !me.at.is_container() || fixture_is_open(&node, at) {
            ELSEWHERE_OPEN
        } else {
            ELSEWHERE_CLOSED
        };
        node.junk = me.holding.is_some_and(|h| index(h).is_none());
        let mut symmetric: Vec<Vec<usize>> = Vec::new();
        for e in 0..entities.len() {
            let contains = (0..entities.len()).any(|x| node.loc[x] == IN_ENTITY + e as u8);
            if entities[e].1 != Role::Item || contains {
                continue;
            }
            match symmetric.iter_mut().find(|g| openable[g[0]] == openable[e] && holds[g[0]] == holds[e]) {
                Some(g) => g.push(e),
                None => symmetric.push(vec![e]),
            }
        }
        symmetric.retain(|g| g.len() > 1);
        let key = ProblemKey { predicate: *p, agent, entities, relevant, carry };
        let problem = Problem { key, openable, holds, symmetric };
        problem.canonical(&mut node);
        Some((problem, node))
    }

    /// Sorts each symmetric class by (location, open) so that states
    /// differing only by a permutation of interchangeable items share a node.
    fn canonical(&self, node: &mut Node) {
        for g in &self.symmetric {
            let mut vals: Vec<(u8, bool)> = g.iter().map(|&e| (node.loc[e], node.ent_open & (1 << e) != 0)).collect();
            vals.sort_unstable();
            for (&e, (l, open)) in g.iter().zip(vals) {
                node.loc[e] = l;
                node.ent_open = (node.ent_open & !(1 << e)) | (u16::from(open) << e);
            }
        }
    }

    fn goal(&self, node: &Node) -> bool {
        let items = (0..self.len()).filter(|&e| self.role(e) == Role::Item);
        match self.key.predicate.quantifier {
            crate::goal::Quantifier::ForAll => items.into_iter().all(|e| node.loc[e] == DONE),
            crate::goal::Quantifier::Exists => items.into_iter().any(|e| node.loc[e] == DONE),
        }
    }

    /// Fixture an entity rests at, if it is resting somewhere.
    fn fixture_of(&self, node: &Node, e: usize) -> Option<u8> {
        match node.loc[e] {
            l if l < 16 => Some(l),
            l if (IN_ENTITY..IN_ENTITY + MAX_ENTITIES as u8).contains(&l) => self.fixture_of(node, (l - IN_ENTITY) as usize),
            _ => None,
        }
    }

    fn reachable(&self, node: &Node, e: usize) -> bool {
        match node.loc[e] {
            l if l < 16 => !fixture_at(l).is_container() || fixture_is_open(node, l),
            l if (IN_ENTITY..IN_ENTITY + MAX_ENTITIES as u8).contains(&l) => {
                let j = (l - IN_ENTITY) as usize;
                node.ent_open & (1 << j) != 0 && self.reachable(node, j)
            }
            _ => false,
        }
    }

    fn held(&self, node: &Node) -> Option<usize> {
        (0..self.len()).find(|&e| node.loc[e] == HELD)
    }

    fn place_container(node: &mut Node, e: usize) -> bool {
        let pos = node.pos;
        if pos >= 16 {
            return false;
        }
        let f = fixture_at(pos);
        if f.is_container() && !fixture_is_open(node, pos) {
            return false;
        }
        node.loc[e] = pos;
        true
    }

    fn item_delivered(&self, node: &Node) -> bool {
        let pos = node.pos;
        if pos >= 16 {
            return false;
        }
        let p = &self.key.predicate;
        match (p.verb, p.object) {
            (Verb::OnTopOf, Some(Target::Fixture(f))) => f.index() as u8 == pos,
            (Verb::Inside, Some(Target::Fixture(f))) => f.index() as u8 == pos && fixture_is_open(node, pos),
            (Verb::Inside, Some(Target::Class(_))) => (0..self.len()).any(|c| {
                self.role(c) == Role::Target
                    && self.fixture_of(node, c) == Some(pos)
                    && node.ent_open & (1 << c) != 0
                    && self.reachable(node, c)
            }),
            _ => false,
        }
    }

    fn successors(&self, node: &Node, out: &mut Vec<Node>) {
        out.clear();
        let pred = &self.key.predicate;
        let held = self.held(node);
        for f in 0..16u8 {
            if self.relevant(f) && f != node.pos {
                out.push(Node { pos: f, ..*node });
            }
        }
        if node.junk && node.pos != ELSEWHERE_OPEN {
            out.push(Node { pos: ELSEWHERE_OPEN, ..*node });
        }
        if node.pos < 16 && !fixture_is_open(node, node.pos) {
            out.push(Node { fix_open: node.fix_open | (1 << node.pos), ..*node });
        }
        for e in 0..self.len() {
            if self.openable[e]
                && node.ent_open & (1 << e) == 0
                && self.fixture_of(node, e) == Some(node.pos)
                && self.reachable(node, e)
            {
                let mut n = *node;
                n.ent_open |= 1 << e;
                if self.role(e) == Role::Item && pred.verb == Verb::StateEquals(StateAttr::Open, true) {
                    n.loc[e] = DONE;
                }
                out.push(n);
            }
        }
        if held.is_none() && !node.junk {
            for e in 0..self.len() {
                let l = node.loc[e];
                if l == DONE || l == HELD || l == UNAVAILABLE {
                    continue;
                }
                // Carrying an empty holder around never shortens a plan.
                let empty_holder =
                    self.role(e) == Role::Holder && !(0..self.len()).any(|x| node.loc[x] == IN_ENTITY + e as u8);
                let carried = self.role(e) != Role::Item;
                if !empty_holder && (self.key.carry || !carried) && self.fixture_of(node, e) == Some(node.pos) && self.reachable(node, e) {
                    let mut n = *node;
                    let human_wants_it = pred.verb == Verb::HeldByHuman && self.key.agent == Agent::Human;
                    n.loc[e] = if self.role(e) == Role::Item && human_wants_it { DONE } else { HELD };
                    out.push(n);
                }
            }
        }
        if let Some(h) = held {
            if self.role(h) == Role::Item {
                if self.item_delivered(node) {
                    let mut n = *node;
                    n.loc[h] = DONE;
                    out.push(n);
                }
            } else if self.holds[h] {
                let mut n = *node;
                if Self::place_container(&mut n, h) {
                    out.push(n);
                }
            }
        }
        if node.junk {
            let droppable = node.pos == ELSEWHERE_OPEN
                || (node.pos < 16 && (!fixture_at(node.pos).is_container() || fixture_is_open(node, node.pos)));
            if droppable {
                out.push(Node { junk: false, ..*node });
            }
        }
    }
}

#[derive(Default)]
struct Table {
    dist: HashMap<Node, u16>,
}

/// Memoised distance oracle. One instance per worker; not shared.
#[derive(Default)]
pub struct Progress {
    tables: HashMap<ProblemKey, Table>,
    /// Problems whose full model exceeds [`MAX_NODES`].
    oversize: HashSet<ProblemKey>,
}

impl Progress {
    pub fn new() -> Progress {
        Progress::default()
    }

    /// Length of the shortest plan by which `agent` alone makes `p` hold,
    /// capped at [`HORIZON`].
    pub fn distance(&mut self, state: &WorldState, agent: Agent, p: &Predicate) -> u32 {
        if crate::goal::satisfied(p, state) {
            return 0;
        }
        let Some((mut problem, mut start)) = Problem::build(state, agent, p, true) else {
            return HORIZON;
        };
        if self.oversize.contains(&problem.key) {
            (problem, start) = Problem::build(state, agent, p, false).expect("built once");
        }
        if let Some(d) = self.tables.get(&problem.key).and_then(|t| t.dist.get(&start)) {
            return u32::from(*d);
        }
        if let Some(d) = self.solve(&problem, start) {
            return d;
        }
        if problem.key.carry {
            self.oversize.insert(problem.key);
            return self.distance(state, agent, p);
        }
        self.solve_bounded(&problem, start)
    }

    /// Tabulates every node reachable from `start`; `None` if there are
    /// more than [`MAX_NODES`].
    fn solve(&mut self, problem: &Problem, start: Node) -> Option<u32> {
        let mut index: HashMap<Node, u32> = HashMap::default();
        let mut nodes: Vec<Node> = vec![start];
        let mut edges: Vec<(u32, u32)> = Vec::new();
        index.insert(start, 0);
        let mut buf = Vec::new();
        let mut i = 0;
        while i < nodes.len() {
            if nodes.len() > MAX_NODES {
                return None;
            }
            let n = nodes[i];
            if !problem.goal(&n) {
                problem.successors(&n, &mut buf);
                for mut s in buf.drain(..) {
                    problem.canonical(&mut s);
                    let j = *index.entry(s).or_insert_with(|| {
                        nodes.push(s);
                        (nodes.len() - 1) as u32
                    });
                    edges.push((i as u32, j));
                }
            }
            i += 1;
        }
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); nodes.len()];
        for &(a, b) in &edges {
            rev[b as usize].push(a);
        }
        let mut dist = vec![u32::MAX; nodes.len()];
        let mut queue = VecDeque::new();
        for (k, n) in nodes.iter().enumerate() {
            if problem.goal(n) {
                dist[k] = 0;
                queue.push_back(k);
            }
        }
        while let Some(k) = queue.pop_front() {
            for &a in &rev[k] {
                if dist[a as usize] == u32::MAX {
                    dist[a as usize] = dist[k] + 1;
                    queue.push_back(a as usize);
                }
            }
        }
        let table = self.tables.entry(problem.key.clone()).or_default();
        for (k, n) in nodes.iter().enumerate() {
            table.dist.insert(*n, dist[k].min(HORIZON) as u16);
        }
        Some(dist[0].min(HORIZON))
    }

    /// Plain forward search used when the reachable space is too large to
    /// tabulate.
    fn solve_bounded(&mut self, problem: &Problem, start: Node) -> u32 {
        let mut seen: HashMap<Node, u32> = HashMap::default();
        let mut queue = VecDeque::from([start]);
        seen.insert(start, 0);
        let mut buf = Vec::new();
        while let Some(n) = queue.pop_front() {
            let d = seen[&n];
            if problem.goal(&n) {
                self.tables.entry(problem.key.clone()).or_default().dist.insert(start, d as u16);
                return d;
            }
            if d + 1 >= HORIZON {
                continue;
            }
            problem.successors(&n, &mut buf);
            for mut s in buf.drain(..) {
                problem.canonical(&mut s);
                seen.entry(s).or_insert_with(|| {
                    queue.push_back(s);
                    d + 1
                });
            }
        }
        self.tables.entry(problem.key.clone()).or_default().dist.insert(start, HORIZON as u16);
        HORIZON
    }

    /// The predicate a goal-directed agent is working on: the first one
    /// not yet satisfied.
    pub fn current<'g>(&self, state: &WorldState, goal: &'g HumanGoal) -> Option<&'g Predicate> {
        goal.current(state).map(|k| &goal.predicates[k])
    }

    /// Decrease in distance to `p` caused by `action`.
    pub fn delta(&mut self, state: &WorldState, agent: Agent, action: &Action, p: &Predicate) -> i64 {
        let Ok(next) = apply_action(state, agent, action) else {
            return 0;
        };
        i64::from(self.distance(state, agent, p)) - i64::from(self.distance(&next, agent, p))
    }

    /// The Boltzmann policy over `agent`'s applicable actions for
    /// predicate `p`: P(a) ∝ exp(β·Δ(a)). At β = ∞ all mass goes to the
    /// first action (canonical order) with maximal Δ.
    pub fn policy(&mut self, state: &WorldState, agent: Agent, p: &Predicate, beta: Beta) -> Vec<(Action, f64)> {
        let acts = applicable_actions(state, agent);
        let base = i64::from(self.distance(state, agent, p));
        let deltas: Vec<i64> = acts
            .iter()
            .map(|a| {
                let next = apply_action(state, agent, a).expect("applicable");
                base - i64::from(self.distance(&next, agent, p))
            })
            .collect();
        boltzmann(acts, &deltas, beta)
    }
}

/// Normalised Boltzmann weights over integer progress values.
pub fn boltzmann(acts: Vec<Action>, deltas: &[i64], beta: Beta) -> Vec<(Action, f64)> {
    let Some(&best) = deltas.iter().max() else {
        return Vec::new();
    };
    if beta.is_infinite() {
        let first = deltas.iter().position(|&d| d == best).expect("non-empty");
        return acts.into_iter().enumerate().map(|(i, a)| (a, if i == first { 1.0 } else { 0.0 })).collect();
    }
    let weights: Vec<f64> = deltas.iter().map(|&d| (beta * (d - best) as f64).exp()).collect();
    let z: f64 = weights.iter().sum();
    acts.into_iter().zip(weights).map(|(a, w)| (a, w / z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Noun;
    use crate::world::{Attributes, ObjectEntity};

    fn obj(id: u32, noun: &str, instance: u32, location: Location, open: Option<bool>) -> ObjectEntity {
        let noun = Noun::named(noun);
        ObjectEntity { id: ObjectId(id), noun, instance, attributes: Attributes { open, ..Default::default() }, location }
    }

    #[test]
    fn document_in_closed_cabinet_to_closed_box() {
        let s = WorldState::new(
            [
                obj(0, "box", 0, Location::OnTopOf(Fixture::Sofa), Some(false)),
                obj(1, "document", 0, Location::Inside(Container::Fixture(Fixture::Cabinet)), None),
            ],
            [],
            Fixture::Floor,
            Fixture::Floor,
        )
        .unwrap();
        let p: Predicate = "<for-all, document, inside, box>".parse().unwrap();
        let mut prog = Progress::new();
        assert_eq!(prog.distance(&s, Agent::Human, &p), 6);
        assert_eq!(prog.delta(&s, Agent::Human, &Action::MoveTo(Fixture::Cabinet), &p), 1);
        assert_eq!(prog.delta(&s, Agent::Human, &Action::MoveTo(Fixture::Sofa), &p), 0);
    }

    #[test]
    fn relocating_the_box_is_found() {
        // Agent next to the only box, two documents elsewhere: carrying the
        // box over (pick, move, put, then 2 × pick+put) beats 2 round trips.
        let s = WorldState::new(
            [
                obj(0, "box", 0, Location::OnTopOf(Fixture::Sofa), Some(true)),
                obj(1, "document", 0, Location::OnTopOf(Fixture::Table), None),
                obj(2, "document", 1, Location::OnTopOf(Fixture::Table), None),
            ],
            [],
            Fixture::Sofa,
            Fixture::Floor,
        )
        .unwrap();
        let p: Predicate = "<for-all, document, inside, box>".parse().unwrap();
        assert_eq!(Progress::new().distance(&s, Agent::Human, &p), 7);
    }

    #[test]
    fn unavailable_member_caps_distance() {
        let mut s = WorldState::new(
            [obj(1, "document", 0, Location::OnTopOf(Fixture::Table), None)],
            [],
            Fixture::Sofa,
            Fixture::Table,
        )
        .unwrap();
        s = apply_action(&s, Agent::Robot, &Action::PickUp(ObjectId(1))).unwrap();
        let p: Predicate = "<for-all, document, on-top-of, shelf>".parse().unwrap();
        assert_eq!(Progress::new().distance(&s, Agent::Human, &p), HORIZON);
    }

    #[test]
    fn greedy_policy_is_deterministic_and_normalised() {
        let s = WorldState::new(
            [obj(1, "document", 0, Location::OnTopOf(Fixture::Table), None)],
            [],
            Fixture::Sofa,
            Fixture::Floor,
        )
        .unwrap();
        let p: Predicate = "<for-all, document, on-top-of, shelf>".parse().unwrap();
        let mut prog = Progress::new();
        let greedy = prog.policy(&s, Agent::Human, &p, f64::INFINITY);
        let chosen: Vec<_> = greedy.iter().filter(|(_, w)| *w == 1.0).collect();
        assert_eq!(chosen.len(), 1);
        assert_eq!(chosen[0].0, Action::MoveTo(Fixture::Table));
        let soft = prog.policy(&s, Agent::Human, &p, 5.0);
        let z: f64 = soft.iter().map(|(_, w)| w).sum();
        assert!((z - 1.0).abs() < 1e-12);
    }
}
