#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use hmt_core::vocab::Noun;
use hmt_core::world::Attributes;
use hmt_core::{apply_action, Action, Agent, Container, Fixture, Location, ObjectEntity, ObjectId, WorldState};
use rand::seq::SliceRandom;
use rand::Rng;

/// Full breadth-first search over every applicable action of `agent`,
/// returning the length of the shortest action sequence that reaches a
/// state accepted by `done`.
pub fn bfs_len(start: &WorldState, agent: Agent, max_depth: u32, done: impl Fn(&WorldState) -> bool) -> Option<u32> {
    bfs_len_within(start, agent, max_depth, &Fixture::ALL, done)
}

fn touches_only(a: &Action, fixtures: &[Fixture]) -> bool {
    let ok = |f: &Fixture| fixtures.contains(f);
    match a {
        Action::MoveTo(f) | Action::PutOnto(_, f) | Action::PickUpFrom(_, f) => ok(f),
        Action::PutInto(_, Container::Fixture(f)) | Action::TakeFrom(_, Container::Fixture(f)) | Action::Open(Container::Fixture(f)) => ok(f),
        _ => true,
    }
}

/// As [`bfs_len`], but only actions touching the given fixtures are tried.
/// In worlds whose objects and agents all sit on those fixtures the rest of
/// the room is empty and interchangeable, so optimal lengths are unchanged.
pub fn bfs_len_within(
    start: &WorldState,
    agent: Agent,
    max_depth: u32,
    fixtures: &[Fixture],
    done: impl Fn(&WorldState) -> bool,
) -> Option<u32> {
    if done(start) {
        return Some(0);
    }
    let mut seen: HashSet<WorldState> = HashSet::from([start.clone()]);
    let mut frontier = VecDeque::from([(start.clone(), 0u32)]);
    while let Some((s, d)) = frontier.pop_front() {
        if d >= max_depth {
            continue;
        }
        for a in s.action_grammar().into_iter().filter(|a| touches_only(a, fixtures)) {
            let Ok(next) = apply_action(&s, agent, &a) else { continue };
            if done(&next) {
                return Some(d + 1);
            }
            if seen.insert(next.clone()) {
                frontier.push_back((next, d + 1));
            }
        }
    }
    None
}

pub const SMALL_FIXTURES: [Fixture; 5] = [Fixture::Floor, Fixture::Sofa, Fixture::Table, Fixture::Cabinet, Fixture::Refrigerator];

fn place<R: Rng>(rng: &mut R) -> Location {
    let f = *SMALL_FIXTURES.choose(rng).unwrap();
    if f.is_container() {
        Location::Inside(Container::Fixture(f))
    } else {
        Location::OnTopOf(f)
    }
}

/// A world of at most four objects spread over five fixtures: documents,
/// boxes, a bucket and an apple, with random open states.
pub fn tiny_world<R: Rng>(rng: &mut R) -> WorldState {
    let mut objects: Vec<ObjectEntity> = Vec::new();
    let mut counts = std::collections::BTreeMap::<&str, u32>::new();
    let mut add = |objects: &mut Vec<ObjectEntity>, noun: &'static str, location: Location, rng: &mut R| {
        let n = Noun::named(noun);
        let instance = counts.entry(noun).or_insert(0);
        let attributes = Attributes { open: n.openable().then(|| rng.gen_bool(0.5)), ..Default::default() };
        objects.push(ObjectEntity { id: ObjectId(objects.len() as u32), noun: n, instance: *instance, attributes, location });
        *instance += 1;
    };
    let boxes = rng.gen_range(0..=2);
    for _ in 0..boxes {
        let l = place(rng);
        add(&mut objects, "box", l, rng);
    }
    if rng.gen_bool(0.3) {
        let l = place(rng);
        add(&mut objects, "bucket", l, rng);
    }
    let holders: Vec<ObjectId> = objects.iter().map(|o| o.id).collect();
    let docs = rng.gen_range(1..=(4 - objects.len()).min(3));
    for _ in 0..docs {
        let l = if !holders.is_empty() && rng.gen_bool(0.25) {
            Location::Inside(Container::Object(*holders.choose(rng).unwrap()))
        } else {
            place(rng)
        };
        add(&mut objects, "document", l, rng);
    }
    if objects.len() < 4 && rng.gen_bool(0.3) {
        let l = place(rng);
        add(&mut objects, "apple", l, rng);
    }
    let open: Vec<Fixture> = SMALL_FIXTURES.iter().copied().filter(|f| f.openable() && rng.gen_bool(0.5)).collect();
    let human_at = *SMALL_FIXTURES.choose(rng).unwrap();
    let mut s = WorldState::new(objects, open, human_at, Fixture::Floor).unwrap();
    // Sometimes start with something in hand.
    if rng.gen_bool(0.25) {
        let picks: Vec<Action> = hmt_core::applicable_actions(&s, Agent::Human).into_iter().filter(|a| matches!(a, Action::PickUp(_))).collect();
        if let Some(a) = picks.choose(rng) {
            s = apply_action(&s, Agent::Human, a).unwrap();
        }
    }
    s
}
