//! Text rendering of world states, actions and trajectories in the
//! `[World Description]` house style.

use crate::vocab::Fixture;
use crate::world::{Action, Agent, Container, Location, ObjectEntity, ObjectId, WorldState};

/// Attribute words in their fixed display order followed by the object name,
/// e.g. `red large open dusty box 0`.
pub fn describe_object(o: &ObjectEntity) -> String {
    let a = &o.attributes;
    let mut words: Vec<&str> = Vec::new();
    if let Some(c) = a.color {
        words.push(c.name());
    }
    if let Some(s) = a.size {
        words.push(s.name());
    }
    match a.open {
        Some(true) => words.push("open"),
        Some(false) => words.push("closed"),
        None => {}
    }
    match a.toggled {
        Some(true) => words.push("toggled-on"),
        Some(false) => words.push("toggled-off"),
        None => {}
    }
    for (flag, word) in [(a.cooked, "cooked"), (a.frozen, "frozen"), (a.sliced, "sliced"), (a.dusty, "dusty"), (a.stained, "stained")] {
        if flag {
            words.push(word);
        }
    }
    let name = o.name();
    words.push(&name);
    words.join(" ")
}

fn article(word: &str) -> &'static str {
    match word.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

fn fixture_label(state: &WorldState, f: Fixture) -> String {
    if f.openable() {
        let open = if state.fixture_open(f) { "open" } else { "closed" };
        format!("{open} {f}")
    } else {
        f.name().to_string()
    }
}

fn listing(items: &[&ObjectEntity]) -> String {
    if items.is_empty() {
        " nothing".to_string()
    } else {
        items.iter().map(|o| format!("  {}", describe_object(o))).collect()
    }
}

fn nested_listing(state: &WorldState, holders: &[&ObjectEntity]) -> String {
    let mut out = String::new();
    for h in holders {
        let inner: Vec<&ObjectEntity> = state.contents(Container::Object(h.id)).collect();
        if !inner.is_empty() {
            out.push_str(&format!(" In {} you can see{}.", h.name(), listing(&inner)));
        }
    }
    out
}

fn holding_line(state: &WorldState, agent: Agent) -> String {
    let who = match agent {
        Agent::Human => "Human is",
        Agent::Robot => "You are",
    };
    match state.agent(agent).holding.and_then(|h| state.object(h)) {
        None => format!("{who} currently holding nothing."),
        Some(o) => format!("{who} currently holding {}.{}", describe_object(o), nested_listing(state, &[o])),
    }
}

/// Renders the whole room: fixture inventory, every fixture's contents with
/// nested containers, and both agents.
pub fn render_state(state: &WorldState) -> String {
    let mut out = String::from("Welcome to the world!\n\n");
    let fixtures: Vec<String> = Fixture::ALL
        .into_iter()
        .filter(|f| *f != Fixture::Floor)
        .map(|f| format!("{} {f}", article(f.name())))
        .collect();
    out.push_str(&format!("In the room there is the human {}.\n\n", fixtures.join(" ")));
    let r = state.robot().at;
    out.push_str(&format!("Now you are standing on the {r}. You are at the {r}.\n\n"));
    for f in Fixture::ALL {
        let direct: Vec<&ObjectEntity> = state
            .objects()
            .filter(|o| matches!(o.location, Location::OnTopOf(x) | Location::Inside(Container::Fixture(x)) if x == f))
            .collect();
        let prep = if f.is_container() { "In" } else { "On" };
        out.push_str(&format!(
            "You see {}. {prep} {f} you can see{}.{}\n\n",
            fixture_label(state, f),
            listing(&direct),
            nested_listing(state, &direct)
        ));
    }
    out.push_str(&format!("The human is at the {}. ", state.human().at));
    out.push_str(&holding_line(state, Agent::Human));
    out.push(' ');
    out.push_str(&holding_line(state, Agent::Robot));
    out.push('\n');
    out
}

fn name(state: &WorldState, id: ObjectId) -> String {
    state.object(id).map(|o| o.name()).unwrap_or_else(|| id.to_string())
}

/// An action in the answer-line format (`pick up document 2`).
pub fn action_text(state: &WorldState, action: &Action) -> String {
    match *action {
        Action::MoveTo(f) => format!("move to {f}"),
        Action::PickUp(o) => format!("pick up {}", name(state, o)),
        Action::PickUpFrom(o, f) => format!("pick up {} from {f}", name(state, o)),
        Action::PutInto(o, c) => format!("put {} into {}", name(state, o), state.container_name(c)),
        Action::PutOnto(o, f) => format!("put {} onto {f}", name(state, o)),
        Action::TakeFrom(o, c) => format!("take {} from {}", name(state, o), state.container_name(c)),
        Action::GiveToHuman(o) => format!("give {} to human", name(state, o)),
        Action::Open(c) => format!("open {}", state.container_name(c)),
    }
}

/// A human action in narrative form, rendered against the state it was
/// taken in.
pub fn human_action_text(state: &WorldState, action: &Action) -> String {
    let at = state.human().at;
    match *action {
        Action::MoveTo(f) => format!("Human moves to the {f}."),
        Action::PickUp(o) => format!("Human picks up the {} at the {at}.", name(state, o)),
        Action::PickUpFrom(o, f) => format!("Human picks up the {} from the {f}.", name(state, o)),
        Action::PutInto(o, c) => format!("Human puts the {} into the {}.", name(state, o), state.container_name(c)),
        Action::PutOnto(o, f) => format!("Human puts the {} onto the {f}.", name(state, o)),
        Action::TakeFrom(o, c) => format!("Human takes the {} from the {}.", name(state, o), state.container_name(c)),
        Action::GiveToHuman(o) => format!("Human receives the {}.", name(state, o)),
        Action::Open(Container::Fixture(f)) => format!("Human opens the {f}."),
        Action::Open(c) => format!("Human opens the {} at the {at}.", state.container_name(c)),
    }
}

/// The `[Human Trajectory]` block for a sequence of (state, action) pairs.
pub fn render_trajectory<'a>(steps: impl IntoIterator<Item = (&'a WorldState, &'a Action)>) -> String {
    let mut out = String::from("The human agent has taken a list of actions towards a goal, which includes:\n\n");
    for (s, a) in steps {
        out.push_str(&human_action_text(s, a));
        out.push_str("\n\n");
    }
    out.push_str("Human stops and says, ");
    out
}
