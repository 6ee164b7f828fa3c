//! Reading an action plan out of a free-text completion.

use hmt_core::{Action, Container, Fixture, ObjectId, WorldState};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("no \"Actions:\" block in the response")]
    NoActionsBlock,
    #[error("line {line}: cannot read {text:?} as an action")]
    UnparsableLine { line: usize, text: String },
}

const MARKER: &str = "actions:";

/// Parses the lines after the last `Actions:` marker against the action
/// grammar. Numbering, bullets, case, articles, attribute words before a
/// name and trailing punctuation are ignored. `move to human` becomes a
/// move to the human's fixture. Line numbers count from the start of the
/// completion.
pub fn parse_actions(completion: &str, state: &WorldState) -> Result<Vec<Action>, ParseError> {
    let lower = completion.to_lowercase();
    let at = lower.rfind(MARKER).ok_or(ParseError::NoActionsBlock)?;
    let first_line = completion[..at].matches('\n').count() + 1;
    let rest = &completion[at + MARKER.len()..];
    let mut plan = Vec::new();
    for (i, raw) in rest.lines().enumerate() {
        let text = clean(raw);
        if text.is_empty() {
            continue;
        }
        let line = first_line + i;
        let action = parse_line(&text, state).ok_or_else(|| ParseError::UnparsableLine { line, text: raw.trim().to_owned() })?;
        plan.push(action);
    }
    Ok(plan)
}

/// Lower-cases and strips markup, list numbering and trailing punctuation.
fn clean(raw: &str) -> String {
    let mut s = raw.trim().trim_matches(|c: char| matches!(c, '*' | '`' | '_' | '"' | '\'')).trim().to_lowercase();
    if let Some(r) = s.strip_prefix("step") {
        s = r.trim_start().to_owned();
    }
    let digits = s.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 && s[digits..].starts_with(['.', ')', ':']) {
        s = s[digits + 1..].to_owned();
    }
    let s = s.trim_start_matches(['-', '*', '•', ' ']);
    s.trim_end_matches(['.', ',', ';', '!', ' ']).split_whitespace().collect::<Vec<_>>().join(" ")
}

fn parse_line(text: &str, state: &WorldState) -> Option<Action> {
    if let Some(x) = text.strip_prefix("move to ").or_else(|| text.strip_prefix("go to ")) {
        let x = strip_article(x);
        if x == "human" || x == "the human" {
            return Some(Action::MoveTo(state.human().at));
        }
        return Fixture::from_name(x).map(Action::MoveTo);
    }
    if let Some(x) = text.strip_prefix("pick up ") {
        return match x.rsplit_once(" from ") {
            Some((o, f)) => Some(Action::PickUpFrom(object(o, state)?, Fixture::from_name(strip_article(f))?)),
            None => Some(Action::PickUp(object(x, state)?)),
        };
    }
    if let Some(x) = text.strip_prefix("put ") {
        if let Some((o, c)) = x.rsplit_once(" into ").or_else(|| x.rsplit_once(" in ")) {
            return Some(Action::PutInto(object(o, state)?, container(c, state)?));
        }
        let (o, f) = x.rsplit_once(" onto ").or_else(|| x.rsplit_once(" on top of ")).or_else(|| x.rsplit_once(" on "))?;
        return Some(Action::PutOnto(object(o, state)?, Fixture::from_name(strip_article(f))?));
    }
    if let Some(x) = text.strip_prefix("take ") {
        let (o, c) = x.rsplit_once(" from ")?;
        return Some(Action::TakeFrom(object(o, state)?, container(c, state)?));
    }
    if let Some(x) = text.strip_prefix("give ").or_else(|| text.strip_prefix("hand ")) {
        let o = x.strip_suffix(" to human").or_else(|| x.strip_suffix(" to the human"))?;
        return Some(Action::GiveToHuman(object(o, state)?));
    }
    if let Some(x) = text.strip_prefix("open ") {
        return Some(Action::Open(container(x, state)?));
    }
    None
}

fn strip_article(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix("the ").unwrap_or(s)
}

/// Resolves `[attributes…] noun index` to an object in the state.
fn object(s: &str, state: &WorldState) -> Option<ObjectId> {
    let words: Vec<&str> = s.split_whitespace().collect();
    let (&idx, head) = words.split_last()?;
    let idx: u32 = idx.parse().ok()?;
    let &noun = head.last()?;
    state.objects().find(|o| o.instance == idx && o.noun.name() == noun).map(|o| o.id)
}

fn container(s: &str, state: &WorldState) -> Option<Container> {
    let s = strip_article(s);
    match Fixture::from_name(s) {
        Some(f) => Some(Container::Fixture(f)),
        None => object(s, state).map(Container::Object),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompt::worked_example;
    use hmt_core::human::state_at;

    fn scene() -> WorldState {
        let (s0, steps, _) = worked_example();
        state_at(&s0, &steps, steps.len())
    }

    #[test]
    fn reasoning_before_the_marker_is_ignored() {
        let s = scene();
        let text = "I think the human wants a document.\nActions: none yet\n\nSo:\n**Actions:**\n1. Move to the sofa.\n2) pick up Document 2\n- move to human\ngive dusty document 2 to human";
        let plan = parse_actions(text, &s).unwrap();
        let doc2 = ObjectId(1);
        let human = s.human().at;
        assert_eq!(
            plan,
            vec![Action::MoveTo(Fixture::Sofa), Action::PickUp(doc2), Action::MoveTo(human), Action::GiveToHuman(doc2)]
        );
    }

    #[test]
    fn errors_name_the_offending_line() {
        let s = scene();
        assert_eq!(parse_actions("I would help.", &s), Err(ParseError::NoActionsBlock));
        let bad = parse_actions("Thinking.\nActions:\nmove to sofa\ndance with document 2\n", &s);
        assert_eq!(bad, Err(ParseError::UnparsableLine { line: 4, text: "dance with document 2".into() }));
        let missing = parse_actions("Actions:\npick up document 9", &s);
        assert!(matches!(missing, Err(ParseError::UnparsableLine { line: 2, .. })));
    }

    #[test]
    fn containers_resolve_to_fixtures_or_objects() {
        let s = scene();
        let plan = parse_actions("Actions:\nopen cabinet\ntake document 0 from box 0\nput document 0 into the cabinet\nput document 0 onto table", &s).unwrap();
        assert_eq!(
            plan,
            vec![
                Action::Open(Container::Fixture(Fixture::Cabinet)),
                Action::TakeFrom(ObjectId(0), Container::Object(ObjectId(2))),
                Action::PutInto(ObjectId(0), Container::Fixture(Fixture::Cabinet)),
                Action::PutOnto(ObjectId(0), Fixture::Table),
            ]
        );
    }
}
