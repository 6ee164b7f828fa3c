//! Chat prompts for the four prompting rungs. Each rung extends the one
//! before it: `Pe` adds domain notes, the goal space and a worked example,
//! `Fiser` asks for the requested object before the actions, and `FiserPr`
//! asks for the human's goal first.

use std::fmt;
use std::str::FromStr;

use hmt_core::episode::Episode;
use hmt_core::goal::templates;
use hmt_core::human::{plan_human_trajectory, state_at, HumanModel, RationalityParams, Step};
use hmt_core::render::{render_state, render_trajectory};
use hmt_core::vocab::{catalog, Noun};
use hmt_core::world::{Attributes, ObjectEntity};
use hmt_core::{Container, Fixture, HumanGoal, Location, ObjectClass, ObjectId, Predicate, Quantifier, Target, Verb, WorldState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptRung {
    Vanilla,
    Pe,
    Fiser,
    FiserPr,
}

impl PromptRung {
    pub const ALL: [PromptRung; 4] = [PromptRung::Vanilla, PromptRung::Pe, PromptRung::Fiser, PromptRung::FiserPr];

    pub fn name(self) -> &'static str {
        match self {
            PromptRung::Vanilla => "vanilla",
            PromptRung::Pe => "pe",
            PromptRung::Fiser => "fiser",
            PromptRung::FiserPr => "fiser-pr",
        }
    }

    fn questions(self) -> &'static [&'static str] {
        match self {
            PromptRung::Vanilla | PromptRung::Pe => &[],
            PromptRung::Fiser => &[OBJECT_QUESTION, ACTION_QUESTION],
            PromptRung::FiserPr => &[GOAL_QUESTION, OBJECT_QUESTION, ACTION_QUESTION],
        }
    }
}

impl fmt::Display for PromptRung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PromptRung {
    type Err = String;
    fn from_str(s: &str) -> Result<PromptRung, String> {
        PromptRung::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| format!("unknown rung {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

pub const GOAL_QUESTION: &str = "What is human doing?";
pub const OBJECT_QUESTION: &str = "Which object do you think the human is asking for?";
pub const ACTION_QUESTION: &str = "What are your actions?";

const ACTION_TEMPLATES: [&str; 8] = [
    "move to XXX",
    "pick up XXX",
    "pick up XXX from XXX",
    "put XXX into XXX",
    "put XXX onto XXX",
    "take XXX from XXX",
    "give XXX to human",
    "open XXX",
];

const ANSWER_CONTRACT: &str = "The final part of your response must be the action sequence, starting with the string \
\"Actions:\" on its own line, followed by one action per line. Write only actions there: no numbering, no \
commentary.";

fn task_header(rung: PromptRung) -> String {
    let mut out = String::from(
        "You are a household robot helping a human. For each case you receive three blocks:\n\n\
         [World Description]:\n\n[Human Trajectory]:\n\n[Human Instruction]:\n\n",
    );
    out.push_str(&instructions(rung));
    out.push_str("\n\nAvailable actions, where XXX names a fixture or an object:\n\n");
    out.push_str(&ACTION_TEMPLATES.join("\n"));
    out.push_str(
        "\n\nAnswer layout (the open step is only needed for closed containers):\n\n\
         Actions:\nmove to XXX\nopen XXX\npick up XXX\nmove to human\ngive XXX to human",
    );
    out
}

/// The per-case instructions, repeated after the data block.
fn instructions(rung: PromptRung) -> String {
    let mut out = String::from(
        "Produce a sequence of actions that carries out the human's instruction in the described world. \
         Every object is named by its kind and a number, such as document 2.",
    );
    let qs = rung.questions();
    if !qs.is_empty() {
        out.push_str(" Name objects exactly, with kind and number.\n\nReason step by step, answering each question in turn:\n\n");
        for (i, q) in qs.iter().enumerate() {
            out.push_str(&format!("{}. {q}", i + 1));
            if *q == GOAL_QUESTION {
                out.push_str(" (Give the most likely goal id and name from the goal space if one is listed; otherwise describe it yourself.)");
            }
            out.push('\n');
        }
        out.push_str("\nAnswer every question even if you are unsure.");
    }
    out.push_str("\n\n");
    out.push_str(ANSWER_CONTRACT);
    out
}

fn domain_notes() -> String {
    let mut openable: Vec<&str> = catalog().nouns().filter(|n| n.openable()).map(Noun::name).collect();
    openable.extend(Fixture::ALL.into_iter().filter(|f| f.openable()).map(|f| f.name()));
    let opens: Vec<String> = openable.iter().map(|n| format!("open {n}")).collect();
    format!(
        "Note: a closed container must be opened before anything is taken out of it or put into it. \
         Openable things: {}. Open them with an action such as {}.",
        openable.join(", "),
        opens.join(", ")
    )
}

fn goal_space() -> String {
    let mut out = String::from("The human is pursuing one of the following goals.\n");
    for t in templates() {
        out.push_str(&format!("\nGoal {}: {}\nDescription: {}\n", t.id, t.name, t.description));
    }
    out
}

/// The data block for a stop state, trajectory and utterance.
pub fn data_block(initial: &WorldState, trajectory: &[Step], surface: &str) -> String {
    let now = state_at(initial, trajectory, trajectory.len());
    let steps = trajectory.iter().map(|s| (&s.state, &s.action));
    format!(
        "[World Description]:\n\n{}\n[Human Trajectory]:\n\n{}\n\n[Human Instruction]:\n\n'{surface}'",
        render_state(&now),
        render_trajectory(steps)
    )
}

/// The worked example's scene: the human has boxed document 0 and asks
/// for the dusty document on the sofa.
pub fn worked_example() -> (WorldState, Vec<Step>, &'static str) {
    let doc = Noun::named("document");
    let objects = vec![
        ObjectEntity {
            id: ObjectId(0),
            noun: doc,
            instance: 0,
            attributes: Attributes::default(),
            location: Location::Inside(Container::Fixture(Fixture::Cabinet)),
        },
        ObjectEntity {
            id: ObjectId(1),
            noun: doc,
            instance: 2,
            attributes: Attributes { dusty: true, ..Attributes::default() },
            location: Location::OnTopOf(Fixture::Sofa),
        },
        ObjectEntity {
            id: ObjectId(2),
            noun: Noun::named("box"),
            instance: 0,
            attributes: Attributes { open: Some(false), ..Attributes::default() },
            location: Location::OnTopOf(Fixture::Sofa),
        },
    ];
    let s0 = WorldState::new(objects, vec![], Fixture::Floor, Fixture::Floor).expect("example world is valid");
    let box_class = Target::Class(ObjectClass::Noun(Noun::named("box")));
    let p = Predicate::new(Quantifier::ForAll, ObjectClass::Noun(doc), Verb::Inside, Some(box_class)).expect("valid predicate");
    let goal = HumanGoal { template: 0, bindings: vec![doc], predicates: vec![p] };
    let greedy = RationalityParams { beta: f64::INFINITY, ..Default::default() };
    let steps = plan_human_trajectory(&mut HumanModel::new(), &s0, &goal, &greedy, &mut ChaCha8Rng::seed_from_u64(0))
        .expect("example goal is reachable");
    (s0, steps[..6].to_vec(), "Please give me the dusty one.")
}

pub const EXAMPLE_ACTIONS: &str = "Actions:\nmove to sofa\npick up document 2\nmove to human\ngive document 2 to human";

fn example_answer(rung: PromptRung) -> String {
    let goal = "The human took document 0 from the cabinet and put it into box 0, so they are most likely \
                packing documents away: Goal 0, boxing books up for storage.";
    let object = "Another document for the box is the likely request, and it has to be dusty. Document 2 on \
                  the sofa is the only dusty document, so the human wants document 2.";
    let actions = "Go to the sofa, pick up document 2 and hand it to the human.";
    let answers: Vec<&str> = match rung {
        PromptRung::Vanilla | PromptRung::Pe => vec![],
        PromptRung::Fiser => vec![object, actions],
        PromptRung::FiserPr => vec![goal, object, actions],
    };
    let mut out = String::new();
    if !answers.is_empty() {
        out.push_str("[Questions]:\n\n");
        for (i, (q, a)) in rung.questions().iter().zip(answers).enumerate() {
            out.push_str(&format!("{}. {q}\n\n{a}\n\n", i + 1));
        }
    }
    out.push_str(EXAMPLE_ACTIONS);
    out
}

const DIVIDER: &str = "==========";

/// System and user messages for one episode. Deterministic in
/// (episode, rung).
pub fn build_prompt(ep: &Episode, rung: PromptRung) -> Vec<Message> {
    let mut system = task_header(rung);
    if rung != PromptRung::Vanilla {
        let (s0, steps, said) = worked_example();
        system.push_str(&format!("\n\n{DIVIDER}\n\n{}\n\n{DIVIDER}\n\n{}", domain_notes(), goal_space()));
        system.push_str(&format!(
            "\n{DIVIDER}\n\nExample case:\n\n{}\n\nExample answer:\n\n{}",
            data_block(&s0, &steps, said),
            example_answer(rung)
        ));
    }
    let user = format!(
        "{DIVIDER} Now answer for the following case {DIVIDER}\n\n{}\n\n{}",
        data_block(&ep.initial, &ep.trajectory, &ep.utterance.surface),
        instructions(rung)
    );
    vec![Message { role: Role::System, content: system }, Message { role: Role::User, content: user }]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_utterance_is_in_the_grammar() {
        let (s0, steps, said) = worked_example();
        let f = hmt_core::parse(said).unwrap();
        let now = state_at(&s0, &steps, steps.len());
        assert_eq!(hmt_core::candidate_referents(&f, &now), vec![ObjectId(1)]);
    }

    #[test]
    fn rung_names_round_trip() {
        for r in PromptRung::ALL {
            assert_eq!(r.name().parse::<PromptRung>(), Ok(r));
        }
    }
}
