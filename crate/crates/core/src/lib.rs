//! Household instruction-following simulator with a symbolic social and
//! embodied reasoning pipeline.

pub mod baselines;
pub mod episode;
pub mod fiser;
pub mod goal;
pub mod human;
pub mod language;
pub mod planner;
pub mod pragmatics;
pub mod progress;
pub mod render;
pub mod schema;
pub mod vocab;
pub mod world;
pub mod worldgen;

pub use vocab::{Color, Fixture, Genre, Noun, ObjectClass, Size};
pub use world::{apply_action, applicable_actions, Action, Agent, Container, Location, ObjectEntity, ObjectId, WorldError, WorldState};
pub use goal::{reward, satisfied, GoalError, HumanGoal, Predicate, Quantifier, RobotTask, Target, Verb};
pub use language::{candidate_referents, parse, realize, ConstraintFormula, Determiner, LanguageError, RequestVerb, Utterance};
