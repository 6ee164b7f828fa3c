#![allow(dead_code)]

use hmt_bench::config::BenchmarkConfig;
use hmt_core::episode::Episode;
use hmt_core::human::{plan_human_trajectory, HumanModel, Level, RationalityParams};
use hmt_core::vocab::Noun;
use hmt_core::world::{Attributes, ObjectEntity};
use hmt_core::{
    parse, Container, Fixture, HumanGoal, Location, ObjectClass, ObjectId, Predicate, Quantifier, RobotTask, Target,
    Utterance, Verb, WorldState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn small_config(levels: &[Level], n: usize, seed: u64) -> BenchmarkConfig {
    BenchmarkConfig { episodes_per_level: n, seed, levels: levels.to_vec(), ..BenchmarkConfig::default() }
}

fn object(id: u32, noun: &str, instance: u32, attributes: Attributes, location: Location) -> ObjectEntity {
    ObjectEntity { id: ObjectId(id), noun: Noun::named(noun), instance, attributes, location }
}

/// Two documents and a closed box; a book on the table. The human, boxing
/// documents, has put document 0 away and now carries nothing.
pub fn boxing_episode() -> Episode {
    let objects = vec![
        object(0, "document", 0, Attributes::default(), Location::Inside(Container::Fixture(Fixture::Cabinet))),
        object(1, "document", 2, Attributes { dusty: true, ..Attributes::default() }, Location::OnTopOf(Fixture::Sofa)),
        object(2, "box", 0, Attributes { open: Some(false), ..Attributes::default() }, Location::OnTopOf(Fixture::Sofa)),
        object(3, "book", 0, Attributes::default(), Location::OnTopOf(Fixture::Table)),
    ];
    let initial = WorldState::new(objects, vec![], Fixture::Floor, Fixture::Floor).unwrap();
    let doc = ObjectClass::Noun(Noun::named("document"));
    let p = Predicate::new(Quantifier::ForAll, doc, Verb::Inside, Some(Target::Class(ObjectClass::Noun(Noun::named("box")))))
        .unwrap();
    let goal = HumanGoal { template: 0, bindings: vec![Noun::named("document")], predicates: vec![p] };
    let greedy = RationalityParams { beta: f64::INFINITY, ..Default::default() };
    let steps =
        plan_human_trajectory(&mut HumanModel::new(), &initial, &goal, &greedy, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let surface = "Please bring me the dusty document.".to_owned();
    let formula = parse(&surface).unwrap();
    Episode {
        id: 0,
        seed: 0,
        level: Level::L3,
        initial,
        goal,
        trajectory: steps[..6].to_vec(),
        subgoal: p,
        task: RobotTask::HeldByHuman(ObjectId(1)),
        utterance: Utterance { surface, formula },
        preference: None,
    }
}
