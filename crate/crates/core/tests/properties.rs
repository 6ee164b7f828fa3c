//! Invariants of the world model, goals and generated episodes, checked
//! on random worlds and random seeds.

use hmt_core::episode::{generate_episode, GenerationConfig};
use hmt_core::goal::{enumerate_goal_space, reward, satisfied};
use hmt_core::human::{HumanModel, Level};
use hmt_core::language::{candidate_referents, parse};
use hmt_core::planner::grounded_planning;
use hmt_core::pragmatics::{set_of, Game, Lexicon};
use hmt_core::worldgen::{generate_world, WorldConfig};
use hmt_core::{applicable_actions, apply_action, Action, Agent, Container, ObjectId, RobotTask, WorldState};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn world(seed: u64) -> WorldState {
    generate_world(&WorldConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed))
}

/// A random walk of both agents through applicable actions.
fn walk(seed: u64, len: usize) -> Vec<(WorldState, Agent, Action)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut s = world(seed);
    let mut out = Vec::new();
    for i in 0..len {
        let agent = if i % 2 == 0 { Agent::Human } else { Agent::Robot };
        let a = *applicable_actions(&s, agent).choose(&mut rng).unwrap();
        let next = apply_action(&s, agent, &a).unwrap();
        out.push((s, agent, a));
        s = next;
    }
    out
}

fn touched(a: &Action) -> (Option<ObjectId>, Option<ObjectId>) {
    let container = |c: &Container| match c {
        Container::Object(o) => Some(*o),
        Container::Fixture(_) => None,
    };
    match a {
        Action::Open(c) => (container(c), None),
        _ => (a.object(), None),
    }
}

fn other(agent: Agent) -> Agent {
    match agent {
        Agent::Human => Agent::Robot,
        Agent::Robot => Agent::Human,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn applicability_matches_trial_of_the_grammar(seed in 0u64..100_000) {
        for (s, agent, _) in walk(seed, 12) {
            let tried: Vec<Action> = s.action_grammar().into_iter().filter(|a| apply_action(&s, agent, a).is_ok()).collect();
            prop_assert_eq!(applicable_actions(&s, agent), tried);
        }
    }

    #[test]
    fn steps_are_deterministic_valid_and_local(seed in 0u64..100_000) {
        for (s, agent, a) in walk(seed, 12) {
            let next = apply_action(&s, agent, &a).unwrap();
            prop_assert_eq!(&apply_action(&s, agent, &a).unwrap(), &next);
            prop_assert!(next.validate().is_ok());
            prop_assert_eq!(next.agent(other(agent)), s.agent(other(agent)));
            let (moved, _) = touched(&a);
            for o in s.objects().filter(|o| Some(o.id) != moved) {
                prop_assert_eq!(next.object(o.id), Some(o));
            }
            if !matches!(a, Action::Open(Container::Fixture(_))) {
                prop_assert!(s.open_fixtures().eq(next.open_fixtures()));
            }
        }
    }

    #[test]
    fn picking_up_then_putting_back_restores_the_state(seed in 0u64..100_000) {
        for (s, agent, _) in walk(seed, 10) {
            for a in applicable_actions(&s, agent) {
                let back = match a {
                    Action::PickUpFrom(o, f) => Action::PutOnto(o, f),
                    Action::TakeFrom(o, c) => Action::PutInto(o, c),
                    _ => continue,
                };
                let held = apply_action(&s, agent, &a).unwrap();
                prop_assert_eq!(apply_action(&held, agent, &back).unwrap(), s.clone());
            }
        }
    }

    #[test]
    fn reward_is_the_satisfied_fraction(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let steps = walk(seed, 8);
        let space = enumerate_goal_space(&steps[0].0);
        prop_assume!(!space.is_empty());
        for (s, _, _) in &steps {
            let g = space.choose(&mut rng).unwrap();
            let r = reward(s, g);
            let frac = g.predicates.iter().filter(|p| satisfied(p, s)).count() as f64 / g.predicates.len() as f64;
            prop_assert!((0.0..=1.0).contains(&r));
            prop_assert!((r - frac).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_episodes_meet_their_level(seed in 0u64..1_000_000, level in 0usize..4) {
        let cfg = GenerationConfig::default();
        let level = Level::ALL[level];
        let ep = generate_episode(seed, seed, level, &cfg).unwrap();
        prop_assert_eq!(&generate_episode(seed, seed, level, &cfg).unwrap(), &ep);
        prop_assert!(enumerate_goal_space(&ep.initial).contains(&ep.goal));

        // Trajectory chains and reward never drops, rising at each completion.
        let mut s = ep.initial.clone();
        for step in &ep.trajectory {
            prop_assert_eq!(&step.state, &s);
            let next = apply_action(&s, Agent::Human, &step.action).unwrap();
            let done = |x: &WorldState| ep.goal.predicates.iter().filter(|p| satisfied(p, x)).count();
            prop_assert!(reward(&next, &ep.goal) >= reward(&s, &ep.goal));
            if done(&next) > done(&s) {
                prop_assert!(reward(&next, &ep.goal) > reward(&s, &ep.goal));
            }
            s = next;
        }
        prop_assert_eq!(&ep.current(), &s);
        prop_assert!(ep.goal.remaining(&s).any(|p| *p == ep.subgoal));

        // The task is a useful step towards the subgoal.
        let o = ep.task.object();
        let mut model = HumanModel::new();
        let plan = grounded_planning(&s, ep.task, cfg.budget).unwrap();
        let mut after = s.clone();
        for a in &plan {
            after = apply_action(&after, Agent::Robot, a).unwrap();
        }
        prop_assert!(model.distance(&after, &ep.subgoal) < model.distance(&s, &ep.subgoal));

        prop_assert_eq!(&parse(&ep.utterance.surface).unwrap(), &ep.utterance.formula);
        let literal = candidate_referents(&ep.utterance.formula, &s);
        prop_assert!(literal.contains(&o));
        match level {
            Level::L1 => prop_assert_eq!(literal, vec![o]),
            _ => prop_assert!(literal.len() >= 2),
        }
        if level == Level::L4 {
            let useful: Vec<ObjectId> = model
                .useful_objects(&s, &ep.subgoal)
                .into_iter()
                .filter(|&u| grounded_planning(&s, RobotTask::HeldByHuman(u), cfg.budget).is_ok())
                .collect();
            let lex = Lexicon::new(&s);
            let u = lex.index_of(&ep.utterance.formula).unwrap();
            let game = Game::new(&lex, set_of(useful), cfg.rationality.lambda, cfg.rationality.alpha);
            prop_assert!(game.pragmatic_set(u).count_ones() >= 2);
        }
    }
}
