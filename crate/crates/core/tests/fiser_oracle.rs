use hmt_core::episode::{generate_episode, Episode, GenerationConfig};
use hmt_core::fiser::{action_scores, goal_posterior, plan_recognition, predicate_posterior, GoalPosterior};
use hmt_core::goal::{goal_prior, satisfied, HumanGoal};
use hmt_core::human::{HumanModel, Level, RationalityParams, Step};
use hmt_core::planner::grounded_planning;
use hmt_core::progress::Progress;
use hmt_core::{applicable_actions, apply_action, Agent, WorldState};

/// Bayes by direct enumeration: every goal's likelihood is the product of
/// softmax probabilities recomputed from raw distances, with no sharing
/// between goals.
fn brute_force_posterior(s0: &WorldState, steps: &[Step], beta: f64) -> Vec<(HumanGoal, f64)> {
    let mut prog = Progress::new();
    let mut joint = Vec::new();
    for (g, prior) in goal_prior(s0) {
        let mut like = prior;
        for step in steps {
            let s = &step.state;
            let Some(cur) = g.predicates.iter().find(|p| !satisfied(p, s)) else {
                like = 0.0;
                break;
            };
            let kept: Vec<_> = g.predicates.iter().filter(|p| satisfied(p, s)).collect();
            let d0 = prog.distance(s, Agent::Human, cur) as f64;
            let mut options = Vec::new();
            for a in applicable_actions(s, Agent::Human) {
                let next = apply_action(s, Agent::Human, &a).unwrap();
                if kept.iter().all(|p| satisfied(p, &next)) {
                    options.push((a, d0 - prog.distance(&next, Agent::Human, cur) as f64));
                }
            }
            let p = if beta.is_infinite() {
                let best = options.iter().map(|(_, d)| *d).fold(f64::NEG_INFINITY, f64::max);
                let first = options.iter().find(|(_, d)| *d == best).map(|(a, _)| *a);
                f64::from(u8::from(first == Some(step.action)))
            } else {
                let z: f64 = options.iter().map(|(_, d)| (beta * d).exp()).sum();
                options.iter().find(|(a, _)| *a == step.action).map_or(0.0, |(_, d)| (beta * d).exp() / z)
            };
            like *= p;
        }
        joint.push((g, like));
    }
    let z: f64 = joint.iter().map(|(_, w)| w).sum();
    joint.into_iter().map(|(g, w)| (g, w / z)).collect()
}

fn total_variation(a: &GoalPosterior, b: &[(HumanGoal, f64)]) -> f64 {
    assert_eq!(a.entries.len(), b.len());
    0.5 * a.entries.iter().zip(b).map(|((g, p), (h, q))| {
        assert_eq!(g, h);
        (p - q).abs()
    }).sum::<f64>()
}

fn episodes(levels: &[Level], seeds: std::ops::Range<u64>, cfg: &GenerationConfig) -> Vec<Episode> {
    let mut out = Vec::new();
    for &level in levels {
        for seed in seeds.clone() {
            out.push(generate_episode(seed, seed, level, cfg).unwrap());
        }
    }
    out
}

#[test]
fn posterior_matches_brute_force_bayes() {
    let cfg = GenerationConfig::default();
    for ep in episodes(&[Level::L1, Level::L3], 0..12, &cfg) {
        for beta in [1.0, 5.0] {
            let params = RationalityParams { beta, ..Default::default() };
            let post = goal_posterior(&mut HumanModel::new(), &ep.initial, &ep.trajectory, &params).unwrap();
            let oracle = brute_force_posterior(&ep.initial, &ep.trajectory, beta);
            let tv = total_variation(&post, &oracle);
            assert!(tv < 1e-9, "episode {} β={beta}: tv {tv}", ep.id);
            assert!(post.probability(&ep.goal) > 0.0);
        }
    }
}

#[test]
fn greedy_evidence_never_lowers_the_true_goal() {
    let params = RationalityParams { beta: f64::INFINITY, ..Default::default() };
    let cfg = GenerationConfig { rationality: params, ..Default::default() };
    for ep in episodes(&[Level::L2], 0..10, &cfg) {
        let mut model = HumanModel::new();
        let mut last = 0.0;
        for t in 0..=ep.trajectory.len() {
            let post = goal_posterior(&mut model, &ep.initial, &ep.trajectory[..t], &params).unwrap();
            let p = post.probability(&ep.goal);
            assert!(p >= last - 1e-12, "episode {} step {t}: {p} < {last}", ep.id);
            let oracle = brute_force_posterior(&ep.initial, &ep.trajectory[..t], f64::INFINITY);
            assert!(total_variation(&post, &oracle) < 1e-9);
            last = p;
        }
    }
}

#[test]
fn factored_tuples_agree_with_the_predicate_posterior() {
    let cfg = GenerationConfig::default();
    for ep in episodes(&Level::ALL, 0..8, &cfg) {
        let mut model = HumanModel::new();
        let (p, preds, tuples) =
            plan_recognition(&mut model, &ep.initial, &ep.trajectory, &ep.utterance.formula, &cfg.rationality).unwrap();
        assert!((tuples.total_mass() - 1.0).abs() < 1e-9);
        assert_eq!(tuples.argmax(), p, "episode {}", ep.id);
        assert!((preds.entries.iter().map(|(_, m)| m).sum::<f64>() - 1.0).abs() < 1e-9);
        // The utterance was produced for the true subgoal, so the filter
        // never empties the posterior.
        assert!(!preds.inconsistent);
        let post = goal_posterior(&mut model, &ep.initial, &ep.trajectory, &cfg.rationality).unwrap();
        let again = predicate_posterior(&mut model, &post, &ep.current(), &ep.utterance.formula);
        assert_eq!(again, preds);
    }
}

#[test]
fn best_scored_action_starts_the_planned_route() {
    let cfg = GenerationConfig::default();
    for ep in episodes(&Level::ALL, 0..10, &cfg) {
        let s = ep.current();
        let plan = grounded_planning(&s, ep.task, cfg.budget).unwrap();
        let scores = action_scores(&s, ep.task, cfg.budget);
        assert_eq!(scores.best_applicable(&s), plan.first().copied(), "episode {}", ep.id);
    }
}
