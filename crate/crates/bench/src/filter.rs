//! The irrelevant-object filter.

use hmt_core::episode::Episode;
use hmt_core::human::Step;
use hmt_core::{ConstraintFormula, HumanGoal, Location, ObjectId, WorldState};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Objects whose noun appears in neither the goal's predicates nor the
/// utterance's type constraint, excluding anything in an agent's hand or
/// in `keep`. Sorted by id.
pub fn irrelevant_objects(s: &WorldState, goal: &HumanGoal, formula: &ConstraintFormula, keep: &[ObjectId]) -> Vec<ObjectId> {
    s.objects()
        .filter(|o| !goal.predicates.iter().any(|p| p.mentions(o.noun)))
        .filter(|o| !formula.class.is_some_and(|c| c.contains(o.noun)))
        .filter(|o| !matches!(o.location, Location::HeldBy(_)))
        .filter(|o| !keep.contains(&o.id))
        .map(|o| o.id)
        .collect()
}

/// Removes ⌊fraction·k⌋ of the k irrelevant objects, chosen at random.
/// Contents of removed containers stay at the container's fixture.
pub fn filter_irrelevant<R: Rng + ?Sized>(
    s: &WorldState,
    goal: &HumanGoal,
    formula: &ConstraintFormula,
    fraction: f64,
    rng: &mut R,
) -> WorldState {
    let mut pool = irrelevant_objects(s, goal, formula, &[]);
    pool.shuffle(rng);
    let n = (fraction * pool.len() as f64).floor() as usize;
    s.without_objects(&pool[..n])
}

/// Applies the filter to every state of an episode alike. Objects the
/// human's actions refer to are kept so the trajectory stays valid. The
/// removal order is fixed by the episode seed, so larger fractions remove
/// supersets of what smaller ones remove.
pub fn filter_episode(ep: &Episode, fraction: f64) -> Episode {
    if fraction <= 0.0 {
        return ep.clone();
    }
    let touched: Vec<ObjectId> = ep
        .trajectory
        .iter()
        .flat_map(|st| {
            let target = match st.action {
                hmt_core::Action::PutInto(_, hmt_core::Container::Object(c))
                | hmt_core::Action::TakeFrom(_, hmt_core::Container::Object(c)) => Some(c),
                _ => None,
            };
            st.action.object().into_iter().chain(target)
        })
        .collect();
    let mut pool = irrelevant_objects(&ep.initial, &ep.goal, &ep.utterance.formula, &touched);
    pool.retain(|&o| ep.current().object(o).is_some_and(|e| !matches!(e.location, Location::HeldBy(_))));
    pool.shuffle(&mut ChaCha8Rng::seed_from_u64(ep.seed ^ 0xF117_E2));
    let n = (fraction.min(1.0) * pool.len() as f64).floor() as usize;
    let removed = &pool[..n];
    Episode {
        initial: ep.initial.without_objects(removed),
        trajectory: ep
            .trajectory
            .iter()
            .map(|st| Step { state: st.state.without_objects(removed), action: st.action })
            .collect(),
        ..ep.clone()
    }
}
