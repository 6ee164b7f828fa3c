use hmt_core::language::{formula_space, parse, realize, content_space};
use hmt_core::worldgen::{generate_world, WorldConfig};
use hmt_core::{candidate_referents, ConstraintFormula, WorldState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_formula_round_trips() {
    let space = formula_space();
    assert!(space.len() > 100_000, "{}", space.len());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in &space {
        for _ in 0..2 {
            let s = realize(f, &mut rng);
            assert_eq!(parse(&s).as_ref(), Ok(f), "{s}");
        }
    }
}

// Brute-force reference: an object is a candidate iff each present field
// matches, checked field by field against the raw entity.
fn reference(f: &ConstraintFormula, w: &WorldState) -> Vec<u32> {
    let mut out = Vec::new();
    for o in w.objects() {
        if let Some(c) = f.class {
            if !c.contains(o.noun) {
                continue;
            }
        }
        if f.color.is_some() && o.attributes.color != f.color {
            continue;
        }
        if f.size.is_some() && o.attributes.size != f.size {
            continue;
        }
        if f.dusty && !o.attributes.dusty {
            continue;
        }
        if f.location.is_some() && w.fixture_of(o.id) != f.location {
            continue;
        }
        out.push(o.id.0);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn referents_match_reference(seed in 0u64..10_000) {
        let w = generate_world(&WorldConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed));
        for f in content_space(&w).iter().step_by(7) {
            let got: Vec<u32> = candidate_referents(f, &w).iter().map(|i| i.0).collect();
            prop_assert_eq!(got, reference(f, &w));
        }
    }

    #[test]
    fn adding_a_constraint_never_grows_the_set(seed in 0u64..10_000) {
        let w = generate_world(&WorldConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed));
        for f in content_space(&w).iter().step_by(5) {
            let set = candidate_referents(f, &w);
            let mut g = *f;
            g.dusty = true;
            prop_assert!(candidate_referents(&g, &w).iter().all(|i| set.contains(i)));
            if f.location.is_none() {
                g = *f;
                g.location = Some(hmt_core::Fixture::Sofa);
                prop_assert!(candidate_referents(&g, &w).iter().all(|i| set.contains(i)));
            }
        }
    }
}
