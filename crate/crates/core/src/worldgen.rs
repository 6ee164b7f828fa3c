//! Random household worlds.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::vocab::{catalog, Color, Fixture, Genre, Noun, Size};
use crate::world::{Attributes, Container, Location, ObjectEntity, ObjectId, WorldState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Non-container genres represented in a world.
    pub genres: (usize, usize),
    /// Distinct nouns drawn per represented genre.
    pub nouns_per_genre: (usize, usize),
    /// Instances per noun.
    pub instances: (usize, usize),
    pub boxes: (usize, usize),
    pub buckets: (usize, usize),
    pub ashcans: (usize, usize),
    pub baskets: (usize, usize),
    pub packages: (usize, usize),
    pub p_inside_container: f64,
    pub p_color: f64,
    pub p_size: f64,
    pub p_dusty: f64,
    pub p_stained: f64,
    pub p_open: f64,
}

impl Default for WorldConfig {
    fn default() -> WorldConfig {
        WorldConfig {
            genres: (5, 7),
            nouns_per_genre: (1, 2),
            instances: (2, 3),
            boxes: (1, 2),
            buckets: (0, 1),
            ashcans: (0, 1),
            baskets: (0, 1),
            packages: (0, 1),
            p_inside_container: 0.15,
            p_color: 0.6,
            p_size: 0.3,
            p_dusty: 0.3,
            p_stained: 0.05,
            p_open: 0.5,
        }
    }
}

fn draw<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (usize, usize)) -> usize {
    if hi <= lo {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn attributes<R: Rng + ?Sized>(noun: Noun, cfg: &WorldConfig, rng: &mut R) -> Attributes {
    let mut a = Attributes::default();
    if rng.gen_bool(cfg.p_color) {
        a.color = Some(*Color::ALL.choose(rng).expect("colors"));
    }
    if rng.gen_bool(cfg.p_size) {
        a.size = Some(*Size::ALL.choose(rng).expect("sizes"));
    }
    a.dusty = rng.gen_bool(cfg.p_dusty);
    a.stained = rng.gen_bool(cfg.p_stained);
    if noun.openable() {
        a.open = Some(rng.gen_bool(cfg.p_open));
    }
    if noun.genre() == Genre::named("electrical-device") {
        a.toggled = Some(false);
    }
    a
}

fn fixture_location(f: Fixture) -> Location {
    if f.is_container() {
        Location::Inside(Container::Fixture(f))
    } else {
        Location::OnTopOf(f)
    }
}

/// Samples a fully observable world. Portable containers rest on fixtures;
/// other objects rest on fixtures or inside a portable container. The
/// robot starts on the floor.
pub fn generate_world<R: Rng + ?Sized>(cfg: &WorldConfig, rng: &mut R) -> WorldState {
    let cat = catalog();
    let mut nouns: Vec<(Noun, usize)> = Vec::new();
    for (name, range) in [
        ("box", cfg.boxes),
        ("bucket", cfg.buckets),
        ("ashcan", cfg.ashcans),
        ("basket", cfg.baskets),
        ("package", cfg.packages),
    ] {
        let k = draw(rng, range);
        if k > 0 {
            nouns.push((Noun::named(name), k));
        }
    }
    let container = Genre::named("container");
    let genres: Vec<Genre> = cat.genres().filter(|&g| g != container).collect();
    let k = draw(rng, cfg.genres).min(genres.len());
    for g in genres.choose_multiple(rng, k) {
        let pool: Vec<Noun> = cat.nouns_of(*g).collect();
        let n = draw(rng, cfg.nouns_per_genre).min(pool.len());
        for &noun in pool.choose_multiple(rng, n) {
            nouns.push((noun, draw(rng, cfg.instances)));
        }
    }

    let mut objects: Vec<ObjectEntity> = Vec::new();
    let mut holders: Vec<ObjectId> = Vec::new();
    for (noun, count) in nouns {
        for instance in 0..count {
            let id = ObjectId(objects.len() as u32);
            let location = if !noun.holds() && !holders.is_empty() && rng.gen_bool(cfg.p_inside_container) {
                Location::Inside(Container::Object(*holders.choose(rng).expect("non-empty")))
            } else {
                fixture_location(*Fixture::ALL.choose(rng).expect("fixtures"))
            };
            if noun.holds() {
                holders.push(id);
            }
            objects.push(ObjectEntity { id, noun, instance: instance as u32, attributes: attributes(noun, cfg, rng), location });
        }
    }
    let open: Vec<Fixture> = Fixture::ALL.into_iter().filter(|f| f.openable() && rng.gen_bool(cfg.p_open)).collect();
    let human_at = Fixture::ALL.into_iter().choose(rng).expect("fixtures");
    WorldState::new(objects, open, human_at, Fixture::Floor).expect("generated worlds are valid")
}
