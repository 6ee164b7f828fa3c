//! Reference games over the content formulas of a world: a literal
//! listener, a soft-max speaker over it, and the pragmatic listener that
//! inverts that speaker.

use crate::language::{content_space_classes, ConstraintFormula};
use crate::vocab::{Color, Fixture, ObjectClass, Size};
use crate::world::ObjectEntity;
use crate::world::{ObjectId, WorldState};

/// Scores closer than this are treated as ties.
pub const TIE_EPS: f64 = 1e-9;

/// A set of objects as a bitmask over object ids.
pub type ObjectSet = u128;

pub fn bit(o: ObjectId) -> ObjectSet {
    assert!(o.0 < 128, "object id {} exceeds the reference-game limit", o.0);
    1u128 << o.0
}

pub fn members(mut set: ObjectSet) -> impl Iterator<Item = ObjectId> {
    std::iter::from_fn(move || {
        (set != 0).then(|| {
            let i = set.trailing_zeros();
            set &= set - 1;
            ObjectId(i)
        })
    })
}

pub fn set_of(objs: impl IntoIterator<Item = ObjectId>) -> ObjectSet {
    objs.into_iter().fold(0, |s, o| s | bit(o))
}

/// The world's content formulas with non-empty literal extensions.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pub formulas: Vec<ConstraintFormula>,
    extension: Vec<ObjectSet>,
    cost: Vec<f64>,
}

impl Lexicon {
    /// Formulas true of at least one object, in content-space order.
    pub fn new(state: &WorldState) -> Lexicon {
        let mask = |keep: &dyn Fn(&ObjectEntity) -> bool| set_of(state.objects().filter(|o| keep(o)).map(|o| o.id));
        let all = mask(&|_| true);
        let mut classes: Vec<Option<ObjectClass>> = vec![None];
        for f in content_space_classes(state) {
            classes.push(Some(f));
        }
        let colors: Vec<(Option<Color>, ObjectSet)> = std::iter::once((None, all))
            .chain(Color::ALL.map(|k| (Some(k), mask(&|o| o.attributes.color == Some(k)))))
            .collect();
        let sizes: Vec<(Option<Size>, ObjectSet)> = std::iter::once((None, all))
            .chain(Size::ALL.map(|z| (Some(z), mask(&|o| o.attributes.size == Some(z)))))
            .collect();
        let dusty = [(false, all), (true, mask(&|o| o.attributes.dusty))];
        let places: Vec<(Option<Fixture>, ObjectSet)> = std::iter::once((None, all))
            .chain(Fixture::ALL.map(|l| (Some(l), mask(&|o| state.fixture_of(o.id) == Some(l)))))
            .collect();
        let mut formulas = Vec::new();
        let mut extension = Vec::new();
        for class in classes {
            let c = class.map_or(all, |c| mask(&|o| c.contains(o.noun)));
            for &(color, k) in &colors {
                let ck = c & k;
                if ck == 0 {
                    continue;
                }
                for &(size, z) in &sizes {
                    let ckz = ck & z;
                    if ckz == 0 {
                        continue;
                    }
                    for &(d, m) in &dusty {
                        let ckzd = ckz & m;
                        if ckzd == 0 {
                            continue;
                        }
                        for &(location, l) in &places {
                            let ext = ckzd & l;
                            let f = ConstraintFormula::content(class, color, size, d, location);
                            if ext != 0 && f.check().is_ok() {
                                formulas.push(f);
                                extension.push(ext);
                            }
                        }
                    }
                }
            }
        }
        let cost = formulas.iter().map(|f| f64::from(f.cost())).collect();
        Lexicon { formulas, extension, cost }
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn extension(&self, u: usize) -> ObjectSet {
        self.extension[u]
    }

    pub fn cost(&self, u: usize) -> f64 {
        self.cost[u]
    }

    /// Index of the formula with the same meaning as `f`, if the world's
    /// content space contains it.
    pub fn index_of(&self, f: &ConstraintFormula) -> Option<usize> {
        let m = f.meaning();
        self.formulas.iter().position(|g| *g == m)
    }
}

/// A reference game restricted to a domain of candidate referents.
#[derive(Debug, Clone)]
pub struct Game<'a> {
    pub lex: &'a Lexicon,
    pub domain: ObjectSet,
    pub lambda: f64,
    pub alpha: f64,
    /// Soft-max normaliser of the literal speaker, indexed by object id.
    z: Vec<f64>,
}

impl<'a> Game<'a> {
    pub fn new(lex: &'a Lexicon, domain: ObjectSet, lambda: f64, alpha: f64) -> Game<'a> {
        let mut g = Game { lex, domain, lambda, alpha, z: Vec::new() };
        let mut z = vec![0.0; 128];
        for u in 0..lex.len() {
            let ext = g.literal(u);
            if ext == 0 {
                continue;
            }
            let x = (alpha * (1.0 / f64::from(ext.count_ones()) - lambda * lex.cost(u))).exp();
            for o in members(ext) {
                z[o.0 as usize] += x;
            }
        }
        g.z = z;
        g
    }

    /// Objects in the domain the formula literally describes.
    pub fn literal(&self, u: usize) -> ObjectSet {
        self.lex.extension(u) & self.domain
    }

    pub fn l0(&self, o: ObjectId, u: usize) -> f64 {
        let ext = self.literal(u);
        if ext & bit(o) == 0 {
            0.0
        } else {
            1.0 / f64::from(ext.count_ones())
        }
    }

    /// Literal speaker utility; `None` for formulas false of `o`.
    fn u0(&self, u: usize, o: ObjectId) -> Option<f64> {
        (self.literal(u) & bit(o) != 0).then(|| self.l0(o, u) - self.lambda * self.lex.cost(u))
    }

    /// Probability that a soft-max speaker aiming at `o` says `u`.
    pub fn s1(&self, u: usize, o: ObjectId) -> f64 {
        let Some(x) = self.u0(u, o) else { return 0.0 };
        let z = self.z[o.0 as usize];
        if z == 0.0 {
            0.0
        } else {
            (self.alpha * x).exp() / z
        }
    }

    /// Pragmatic listener: P(o | u) ∝ S1(u | o) under a uniform prior on
    /// the domain.
    pub fn l1(&self, u: usize) -> Vec<(ObjectId, f64)> {
        let scores: Vec<(ObjectId, f64)> = members(self.literal(u)).map(|o| (o, self.s1(u, o))).collect();
        let z: f64 = scores.iter().map(|(_, s)| s).sum();
        if z == 0.0 {
            return Vec::new();
        }
        scores.into_iter().map(|(o, s)| (o, s / z)).collect()
    }

    pub fn l1_of(&self, o: ObjectId, u: usize) -> f64 {
        self.l1(u).into_iter().find(|(p, _)| *p == o).map_or(0.0, |(_, x)| x)
    }

    /// Formulas maximising `informativeness − λ·cost` for a speaker aiming
    /// at `o` whose listener is literal over the domain.
    pub fn best_literal(&self, o: ObjectId) -> Vec<usize> {
        argmax((0..self.lex.len()).filter_map(|u| self.u0(u, o).map(|x| (u, x))))
    }

    /// Formulas maximising `informativeness − λ·cost` for a speaker aiming
    /// at `o` whose listener is the pragmatic one.
    pub fn best_pragmatic(&self, o: ObjectId) -> Vec<usize> {
        argmax(
            (0..self.lex.len())
                .filter(|&u| self.literal(u) & bit(o) != 0)
                .map(|u| (u, self.l1_of(o, u) - self.lambda * self.lex.cost(u))),
        )
    }

    /// Objects tied for the highest pragmatic-listener probability.
    pub fn pragmatic_set(&self, u: usize) -> ObjectSet {
        let l = self.l1(u);
        let Some(best) = l.iter().map(|(_, x)| *x).reduce(f64::max) else { return 0 };
        set_of(l.into_iter().filter(|(_, x)| *x >= best - TIE_EPS).map(|(o, _)| o))
    }
}

/// All keys whose score is within [`TIE_EPS`] of the maximum.
pub fn argmax(scored: impl Iterator<Item = (usize, f64)>) -> Vec<usize> {
    let scored: Vec<(usize, f64)> = scored.collect();
    let Some(best) = scored.iter().map(|(_, x)| *x).reduce(f64::max) else { return Vec::new() };
    scored.into_iter().filter(|(_, x)| *x >= best - TIE_EPS).map(|(u, _)| u).collect()
}
