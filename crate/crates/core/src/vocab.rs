//! Closed vocabulary of the household domain: fixtures, object nouns, genres
//! and the attribute values objects may carry.
//!
//! Nouns and genres are loaded once from `data/catalog.json` and interned as
//! small indices; they serialize by name.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A fixed room fixture. Objects rest on top of surfaces and inside containers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fixture {
    Floor,
    Countertop,
    Sofa,
    Bed,
    Stove,
    Table,
    Shelf,
    Toilet,
    Cabinet,
    Bathtub,
    Microwave,
    Oven,
    Dishwasher,
    Refrigerator,
    Sink,
    Pool,
}

/// Whether a fixture holds things on top of it or inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureKind {
    Surface,
    Container,
}

impl Fixture {
    pub const ALL: [Fixture; 16] = [
        Fixture::Floor,
        Fixture::Countertop,
        Fixture::Sofa,
        Fixture::Bed,
        Fixture::Stove,
        Fixture::Table,
        Fixture::Shelf,
        Fixture::Toilet,
        Fixture::Cabinet,
        Fixture::Bathtub,
        Fixture::Microwave,
        Fixture::Oven,
        Fixture::Dishwasher,
        Fixture::Refrigerator,
        Fixture::Sink,
        Fixture::Pool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Floor => "floor",
            Fixture::Countertop => "countertop",
            Fixture::Sofa => "sofa",
            Fixture::Bed => "bed",
            Fixture::Stove => "stove",
            Fixture::Table => "table",
            Fixture::Shelf => "shelf",
            Fixture::Toilet => "toilet",
            Fixture::Cabinet => "cabinet",
            Fixture::Bathtub => "bathtub",
            Fixture::Microwave => "microwave",
            Fixture::Oven => "oven",
            Fixture::Dishwasher => "dishwasher",
            Fixture::Refrigerator => "refrigerator",
            Fixture::Sink => "sink",
            Fixture::Pool => "pool",
        }
    }

    pub fn from_name(name: &str) -> Option<Fixture> {
        Fixture::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn kind(self) -> FixtureKind {
        if self >= Fixture::Cabinet {
            FixtureKind::Container
        } else {
            FixtureKind::Surface
        }
    }

    pub fn is_container(self) -> bool {
        self.kind() == FixtureKind::Container
    }

    pub fn openable(self) -> bool {
        matches!(
            self,
            Fixture::Cabinet
                | Fixture::Microwave
                | Fixture::Oven
                | Fixture::Dishwasher
                | Fixture::Refrigerator
        )
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Red, Color::Green, Color::Blue];

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Size {
    Small,
    Large,
}

impl Size {
    pub const ALL: [Size; 2] = [Size::Small, Size::Large];

    pub fn name(self) -> &'static str {
        match self {
            Size::Small => "small",
            Size::Large => "large",
        }
    }

    pub fn from_name(name: &str) -> Option<Size> {
        Size::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Interned object type, e.g. `document`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Noun(u16);

/// Interned object category, e.g. `paper-product`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genre(u16);

#[derive(Debug, Deserialize)]
struct RawCatalog {
    version: u32,
    fixtures: Vec<RawFixture>,
    genres: Vec<RawGenre>,
    nouns: Vec<RawNoun>,
}

#[derive(Debug, Deserialize)]
struct RawFixture {
    name: String,
    kind: FixtureKind,
    openable: bool,
}

#[derive(Debug, Deserialize)]
struct RawGenre {
    name: String,
    surface: String,
    plural: String,
}

#[derive(Debug, Deserialize)]
struct RawNoun {
    name: String,
    genre: String,
    plural: String,
    #[serde(default)]
    holds: bool,
    #[serde(default)]
    openable: bool,
}

#[derive(Debug)]
pub struct GenreEntry {
    pub name: String,
    pub surface: String,
    pub plural: String,
}

#[derive(Debug)]
pub struct NounEntry {
    pub name: String,
    pub genre: Genre,
    pub plural: String,
    /// Portable container: other objects can be put into it.
    pub holds: bool,
    pub openable: bool,
}

#[derive(Debug)]
pub struct Catalog {
    pub version: u32,
    genres: Vec<GenreEntry>,
    nouns: Vec<NounEntry>,
    noun_by_name: BTreeMap<String, Noun>,
    genre_by_name: BTreeMap<String, Genre>,
}

static CATALOG: LazyLock<Catalog> = LazyLock::new(|| {
    Catalog::from_json(include_str!("../data/catalog.json")).expect("bundled catalog is valid")
});

pub fn catalog() -> &'static Catalog {
    &CATALOG
}

impl Catalog {
    fn from_json(text: &str) -> Result<Catalog, String> {
        let raw: RawCatalog = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if raw.fixtures.len() != Fixture::ALL.len() {
            return Err("fixture list does not match the room layout".into());
        }
        for (fixture, entry) in Fixture::ALL.iter().zip(&raw.fixtures) {
            if entry.name != fixture.name()
                || entry.kind != fixture.kind()
                || entry.openable != fixture.openable()
            {
                return Err(format!("fixture entry {} disagrees with the room layout", entry.name));
            }
        }
        let genres: Vec<GenreEntry> = raw
            .genres
            .into_iter()
            .map(|g| GenreEntry { name: g.name, surface: g.surface, plural: g.plural })
            .collect();
        let genre_by_name: BTreeMap<String, Genre> = genres
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.clone(), Genre(i as u16)))
            .collect();
        let mut nouns = Vec::with_capacity(raw.nouns.len());
        for n in raw.nouns {
            let genre = *genre_by_name
                .get(&n.genre)
                .ok_or_else(|| format!("noun {} has unknown genre {}", n.name, n.genre))?;
            nouns.push(NounEntry { name: n.name, genre, plural: n.plural, holds: n.holds, openable: n.openable });
        }
        let noun_by_name = nouns
            .iter()
            .enumerate()
            .map(|(i, n)| (n.name.clone(), Noun(i as u16)))
            .collect::<BTreeMap<_, _>>();
        if noun_by_name.len() != nouns.len() || genre_by_name.len() != genres.len() {
            return Err("duplicate vocabulary entry".into());
        }
        Ok(Catalog { version: raw.version, genres, nouns, noun_by_name, genre_by_name })
    }

    pub fn nouns(&self) -> impl Iterator<Item = Noun> + '_ {
        (0..self.nouns.len()).map(|i| Noun(i as u16))
    }

    pub fn genres(&self) -> impl Iterator<Item = Genre> + '_ {
        (0..self.genres.len()).map(|i| Genre(i as u16))
    }

    pub fn noun(&self, name: &str) -> Option<Noun> {
        self.noun_by_name.get(name).copied()
    }

    pub fn genre(&self, name: &str) -> Option<Genre> {
        self.genre_by_name.get(name).copied()
    }

    pub fn nouns_of(&self, genre: Genre) -> impl Iterator<Item = Noun> + '_ {
        self.nouns().filter(move |n| n.genre() == genre)
    }
}

impl Noun {
    fn entry(self) -> &'static NounEntry {
        &catalog().nouns[self.0 as usize]
    }

    /// Looks a noun up by name, panicking on unknown names. Intended for
    /// literals in tests and fixtures.
    pub fn named(name: &str) -> Noun {
        catalog().noun(name).unwrap_or_else(|| panic!("unknown noun {name}"))
    }

    pub fn name(self) -> &'static str {
        &self.entry().name
    }

    pub fn plural(self) -> &'static str {
        &self.entry().plural
    }

    pub fn genre(self) -> Genre {
        self.entry().genre
    }

    pub fn holds(self) -> bool {
        self.entry().holds
    }

    pub fn openable(self) -> bool {
        self.entry().openable
    }
}

impl Genre {
    fn entry(self) -> &'static GenreEntry {
        &catalog().genres[self.0 as usize]
    }

    pub fn named(name: &str) -> Genre {
        catalog().genre(name).unwrap_or_else(|| panic!("unknown genre {name}"))
    }

    pub fn name(self) -> &'static str {
        &self.entry().name
    }

    pub fn surface(self) -> &'static str {
        &self.entry().surface
    }

    pub fn plural(self) -> &'static str {
        &self.entry().plural
    }
}

impl fmt::Debug for Noun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Noun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Noun {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Noun {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        catalog()
            .noun(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown noun `{name}`")))
    }
}

impl Serialize for Genre {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Genre {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        catalog()
            .genre(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown genre `{name}`")))
    }
}

/// An object class: either a concrete noun or a whole genre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "name")]
pub enum ObjectClass {
    Noun(Noun),
    Genre(Genre),
}

impl ObjectClass {
    pub fn contains(self, noun: Noun) -> bool {
        match self {
            ObjectClass::Noun(n) => n == noun,
            ObjectClass::Genre(g) => noun.genre() == g,
        }
    }

    pub fn surface(self) -> &'static str {
        match self {
            ObjectClass::Noun(n) => n.name(),
            ObjectClass::Genre(g) => g.surface(),
        }
    }

    pub fn plural(self) -> &'static str {
        match self {
            ObjectClass::Noun(n) => n.plural(),
            ObjectClass::Genre(g) => g.plural(),
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectClass::Noun(n) => write!(f, "{n}"),
            ObjectClass::Genre(g) => write!(f, "{g}"),
        }
    }
}
