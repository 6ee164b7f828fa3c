//! The closed instruction grammar: constraint formulas, their surface
//! realisations, the inverse parser, and literal reference resolution.

use std::collections::HashMap;
use std::fmt;
use std::sync::LazyLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab::{catalog, Color, Fixture, ObjectClass, Size};
use crate::world::{ObjectEntity, ObjectId, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestVerb {
    Give,
    Pass,
    Bring,
}

impl RequestVerb {
    pub const ALL: [RequestVerb; 3] = [RequestVerb::Give, RequestVerb::Pass, RequestVerb::Bring];

    pub fn word(self) -> &'static str {
        match self {
            RequestVerb::Give => &grammar().verbs[0],
            RequestVerb::Pass => &grammar().verbs[1],
            RequestVerb::Bring => &grammar().verbs[2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Determiner {
    The,
    That,
    A,
    OneOf,
}

impl Determiner {
    pub const ALL: [Determiner; 4] = [Determiner::The, Determiner::That, Determiner::A, Determiner::OneOf];
}

/// The logical form of a request: which object is wanted, described by
/// type, attribute and location constraints. A missing type means the head
/// noun is elided ("the dusty one", "that").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstraintFormula {
    pub verb: RequestVerb,
    pub det: Determiner,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ObjectClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<Size>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dusty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Fixture>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LanguageError {
    #[error("cannot parse utterance; longest grammatical prefix: `{prefix}`")]
    UnparsableUtterance { prefix: String },
    #[error("ill-formed formula: {0}")]
    IllFormed(&'static str),
}

impl ConstraintFormula {
    /// A formula with the default request verb and determiner.
    pub fn content(class: Option<ObjectClass>, color: Option<Color>, size: Option<Size>, dusty: bool, location: Option<Fixture>) -> Self {
        ConstraintFormula { verb: RequestVerb::Give, det: Determiner::The, class, color, size, dusty, location }
    }

    pub fn pro_form(&self) -> bool {
        self.class.is_none()
    }

    pub fn attribute_count(&self) -> u32 {
        u32::from(self.color.is_some()) + u32::from(self.size.is_some()) + u32::from(self.dusty)
    }

    /// Content words: one per attribute, one for a head noun, two for a
    /// locative phrase ("from" + fixture).
    pub fn cost(&self) -> u32 {
        self.attribute_count() + u32::from(self.class.is_some()) + if self.location.is_some() { 2 } else { 0 }
    }

    pub fn check(&self) -> Result<(), LanguageError> {
        if self.pro_form() {
            let attrs = self.attribute_count() > 0;
            match self.det {
                Determiner::A if !attrs => return Err(LanguageError::IllFormed("`a one` needs an attribute")),
                _ if !attrs && self.location.is_none() => {
                    return Err(LanguageError::IllFormed("an elided head needs an attribute or a location"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The same constraints with the verb and determiner reset, used to
    /// compare meaning regardless of phrasing.
    pub fn meaning(&self) -> ConstraintFormula {
        ConstraintFormula { verb: RequestVerb::Give, det: Determiner::The, ..*self }
    }

    pub fn admits(&self, state: &WorldState, o: &ObjectEntity) -> bool {
        let a = &o.attributes;
        self.class.is_none_or(|c| c.contains(o.noun))
            && self.color.is_none_or(|c| a.color == Some(c))
            && self.size.is_none_or(|s| a.size == Some(s))
            && (!self.dusty || a.dusty)
            && self.location.is_none_or(|f| state.fixture_of(o.id) == Some(f))
    }
}

/// A surface string with the formula it expresses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub surface: String,
    pub formula: ConstraintFormula,
}

#[derive(Deserialize)]
struct RawFrame {
    prefix: Vec<String>,
    after_verb: Vec<String>,
    end: String,
}

#[derive(Deserialize)]
struct RawGrammar {
    frames: Vec<RawFrame>,
    verbs: HashMap<String, String>,
    attribute_order: Vec<String>,
    pro_form: HashMap<String, String>,
    locatives: HashMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AttrSlot {
    Dusty,
    Size,
    Color,
}

struct Grammar {
    frames: Vec<RawFrame>,
    verbs: [String; 3],
    attribute_order: Vec<AttrSlot>,
    one: String,
    ones: String,
    surface_preps: Vec<String>,
    container_preps: Vec<String>,
    singular: HashMap<Vec<String>, ObjectClass>,
    plural: HashMap<Vec<String>, ObjectClass>,
    longest_head: usize,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

fn load_grammar(text: &str) -> Grammar {
    let raw: RawGrammar = serde_json::from_str(text).expect("bundled grammar parses");
    let verb = |k: &str| raw.verbs.get(k).cloned().unwrap_or_else(|| panic!("grammar lacks verb {k}"));
    let attribute_order = raw
        .attribute_order
        .iter()
        .map(|a| match a.as_str() {
            "dusty" => AttrSlot::Dusty,
            "size" => AttrSlot::Size,
            "color" => AttrSlot::Color,
            other => panic!("unknown attribute slot {other}"),
        })
        .collect();
    let cat = catalog();
    let mut singular = HashMap::new();
    let mut plural = HashMap::new();
    for n in cat.nouns() {
        assert!(singular.insert(words(n.name()), ObjectClass::Noun(n)).is_none(), "duplicate head {n}");
        assert!(plural.insert(words(n.plural()), ObjectClass::Noun(n)).is_none(), "duplicate plural {n}");
    }
    for g in cat.genres() {
        assert!(singular.insert(words(g.surface()), ObjectClass::Genre(g)).is_none(), "duplicate head {g}");
        assert!(plural.insert(words(g.plural()), ObjectClass::Genre(g)).is_none(), "duplicate plural {g}");
    }
    let longest_head = singular.keys().chain(plural.keys()).map(Vec::len).max().unwrap_or(1);
    Grammar {
        frames: raw.frames,
        verbs: [verb("give"), verb("pass"), verb("bring")],
        attribute_order,
        one: raw.pro_form["singular"].clone(),
        ones: raw.pro_form["plural"].clone(),
        surface_preps: raw.locatives["surface"].clone(),
        container_preps: raw.locatives["container"].clone(),
        singular,
        plural,
        longest_head,
    }
}

static GRAMMAR: LazyLock<Grammar> = LazyLock::new(|| load_grammar(include_str!("../data/grammar.json")));

fn grammar() -> &'static Grammar {
    &GRAMMAR
}

fn article(next: &str) -> &'static str {
    match next.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

fn attribute_words(f: &ConstraintFormula) -> Vec<&'static str> {
    let mut out = Vec::new();
    for slot in &grammar().attribute_order {
        match slot {
            AttrSlot::Dusty if f.dusty => out.push("dusty"),
            AttrSlot::Size => out.extend(f.size.map(Size::name)),
            AttrSlot::Color => out.extend(f.color.map(Color::name)),
            _ => {}
        }
    }
    out
}

fn noun_phrase(f: &ConstraintFormula) -> String {
    let g = grammar();
    let mut tail: Vec<&str> = attribute_words(f);
    let plural = f.det == Determiner::OneOf;
    let head = match (f.class, plural) {
        (Some(c), false) => c.surface(),
        (Some(c), true) => c.plural(),
        (None, false) => g.one.as_str(),
        (None, true) => g.ones.as_str(),
    };
    if !(f.det == Determiner::That && f.pro_form() && tail.is_empty()) {
        tail.push(head);
    }
    let body = tail.join(" ");
    match f.det {
        Determiner::The => format!("the {body}"),
        Determiner::A => format!("{} {body}", article(&body)),
        Determiner::That if body.is_empty() => "that".to_string(),
        Determiner::That => format!("that {body}"),
        Determiner::OneOf => format!("one of the {body}"),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Renders a formula as a sentence. The frame and the locative preposition
/// are drawn from `rng`; neither carries meaning.
pub fn realize<R: Rng + ?Sized>(f: &ConstraintFormula, rng: &mut R) -> String {
    let g = grammar();
    let frame = g.frames.choose(rng).expect("grammar has frames");
    let mut parts: Vec<String> = frame.prefix.clone();
    parts.push(f.verb.word().to_string());
    parts.extend(frame.after_verb.iter().cloned());
    parts.push(noun_phrase(f));
    if let Some(loc) = f.location {
        let preps = if loc.is_container() { &g.container_preps } else { &g.surface_preps };
        let prep = preps.choose(rng).expect("grammar has prepositions");
        parts.push(format!("{prep} the {loc}"));
    }
    format!("{}{}", capitalize(&parts.join(" ")), frame.end)
}

fn tokenize(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

struct Cursor<'a> {
    toks: &'a [String],
    at: usize,
    best: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.at).map(String::as_str)
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.peek() == Some(word) {
            self.at += 1;
            self.best = self.best.max(self.at);
            true
        } else {
            false
        }
    }

    fn eat_all(&mut self, ws: &[String]) -> bool {
        let start = self.at;
        for w in ws {
            if !self.eat(w) {
                self.at = start;
                return false;
            }
        }
        true
    }

    fn head(&mut self, table: &HashMap<Vec<String>, ObjectClass>) -> Option<ObjectClass> {
        let longest = grammar().longest_head.min(self.toks.len() - self.at);
        for len in (1..=longest).rev() {
            if let Some(&c) = table.get(&self.toks[self.at..self.at + len]) {
                self.at += len;
                self.best = self.best.max(self.at);
                return Some(c);
            }
        }
        None
    }
}

fn parse_np(cur: &mut Cursor<'_>, verb: RequestVerb) -> Option<ConstraintFormula> {
    let g = grammar();
    let det = if cur.eat("the") {
        Determiner::The
    } else if cur.eat("that") {
        Determiner::That
    } else if cur.eat("a") || cur.eat("an") {
        Determiner::A
    } else if cur.eat("one") {
        if !(cur.eat("of") && cur.eat("the")) {
            return None;
        }
        Determiner::OneOf
    } else {
        return None;
    };
    let mut f = ConstraintFormula { verb, det, class: None, color: None, size: None, dusty: false, location: None };
    loop {
        match cur.peek() {
            Some("dusty") if !f.dusty => f.dusty = true,
            Some(w) if f.color.is_none() && Color::from_name(w).is_some() => f.color = Color::from_name(w),
            Some(w) if f.size.is_none() && Size::from_name(w).is_some() => f.size = Size::from_name(w),
            _ => break,
        }
        cur.at += 1;
        cur.best = cur.best.max(cur.at);
    }
    let bare_that = det == Determiner::That && f.attribute_count() == 0;
    let pro = if det == Determiner::OneOf { g.ones.as_str() } else { g.one.as_str() };
    if cur.eat(pro) {
        return Some(f);
    }
    if bare_that && (cur.peek().is_none() || is_prep(cur.peek())) {
        return Some(f);
    }
    let table = if det == Determiner::OneOf { &g.plural } else { &g.singular };
    f.class = Some(cur.head(table)?);
    Some(f)
}

fn is_prep(w: Option<&str>) -> bool {
    let g = grammar();
    w.is_some_and(|w| g.surface_preps.iter().chain(&g.container_preps).any(|p| p == w))
}

fn parse_tokens(toks: &[String]) -> Result<ConstraintFormula, usize> {
    let g = grammar();
    let mut best = 0;
    for frame in &g.frames {
        let mut cur = Cursor { toks, at: 0, best: 0 };
        let attempt = (|| {
            if !cur.eat_all(&frame.prefix) {
                return None;
            }
            let verb = RequestVerb::ALL.into_iter().find(|v| cur.eat(v.word()))?;
            if !cur.eat_all(&frame.after_verb) {
                return None;
            }
            let mut f = parse_np(&mut cur, verb)?;
            if is_prep(cur.peek()) {
                cur.at += 1;
                if !cur.eat("the") {
                    return None;
                }
                let loc = cur.peek().and_then(Fixture::from_name)?;
                cur.at += 1;
                cur.best = cur.best.max(cur.at);
                f.location = Some(loc);
            }
            (cur.at == toks.len()).then_some(f)
        })();
        if let Some(f) = attempt {
            return Ok(f);
        }
        best = best.max(cur.best);
    }
    Err(best)
}

/// Recovers the formula behind a sentence of the grammar. Case and
/// punctuation are ignored.
pub fn parse(s: &str) -> Result<ConstraintFormula, LanguageError> {
    let toks = tokenize(s);
    match parse_tokens(&toks) {
        Ok(f) => {
            f.check()?;
            Ok(f)
        }
        Err(n) => Err(LanguageError::UnparsableUtterance { prefix: toks[..n].join(" ") }),
    }
}

/// Objects meeting every explicit constraint of `f`, id-ascending.
pub fn candidate_referents(f: &ConstraintFormula, state: &WorldState) -> Vec<ObjectId> {
    state.objects().filter(|o| f.admits(state, o)).map(|o| o.id).collect()
}

/// Every well-formed formula (verb and determiner fixed to the defaults)
/// whose type constraint names a noun or genre present in `state`.
pub fn content_space(state: &WorldState) -> Vec<ConstraintFormula> {
    let classes: Vec<Option<ObjectClass>> = std::iter::once(None).chain(content_space_classes(state).into_iter().map(Some)).collect();
    formulas_over(&classes, &[RequestVerb::Give], &[Determiner::The])
}

/// Nouns present in the world followed by their genres.
pub fn content_space_classes(state: &WorldState) -> Vec<ObjectClass> {
    let mut nouns: Vec<_> = state.objects().map(|o| o.noun).collect();
    nouns.sort();
    nouns.dedup();
    let mut genres: Vec<_> = nouns.iter().map(|n| n.genre()).collect();
    genres.sort();
    genres.dedup();
    nouns.into_iter().map(ObjectClass::Noun).chain(genres.into_iter().map(ObjectClass::Genre)).collect()
}

/// The whole finite formula space of the grammar.
pub fn formula_space() -> Vec<ConstraintFormula> {
    let cat = catalog();
    let mut classes: Vec<Option<ObjectClass>> = vec![None];
    classes.extend(cat.nouns().map(|n| Some(ObjectClass::Noun(n))));
    classes.extend(cat.genres().map(|g| Some(ObjectClass::Genre(g))));
    formulas_over(&classes, &RequestVerb::ALL, &Determiner::ALL)
}

fn formulas_over(classes: &[Option<ObjectClass>], verbs: &[RequestVerb], dets: &[Determiner]) -> Vec<ConstraintFormula> {
    let colors: Vec<Option<Color>> = std::iter::once(None).chain(Color::ALL.map(Some)).collect();
    let sizes: Vec<Option<Size>> = std::iter::once(None).chain(Size::ALL.map(Some)).collect();
    let locations: Vec<Option<Fixture>> = std::iter::once(None).chain(Fixture::ALL.map(Some)).collect();
    let mut out = Vec::new();
    for &verb in verbs {
        for &det in dets {
            for &class in classes {
                for &color in &colors {
                    for &size in &sizes {
                        for dusty in [false, true] {
                            for &location in &locations {
                                let f = ConstraintFormula { verb, det, class, color, size, dusty, location };
                                if f.check().is_ok() {
                                    out.push(f);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

impl fmt::Display for ConstraintFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = vec![format!("{:?}", self.verb).to_lowercase(), format!("{:?}", self.det).to_lowercase()];
        parts.push(self.class.map_or("∅".into(), |c| c.to_string()));
        let attrs = attribute_words(self);
        parts.push(format!("{{{}}}", attrs.join(",")));
        parts.push(self.location.map_or("∅".into(), |l| l.to_string()));
        if self.pro_form() {
            parts.push("pro-form".into());
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}
