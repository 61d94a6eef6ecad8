//! Inflectional feature bundles attached to lattice arcs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::FormatError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    F,
    M,
    /// Both genders; written `F,M` in feature strings and `MF` in the lexicon.
    FM,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Number {
    S,
    P,
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Person {
    First,
    Second,
    Third,
    /// Any person (e.g. participles).
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tense {
    Past,
    Beinoni,
    Future,
    Imperative,
    Infinitive,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::F => "F",
            Gender::M => "M",
            Gender::FM => "F,M",
        }
    }

    /// Accepts both the feature-string spelling (`F,M`) and the lexicon
    /// spelling (`MF`, `FM`).
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "F" => Some(Gender::F),
            "M" => Some(Gender::M),
            "F,M" | "MF" | "FM" => Some(Gender::FM),
            _ => None,
        }
    }
}

impl Number {
    pub fn as_str(self) -> &'static str {
        match self {
            Number::S => "S",
            Number::P => "P",
            Number::D => "D",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "S" => Some(Number::S),
            "P" => Some(Number::P),
            "D" => Some(Number::D),
            _ => None,
        }
    }
}

impl Person {
    pub fn as_str(self) -> &'static str {
        match self {
            Person::First => "1",
            Person::Second => "2",
            Person::Third => "3",
            Person::All => "A",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(Person::First),
            "2" => Some(Person::Second),
            "3" => Some(Person::Third),
            "A" => Some(Person::All),
            _ => None,
        }
    }
}

impl Tense {
    pub fn as_str(self) -> &'static str {
        match self {
            Tense::Past => "PAST",
            Tense::Beinoni => "BEINONI",
            Tense::Future => "FUTURE",
            Tense::Imperative => "IMPERATIVE",
            Tense::Infinitive => "INFINITIVE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "PAST" => Some(Tense::Past),
            "BEINONI" => Some(Tense::Beinoni),
            "FUTURE" => Some(Tense::Future),
            "IMPERATIVE" => Some(Tense::Imperative),
            "INFINITIVE" => Some(Tense::Infinitive),
            _ => None,
        }
    }
}

const RESERVED_KEYS: [&str; 7] = [
    "gen", "num", "per", "tense", "suf_gen", "suf_num", "suf_per",
];

/// A bundle of morphological features.
///
/// Serialization is canonical: `gen`, `num`, `per`, `tense`, `suf_gen`,
/// `suf_num`, `suf_per`, then extra keys in alphabetical order, joined with
/// `|`. The empty bundle is written `_`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorphFeatures {
    pub gender: Option<Gender>,
    pub number: Option<Number>,
    pub person: Option<Person>,
    pub tense: Option<Tense>,
    pub suffix_gender: Option<Gender>,
    pub suffix_number: Option<Number>,
    pub suffix_person: Option<Person>,
    extra: BTreeMap<String, String>,
}

impl MorphFeatures {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.gender.is_none()
            && self.number.is_none()
            && self.person.is_none()
            && self.tense.is_none()
            && self.suffix_gender.is_none()
            && self.suffix_number.is_none()
            && self.suffix_person.is_none()
            && self.extra.is_empty()
    }

    pub fn extra(&self) -> &BTreeMap<String, String> {
        &self.extra
    }

    /// Adds a feature outside the closed set. Keys may not collide with the
    /// closed-set keys, and neither keys nor values may contain `|`; keys
    /// may not contain `=`.
    pub fn set_extra(
        &mut self,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<(), FormatError> {
        let key = key.into();
        let value = value.into();
        if key.is_empty()
            || key == "_"
            || RESERVED_KEYS.contains(&key.as_str())
            || key.contains(['=', '|'])
            || key.chars().any(char::is_whitespace)
        {
            return Err(FormatError::new(format!("invalid feature key '{key}'")));
        }
        if value.contains('|') || value.chars().any(char::is_whitespace) {
            return Err(FormatError::new(format!(
                "invalid value '{value}' for feature '{key}'"
            )));
        }
        self.extra.insert(key, value);
        Ok(())
    }

    pub fn with_gender(mut self, g: Gender) -> Self {
        self.gender = Some(g);
        self
    }

    pub fn with_number(mut self, n: Number) -> Self {
        self.number = Some(n);
        self
    }

    pub fn with_person(mut self, p: Person) -> Self {
        self.person = Some(p);
        self
    }

    pub fn with_tense(mut self, t: Tense) -> Self {
        self.tense = Some(t);
        self
    }

    fn pairs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        if let Some(g) = self.gender {
            out.push(("gen", g.as_str()));
        }
        if let Some(n) = self.number {
            out.push(("num", n.as_str()));
        }
        if let Some(p) = self.person {
            out.push(("per", p.as_str()));
        }
        if let Some(t) = self.tense {
            out.push(("tense", t.as_str()));
        }
        if let Some(g) = self.suffix_gender {
            out.push(("suf_gen", g.as_str()));
        }
        if let Some(n) = self.suffix_number {
            out.push(("suf_num", n.as_str()));
        }
        if let Some(p) = self.suffix_person {
            out.push(("suf_per", p.as_str()));
        }
        for (k, v) in &self.extra {
            out.push((k, v));
        }
        out
    }
}

impl fmt::Display for MorphFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self.pairs();
        if pairs.is_empty() {
            return f.write_str("_");
        }
        for (i, (k, v)) in pairs.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl FromStr for MorphFeatures {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut feats = MorphFeatures::new();
        if s == "_" {
            return Ok(feats);
        }
        if s.is_empty() {
            return Err(FormatError::new("empty feature string (use '_')"));
        }
        for pair in s.split('|') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| FormatError::new(format!("feature '{pair}' is not key=value")))?;
            let bad = || FormatError::new(format!("bad value '{value}' for feature '{key}'"));
            let dup = || FormatError::new(format!("duplicate feature '{key}'"));
            macro_rules! set_once {
                ($slot:expr, $parsed:expr) => {{
                    if $slot.is_some() {
                        return Err(dup());
                    }
                    $slot = Some($parsed.ok_or_else(bad)?);
                }};
            }
            match key {
                "gen" => set_once!(feats.gender, Gender::parse(value)),
                "num" => set_once!(feats.number, Number::parse(value)),
                "per" => set_once!(feats.person, Person::parse(value)),
                "tense" => set_once!(feats.tense, Tense::parse(value)),
                "suf_gen" => set_once!(feats.suffix_gender, Gender::parse(value)),
                "suf_num" => set_once!(feats.suffix_number, Number::parse(value)),
                "suf_per" => set_once!(feats.suffix_person, Person::parse(value)),
                _ => {
                    if feats.extra.contains_key(key) {
                        return Err(dup());
                    }
                    feats.set_extra(key, value)?;
                }
            }
        }
        Ok(feats)
    }
}
