//! Feature templates over joint states, hashed to 64-bit ids.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::error::FormatError;
use crate::transition::{JointState, Transition};
use crate::types::{LatticeArc, SentenceLattice, HASH_SEED};

/// Value of an undefined address or attribute.
pub const NULL: &str = "NULL";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Address {
    /// Stack top.
    S0,
    /// Second stack item.
    S1,
    /// Queue front.
    N0,
    /// Last selected path arc.
    L0,
    /// Path arc before `L0`.
    L1,
    /// The raw token at the lattice frontier.
    T0,
    /// The arc a SELECT transition would choose.
    A0,
}

impl Address {
    fn as_str(self) -> &'static str {
        match self {
            Address::S0 => "S0",
            Address::S1 => "S1",
            Address::N0 => "N0",
            Address::L0 => "L0",
            Address::L1 => "L1",
            Address::T0 => "T0",
            Address::A0 => "A0",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "S0" => Address::S0,
            "S1" => Address::S1,
            "N0" => Address::N0,
            "L0" => Address::L0,
            "L1" => Address::L1,
            "T0" => Address::T0,
            "A0" => Address::A0,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attribute {
    Form,
    Pos,
    Lemma,
    Gender,
    Number,
    Person,
    Tense,
    /// Label of the node's head arc.
    Label,
    /// Bucketed number of lattice arcs leaving the frontier.
    Arcs,
    /// Number of morphemes selected so far.
    PathLen,
}

impl Attribute {
    fn as_str(self) -> &'static str {
        match self {
            Attribute::Form => "form",
            Attribute::Pos => "pos",
            Attribute::Lemma => "lemma",
            Attribute::Gender => "gender",
            Attribute::Number => "number",
            Attribute::Person => "person",
            Attribute::Tense => "tense",
            Attribute::Label => "label",
            Attribute::Arcs => "arcs",
            Attribute::PathLen => "pathlen",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "form" => Attribute::Form,
            "pos" => Attribute::Pos,
            "lemma" => Attribute::Lemma,
            "gender" => Attribute::Gender,
            "number" => Attribute::Number,
            "person" => Attribute::Person,
            "tense" => Attribute::Tense,
            "label" => Attribute::Label,
            "arcs" => Attribute::Arcs,
            "pathlen" => Attribute::PathLen,
            _ => return None,
        })
    }
}

/// A conjunction of `address.attribute` atoms, written `S0.pos+N0.pos`.
/// The template `bias` has no atoms and fires on every transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeatureTemplate {
    atoms: Vec<(Address, Attribute)>,
}

impl FeatureTemplate {
    pub fn atoms(&self) -> &[(Address, Attribute)] {
        &self.atoms
    }

    pub fn uses_candidate(&self) -> bool {
        self.atoms.iter().any(|(a, _)| *a == Address::A0)
    }
}

impl fmt::Display for FeatureTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("bias");
        }
        for (i, (a, t)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_char('+')?;
            }
            write!(f, "{}.{}", a.as_str(), t.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for FeatureTemplate {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, FormatError> {
        if s == "bias" {
            return Ok(FeatureTemplate { atoms: Vec::new() });
        }
        let mut atoms = Vec::new();
        for part in s.split('+') {
            let (a, t) = part.split_once('.').ok_or_else(|| {
                FormatError::new(format!("template atom '{part}' needs ADDRESS.attribute"))
            })?;
            let a = Address::parse(a)
                .ok_or_else(|| FormatError::new(format!("unknown address '{a}'")))?;
            let t = Attribute::parse(t)
                .ok_or_else(|| FormatError::new(format!("unknown attribute '{t}'")))?;
            atoms.push((a, t));
        }
        Ok(FeatureTemplate { atoms })
    }
}

/// The default template set.
pub const DEFAULT_TEMPLATES: &[&str] = &[
    "bias",
    "S0.form",
    "S0.pos",
    "S0.lemma",
    "N0.form",
    "N0.pos",
    "N0.lemma",
    "L0.form",
    "L0.pos",
    "L0.lemma",
    "S0.pos+N0.pos",
    "S0.pos+N0.form",
    "S0.form+N0.pos",
    "L1.pos+L0.pos",
    "S1.pos+S0.pos+N0.pos",
    "S0.label+N0.pos",
    "S0.gender+N0.gender",
    "S0.number+N0.number",
    "T0.form+L0.pos",
    "T0.arcs",
    "T0.pathlen",
    "A0.pos",
    "A0.form+A0.pos",
    "A0.pos+L0.pos",
    "A0.pos+L0.form",
    "A0.pos+S0.pos",
    "A0.pos+S1.pos",
    "A0.pos+T0.form",
];

pub fn default_templates() -> Vec<FeatureTemplate> {
    DEFAULT_TEMPLATES
        .iter()
        .map(|t| t.parse().expect("default templates parse"))
        .collect()
}

/// Per-lattice data shared by every state of a decode.
pub struct DecodeContext<'a> {
    pub lattice: &'a SentenceLattice,
    pub labels: &'a [String],
    token_surfaces: Vec<String>,
}

impl<'a> DecodeContext<'a> {
    pub fn new(lattice: &'a SentenceLattice, labels: &'a [String]) -> Self {
        let token_surfaces = (0..=lattice.token_count())
            .map(|t| {
                if t == 0 {
                    String::new()
                } else {
                    lattice.token_surface(t)
                }
            })
            .collect();
        DecodeContext {
            lattice,
            labels,
            token_surfaces,
        }
    }

    fn surface(&self, token: usize) -> &str {
        self.token_surfaces.get(token).map_or(NULL, String::as_str)
    }
}

fn arcs_bucket(n: usize) -> &'static str {
    match n {
        0 => "0",
        1 => "1",
        2 => "2",
        3..=4 => "3-4",
        5..=8 => "5-8",
        _ => "9+",
    }
}

/// Where an address points.
enum Target<'s> {
    Null,
    Root,
    /// A path node with its arc.
    Node(usize, &'s LatticeArc),
    /// A candidate arc not yet on the path.
    Arc(&'s LatticeArc),
    Token(usize),
}

fn resolve<'s>(
    ctx: &'s DecodeContext<'_>,
    state: &JointState,
    candidate: Option<&'s LatticeArc>,
    address: Address,
) -> Target<'s> {
    let node = |n: Option<usize>| match n {
        None => Target::Null,
        Some(0) => Target::Root,
        Some(n) => match state.arc_of(n) {
            Some(a) => Target::Node(n, ctx.lattice.arc(a)),
            None => Target::Null,
        },
    };
    let path = state.path();
    match address {
        Address::S0 => node(state.stack_item(0)),
        Address::S1 => node(state.stack_item(1)),
        Address::N0 => node(state.queue_front()),
        Address::L0 => node(Some(path.len()).filter(|&n| n > 0)),
        Address::L1 => node(path.len().checked_sub(1).filter(|&n| n > 0)),
        Address::T0 => {
            let token = state
                .queue_front()
                .and_then(|n| state.arc_of(n))
                .map(|a| ctx.lattice.arc(a).token)
                .or_else(|| ctx.lattice.token_at(state.cursor()))
                .or_else(|| path.last().map(|&a| ctx.lattice.arc(a).token));
            token.map_or(Target::Null, Target::Token)
        }
        Address::A0 => candidate.map_or(Target::Null, Target::Arc),
    }
}

fn write_value(
    out: &mut String,
    ctx: &DecodeContext<'_>,
    state: &JointState,
    target: &Target<'_>,
    attribute: Attribute,
) {
    let arc_value = |a: &LatticeArc| -> Option<String> {
        let f = &a.features;
        Some(match attribute {
            Attribute::Form => a.form.clone(),
            Attribute::Pos => a.pos.clone(),
            Attribute::Lemma => a.lemma.clone(),
            Attribute::Gender => f.gender?.as_str().to_string(),
            Attribute::Number => f.number?.as_str().to_string(),
            Attribute::Person => f.person?.as_str().to_string(),
            Attribute::Tense => f.tense?.as_str().to_string(),
            _ => return None,
        })
    };
    let value: Option<String> = match (target, attribute) {
        (Target::Null, _) => None,
        (_, Attribute::PathLen) => Some(state.path().len().to_string()),
        (_, Attribute::Arcs) => {
            Some(arcs_bucket(ctx.lattice.outgoing(state.cursor()).count()).to_string())
        }
        (Target::Root, Attribute::Form | Attribute::Pos | Attribute::Lemma) => Some("ROOT".into()),
        (Target::Root, _) => None,
        (Target::Node(n, _), Attribute::Label) => {
            state.head(*n).map(|(_, l)| ctx.labels[l].clone())
        }
        (Target::Node(_, a), _) | (Target::Arc(a), _) => arc_value(a),
        (Target::Token(t), Attribute::Form) => Some(ctx.surface(*t).to_string()),
        (Target::Token(_), _) => None,
    };
    out.push_str(value.as_deref().unwrap_or(NULL));
}

/// The action part of a feature: kind plus label, or `SELECT:<pos>`.
pub fn action_string(ctx: &DecodeContext<'_>, t: Transition) -> String {
    match t {
        Transition::Select(a) => format!("SELECT:{}", ctx.lattice.arc(a).pos),
        Transition::LeftArc(l) | Transition::RightArc(l) => {
            format!("{}:{}", t.kind(), ctx.labels[l])
        }
        other => other.kind().to_string(),
    }
}

fn hash_str(s: &str) -> u64 {
    xxh3_64_with_seed(s.as_bytes(), HASH_SEED)
}

fn combine(context: u64, action: u64) -> u64 {
    let mut buf = [0u8; 16];
    buf[..8].copy_from_slice(&context.to_le_bytes());
    buf[8..].copy_from_slice(&action.to_le_bytes());
    xxh3_64_with_seed(&buf, HASH_SEED)
}

/// Extracts and hashes template features.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureExtractor {
    templates: Vec<FeatureTemplate>,
    names: Vec<String>,
}

/// Hashed template contexts of one state. Templates that mention `A0` are
/// hashed here with `A0` undefined and recomputed per SELECT.
pub struct StateContexts {
    hashes: Vec<u64>,
}

impl FeatureExtractor {
    pub fn new(templates: Vec<FeatureTemplate>) -> Self {
        let names = templates.iter().map(|t| t.to_string()).collect();
        FeatureExtractor { templates, names }
    }

    pub fn templates(&self) -> &[FeatureTemplate] {
        &self.templates
    }

    /// `name=v1+v2`, the context half of a feature string.
    fn context_string(
        &self,
        ctx: &DecodeContext<'_>,
        state: &JointState,
        candidate: Option<&LatticeArc>,
        i: usize,
    ) -> String {
        let mut s = String::with_capacity(32);
        s.push_str(&self.names[i]);
        s.push('=');
        for (k, &(address, attribute)) in self.templates[i].atoms.iter().enumerate() {
            if k > 0 {
                s.push('+');
            }
            let target = resolve(ctx, state, candidate, address);
            write_value(&mut s, ctx, state, &target, attribute);
        }
        s
    }

    pub fn state_contexts(&self, ctx: &DecodeContext<'_>, state: &JointState) -> StateContexts {
        StateContexts {
            hashes: (0..self.templates.len())
                .map(|i| hash_str(&self.context_string(ctx, state, None, i)))
                .collect(),
        }
    }

    /// Appends the feature ids of `t` in `state` to `out`.
    pub fn feature_ids(
        &self,
        ctx: &DecodeContext<'_>,
        state: &JointState,
        contexts: &StateContexts,
        t: Transition,
        out: &mut Vec<u64>,
    ) {
        let action = hash_str(&action_string(ctx, t));
        let candidate = match t {
            Transition::Select(a) => Some(ctx.lattice.arc(a)),
            _ => None,
        };
        for (i, template) in self.templates.iter().enumerate() {
            let context = match candidate {
                Some(arc) if template.uses_candidate() => {
                    hash_str(&self.context_string(ctx, state, Some(arc), i))
                }
                _ => contexts.hashes[i],
            };
            out.push(combine(context, action));
        }
    }

    /// Readable features, e.g. `N0.pos=NULL|SELECT:DEF`, one per template.
    pub fn feature_strings(
        &self,
        ctx: &DecodeContext<'_>,
        state: &JointState,
        t: Transition,
    ) -> Vec<String> {
        let action = action_string(ctx, t);
        let candidate = match t {
            Transition::Select(a) => Some(ctx.lattice.arc(a)),
            _ => None,
        };
        (0..self.templates.len())
            .map(|i| format!("{}|{action}", self.context_string(ctx, state, candidate, i)))
            .collect()
    }

    /// Id of a feature string produced by [`FeatureExtractor::feature_strings`].
    pub fn id_of(feature: &str) -> u64 {
        let (context, action) = feature
            .rsplit_once('|')
            .expect("feature strings contain '|'");
        combine(hash_str(context), hash_str(action))
    }
}
