//! Analyses proposed for out-of-vocabulary tokens, learned from the shapes
//! of rare tokens in training data.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{LexiconAnalysis, Segment};
use crate::error::{Error, Result};
use crate::types::{MorphFeatures, MorphPath};

pub const DEFAULT_RARE_THRESHOLD: usize = 2;
pub const DEFAULT_MAX_OOV: usize = 10;

/// POS tags treated as pronominal suffixes when locating the host of a gold
/// token.
const SUFFIX_TAGS: &[&str] = &["S_PRN"];

/// An analysis shape whose host form and lemma are filled in from the
/// unknown token's surface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OovTemplate {
    segments: Vec<Segment>,
    host: usize,
}

impl OovTemplate {
    fn from_segments(mut segments: Vec<Segment>, host: usize) -> Self {
        segments[host].form = "*".into();
        segments[host].lemma = "*".into();
        OovTemplate { segments, host }
    }

    /// A single-morpheme template.
    pub fn single(pos: &str, features: MorphFeatures) -> Self {
        OovTemplate::from_segments(vec![Segment::new("*", pos, features, "*")], 0)
    }

    pub fn instantiate(&self, surface: &str) -> LexiconAnalysis {
        let mut segments = self.segments.clone();
        segments[self.host].form = surface.to_string();
        segments[self.host].lemma = surface.to_string();
        LexiconAnalysis::new(segments, self.host).expect("templates are non-empty")
    }

    pub fn host_pos(&self) -> &str {
        &self.segments[self.host].pos
    }

    /// Canonical text: host index then one `form pos feats lemma` field per
    /// segment, tab separated. Used for ranking ties and for the table file.
    pub fn serialize(&self) -> String {
        let mut s = self.host.to_string();
        for seg in &self.segments {
            let _ = write!(
                s,
                "\t{} {} {} {}",
                seg.form, seg.pos, seg.features, seg.lemma
            );
        }
        s
    }

    fn deserialize(fields: &[&str]) -> std::result::Result<Self, String> {
        let (host, segs) = fields.split_first().ok_or("missing host index")?;
        let host: usize = host
            .parse()
            .map_err(|_| format!("bad host index '{host}'"))?;
        let mut segments = Vec::new();
        for f in segs {
            let parts: Vec<&str> = f.split(' ').collect();
            let [form, pos, feats, lemma] = parts.as_slice() else {
                return Err(format!("segment '{f}' needs form, pos, feats, lemma"));
            };
            let features = feats.parse::<MorphFeatures>().map_err(|e| e.to_string())?;
            segments.push(Segment::new(*form, *pos, features, *lemma));
        }
        if host >= segments.len() {
            return Err(format!("host index {host} out of range"));
        }
        Ok(OovTemplate::from_segments(segments, host))
    }
}

/// Ranked OOV templates, most frequent first; ties break on
/// [`OovTemplate::serialize`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OovTable {
    ranked: Vec<(OovTemplate, u64)>,
    pub rare_threshold: usize,
    pub max_oov: usize,
}

impl Default for OovTable {
    fn default() -> Self {
        OovTable {
            ranked: Vec::new(),
            rare_threshold: DEFAULT_RARE_THRESHOLD,
            max_oov: DEFAULT_MAX_OOV,
        }
    }
}

impl OovTable {
    pub fn new(mut ranked: Vec<(OovTemplate, u64)>, rare_threshold: usize, max_oov: usize) -> Self {
        ranked.sort_by(|(ta, fa), (tb, fb)| {
            fb.cmp(fa).then_with(|| ta.serialize().cmp(&tb.serialize()))
        });
        ranked.truncate(max_oov);
        OovTable {
            ranked,
            rare_threshold,
            max_oov,
        }
    }

    pub fn ranked(&self) -> &[(OovTemplate, u64)] {
        &self.ranked
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn instantiate(&self, surface: &str) -> Vec<LexiconAnalysis> {
        let mut out: Vec<LexiconAnalysis> = Vec::new();
        for (t, _) in &self.ranked {
            let a = t.instantiate(surface);
            if !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }

    /// One line per template: `frequency<TAB>serialized template`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, freq) in &self.ranked {
            let _ = writeln!(s, "{freq}\t{}", t.serialize());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut ranked = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let (freq, rest) = fields.split_first().expect("split yields one field");
            let freq: u64 = freq
                .parse()
                .map_err(|_| err(format!("bad frequency '{freq}'")))?;
            ranked.push((OovTemplate::deserialize(rest).map_err(err)?, freq));
        }
        let n = ranked.len().max(DEFAULT_MAX_OOV);
        Ok(OovTable::new(ranked, DEFAULT_RARE_THRESHOLD, n))
    }
}

/// Index of the host among one gold token's segments: the last segment that
/// is not a pronominal suffix.
fn gold_host(segments: &[Segment]) -> usize {
    segments
        .iter()
        .rposition(|s| !SUFFIX_TAGS.contains(&s.pos.as_str()))
        .unwrap_or(segments.len() - 1)
}

/// Collects the analysis shapes of tokens seen at most `rare_threshold`
/// times in `training`, ranks them by frequency, and keeps `max_oov`.
///
/// Each training item pairs the raw tokens with the gold path; arcs are
/// grouped by their token index.
pub fn build_oov_table(
    training: &[(Vec<String>, MorphPath)],
    rare_threshold: usize,
    max_oov: usize,
) -> OovTable {
    let mut token_counts: HashMap<&str, usize> = HashMap::new();
    for (tokens, _) in training {
        for t in tokens {
            *token_counts.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut shapes: HashMap<OovTemplate, u64> = HashMap::new();
    for (tokens, path) in training {
        for (i, surface) in tokens.iter().enumerate() {
            if token_counts[surface.as_str()] > rare_threshold {
                continue;
            }
            let segments: Vec<Segment> = path
                .arcs
                .iter()
                .filter(|a| a.token == i + 1)
                .map(|a| {
                    Segment::new(
                        a.form.clone(),
                        a.pos.clone(),
                        a.features.clone(),
                        a.lemma.clone(),
                    )
                })
                .collect();
            if segments.is_empty() {
                continue;
            }
            let host = gold_host(&segments);
            *shapes
                .entry(OovTemplate::from_segments(segments, host))
                .or_default() += 1;
        }
    }
    OovTable::new(shapes.into_iter().collect(), rare_threshold, max_oov)
}
