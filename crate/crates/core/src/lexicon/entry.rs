//! Lexicon lines and the analyses they encode.
//!
//! A line is a token followed by one or more `group lemma` pairs, separated
//! by whitespace. A group is `prefix:host:suffix` (an extra leading and
//! trailing colon is also accepted), for example
//!
//! ```text
//! lymph :NN-F-S: lymph
//! b.sl b~PREPOSITION+h~DEF:.sl~NN-M-S: .sl :NN-M-S: b.sl
//! /snm :NN-F-S:S_PRN-M-P-3 /sn
//! ```
//!
//! Each morpheme spec is `[form~]POS-GENDER-NUMBER-PERSON-TENSE-EXTRA...`
//! with trailing positions optional and `_` (or nothing) for an unspecified
//! value. Prefix items are joined with `+` and must carry a form. The host
//! form defaults to the token with its overt prefix and suffix forms
//! stripped; a prefix whose form does not match the surface is covert. A
//! suffix without a form is folded into the host as `suf_gen`, `suf_num`,
//! and `suf_per`; a suffix with a form becomes its own morpheme.

use std::fmt;

use crate::error::{Error, Result};
use crate::types::{Gender, MorphFeatures, Number, Person, Tagset, Tense};

/// One morpheme of an analysis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment {
    pub form: String,
    pub pos: String,
    pub features: MorphFeatures,
    pub lemma: String,
}

impl Segment {
    pub fn new(
        form: impl Into<String>,
        pos: impl Into<String>,
        features: MorphFeatures,
        lemma: impl Into<String>,
    ) -> Self {
        Segment {
            form: form.into(),
            pos: pos.into(),
            features,
            lemma: lemma.into(),
        }
    }
}

/// One analysis of a token: prefixes, a host, and optionally a suffix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexiconAnalysis {
    segments: Vec<Segment>,
    host: usize,
}

impl LexiconAnalysis {
    pub fn new(segments: Vec<Segment>, host: usize) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Config(
                "an analysis needs at least one segment".into(),
            ));
        }
        if host >= segments.len() {
            return Err(Error::Config(format!(
                "host index {host} out of range for {} segments",
                segments.len()
            )));
        }
        if let Some(s) = segments.iter().find(|s| s.form.is_empty()) {
            return Err(Error::Config(format!(
                "segment with POS {} has an empty form",
                s.pos
            )));
        }
        Ok(LexiconAnalysis { segments, host })
    }

    /// A single-morpheme analysis.
    pub fn single(form: &str, pos: &str, features: MorphFeatures, lemma: &str) -> Self {
        LexiconAnalysis {
            segments: vec![Segment::new(form, pos, features, lemma)],
            host: 0,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn host_index(&self) -> usize {
        self.host
    }

    pub fn host(&self) -> &Segment {
        &self.segments[self.host]
    }

    pub fn lemma(&self) -> &str {
        &self.segments[self.host].lemma
    }

    /// Prepends prefix morphemes, keeping the host.
    pub fn with_prefixes(&self, prefixes: &[Segment]) -> Self {
        let mut segments = prefixes.to_vec();
        segments.extend(self.segments.iter().cloned());
        LexiconAnalysis {
            segments,
            host: self.host + prefixes.len(),
        }
    }
}

fn spec_string(pos: &str, f: &MorphFeatures) -> String {
    let mut slots: Vec<String> = vec![
        pos.to_string(),
        f.gender
            .map(|g| if g == Gender::FM { "MF" } else { g.as_str() }.to_string())
            .unwrap_or_default(),
        f.number.map(|n| n.as_str().to_string()).unwrap_or_default(),
        f.person.map(|p| p.as_str().to_string()).unwrap_or_default(),
        f.tense.map(|t| t.as_str().to_string()).unwrap_or_default(),
    ];
    for key in extra_keys() {
        match f.extra().get(&key) {
            Some(v) => slots.push(v.clone()),
            None => break,
        }
    }
    while slots.len() > 1 && slots.last().is_some_and(|s| s.is_empty()) {
        slots.pop();
    }
    slots
        .into_iter()
        .map(|s| if s.is_empty() { "_".to_string() } else { s })
        .collect::<Vec<_>>()
        .join("-")
}

fn extra_keys() -> impl Iterator<Item = String> {
    std::iter::once("binyan".to_string()).chain((6..).map(|i| format!("ext{i}")))
}

impl fmt::Display for LexiconAnalysis {
    /// Writes the analysis as a lexicon group with explicit forms, followed
    /// by a space and the lemma. Extra features not expressible positionally
    /// are dropped.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let item = |s: &Segment| format!("{}~{}", s.form, spec_string(&s.pos, &s.features));
        let prefix: Vec<String> = self.segments[..self.host].iter().map(item).collect();
        let host = &self.segments[self.host];
        let mut host_feats = host.features.clone();
        let merged = (
            host_feats.suffix_gender.take(),
            host_feats.suffix_number.take(),
            host_feats.suffix_person.take(),
        );
        let mut suffix: Vec<String> = self.segments[self.host + 1..].iter().map(item).collect();
        if merged != (None, None, None) {
            let mut sf = MorphFeatures::new();
            sf.gender = merged.0;
            sf.number = merged.1;
            sf.person = merged.2;
            suffix.insert(0, spec_string("S_PRN", &sf));
        }
        write!(
            f,
            "{}:{}~{}:{} {}",
            prefix.join("+"),
            host.form,
            spec_string(&host.pos, &host_feats),
            suffix.join("+"),
            host.lemma
        )
    }
}

struct Spec {
    form: Option<String>,
    pos: String,
    features: MorphFeatures,
}

/// Parses `[form~]POS-FEATS`. `column` is the 1-based column of `text`.
fn parse_spec(
    text: &str,
    column: usize,
    tagset: &Tagset,
    warnings: &mut Vec<String>,
) -> Result<Spec> {
    let err = |message: String| Error::Lexicon { column, message };
    let (form, spec) = match text.split_once('~') {
        Some((form, spec)) => {
            if form.is_empty() {
                return Err(err(format!("empty form in '{text}'")));
            }
            (Some(form.to_string()), spec)
        }
        None => (None, text),
    };
    let mut fields = spec.split('-');
    let pos = fields.next().unwrap_or_default();
    if pos.is_empty() || pos == "_" {
        return Err(err(format!("missing POS tag in '{text}'")));
    }
    if !tagset.contains_pos(pos) {
        if tagset.is_open() {
            warnings.push(format!("column {column}: unknown POS tag '{pos}'"));
        } else {
            return Err(err(format!("unknown POS tag '{pos}'")));
        }
    }
    let mut features = MorphFeatures::new();
    let mut extras = extra_keys();
    for (i, value) in fields.enumerate() {
        if value.is_empty() || value == "_" {
            if i >= 4 {
                extras.next();
            }
            continue;
        }
        let bad = || {
            err(format!(
                "bad value '{value}' at position {} of '{spec}'",
                i + 2
            ))
        };
        match i {
            0 => features.gender = Some(Gender::parse(value).ok_or_else(bad)?),
            1 => features.number = Some(Number::parse(value).ok_or_else(bad)?),
            2 => features.person = Some(Person::parse(value).ok_or_else(bad)?),
            3 => features.tense = Some(Tense::parse(value).ok_or_else(bad)?),
            _ => {
                let key = extras.next().expect("infinite key supply");
                features
                    .set_extra(key, value)
                    .map_err(|e| err(e.message().to_string()))?;
            }
        }
    }
    Ok(Spec {
        form,
        pos: pos.to_string(),
        features,
    })
}

fn parse_group(
    token: &str,
    group: &str,
    column: usize,
    lemma: &str,
    tagset: &Tagset,
    warnings: &mut Vec<String>,
) -> Result<LexiconAnalysis> {
    let err = |column: usize, message: String| Error::Lexicon { column, message };
    let parts: Vec<&str> = group.split(':').collect();
    let (prefix, host, suffix, offset) = match parts.as_slice() {
        [p, h, s] => (*p, *h, *s, 0),
        ["", p, h, s, ""] => (*p, *h, *s, 1),
        _ => {
            return Err(err(
                column,
                format!("expected prefix:host:suffix, found '{group}'"),
            ))
        }
    };
    let prefix_col = column + offset;
    let host_col = prefix_col + prefix.chars().count() + 1;
    let suffix_col = host_col + host.chars().count() + 1;

    let mut segments = Vec::new();
    let mut surface: &str = token;
    if !prefix.is_empty() {
        let mut col = prefix_col;
        for item in prefix.split('+') {
            let spec = parse_spec(item, col, tagset, warnings)?;
            let form = spec
                .form
                .ok_or_else(|| err(col, format!("prefix '{item}' needs a form (form~POS)")))?;
            if let Some(rest) = surface.strip_prefix(form.as_str()) {
                surface = rest;
            }
            segments.push(Segment::new(form.clone(), spec.pos, spec.features, form));
            col += item.chars().count() + 1;
        }
    }
    if host.is_empty() {
        return Err(err(host_col, "missing host spec".into()));
    }
    let host_spec = parse_spec(host, host_col, tagset, warnings)?;

    let mut suffix_segments = Vec::new();
    let mut host_features = host_spec.features;
    if !suffix.is_empty() {
        let mut col = suffix_col;
        for item in suffix.split('+') {
            let spec = parse_spec(item, col, tagset, warnings)?;
            match spec.form {
                Some(form) => {
                    suffix_segments.push(Segment::new(form.clone(), spec.pos, spec.features, form))
                }
                None => {
                    host_features.suffix_gender = spec.features.gender;
                    host_features.suffix_number = spec.features.number;
                    host_features.suffix_person = spec.features.person;
                }
            }
            col += item.chars().count() + 1;
        }
    }
    let host_form = match host_spec.form {
        Some(form) => form,
        None => {
            for s in suffix_segments.iter().rev() {
                if let Some(rest) = surface.strip_suffix(s.form.as_str()) {
                    surface = rest;
                }
            }
            if surface.is_empty() {
                return Err(err(
                    host_col,
                    "host form is empty after stripping prefixes and suffixes".into(),
                ));
            }
            surface.to_string()
        }
    };
    let host_index = segments.len();
    segments.push(Segment::new(host_form, host_spec.pos, host_features, lemma));
    segments.extend(suffix_segments);
    LexiconAnalysis::new(segments, host_index).map_err(|e| err(column, e.to_string()))
}

/// Parses a `+`-joined list of `form~SPEC` prefix items, as used in prefix
/// tables. Prefix lemmas equal their forms.
pub(crate) fn parse_prefix_items(
    text: &str,
    tagset: &Tagset,
    warnings: &mut Vec<String>,
) -> Result<Vec<Segment>> {
    let mut col = 1;
    let mut out = Vec::new();
    for item in text.split('+') {
        let spec = parse_spec(item, col, tagset, warnings)?;
        let form = spec.form.ok_or_else(|| Error::Lexicon {
            column: col,
            message: format!("prefix '{item}' needs a form (form~POS)"),
        })?;
        out.push(Segment::new(form.clone(), spec.pos, spec.features, form));
        col += item.chars().count() + 1;
    }
    Ok(out)
}

/// A parsed lexicon line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconLine {
    pub token: String,
    pub analyses: Vec<LexiconAnalysis>,
    /// Non-fatal problems, such as unknown tags under an open tagset.
    pub warnings: Vec<String>,
}

/// Parses one lexicon line. Errors carry the 1-based column of the
/// offending field.
pub fn parse_lexicon_line(line: &str, tagset: &Tagset) -> Result<LexiconLine> {
    // Whitespace-separated fields with their starting columns.
    let mut fields: Vec<(usize, &str)> = Vec::new();
    let mut start: Option<usize> = None;
    let mut col = 0;
    let mut byte_start = 0;
    for (byte, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some(c) = start.take() {
                fields.push((c, &line[byte_start..byte]));
            }
        } else if start.is_none() {
            start = Some(col);
            byte_start = byte;
        }
    }
    if let Some(c) = start {
        fields.push((c, &line[byte_start..]));
    }

    let Some(&(_, token)) = fields.first() else {
        return Err(Error::Lexicon {
            column: 1,
            message: "empty line".into(),
        });
    };
    let rest = &fields[1..];
    if rest.is_empty() {
        return Err(Error::Lexicon {
            column: col + 1,
            message: format!("token '{token}' has no analyses"),
        });
    }
    if !rest.len().is_multiple_of(2) {
        let (c, g) = rest[rest.len() - 1];
        return Err(Error::Lexicon {
            column: c,
            message: format!("analysis '{g}' is not followed by a lemma"),
        });
    }
    let mut warnings = Vec::new();
    let mut analyses: Vec<LexiconAnalysis> = Vec::new();
    for pair in rest.chunks(2) {
        let (gcol, group) = pair[0];
        let (lcol, lemma) = pair[1];
        if lemma.contains(':') {
            return Err(Error::Lexicon {
                column: lcol,
                message: format!("expected a lemma, found '{lemma}'"),
            });
        }
        let a = parse_group(token, group, gcol, lemma, tagset, &mut warnings)?;
        if !analyses.contains(&a) {
            analyses.push(a);
        }
    }
    Ok(LexiconLine {
        token: token.to_string(),
        analyses,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> LexiconLine {
        parse_lexicon_line(line, &Tagset::default()).unwrap()
    }

    #[test]
    fn lymph() {
        let l = parse("lymph :NN-F-S: lymph");
        assert_eq!(l.token, "lymph");
        assert_eq!(l.analyses.len(), 1);
        let a = &l.analyses[0];
        assert_eq!(a.segments().len(), 1);
        assert_eq!(a.host().form, "lymph");
        assert_eq!(a.host().pos, "NN");
        assert_eq!(a.host().features.to_string(), "gen=F|num=S");
        assert_eq!(a.lemma(), "lymph");
    }

    #[test]
    fn two_analyses_with_binyan() {
        let l = parse("''bd :VB-MF-S-1-FUTURE-NIFAL: n'bd :VB-MF-S-1-FUTURE-PIEL: 'ybd");
        assert_eq!(l.analyses.len(), 2);
        assert_eq!(l.analyses[0].lemma(), "n'bd");
        assert_eq!(l.analyses[1].lemma(), "'ybd");
        assert_eq!(
            l.analyses[0].host().features.to_string(),
            "gen=F,M|num=S|per=1|tense=FUTURE|binyan=NIFAL"
        );
        assert_eq!(l.analyses[0].host().form, "''bd");
    }

    #[test]
    fn empty_line_is_malformed() {
        assert!(matches!(
            parse_lexicon_line("", &Tagset::default()),
            Err(Error::Lexicon { column: 1, .. })
        ));
        assert!(parse_lexicon_line("   ", &Tagset::default()).is_err());
    }

    #[test]
    fn prefixes_and_covert_morphemes() {
        let l = parse("bbyt b~IN+h~DEF:NN-M-S: byt");
        let a = &l.analyses[0];
        let forms: Vec<&str> = a.segments().iter().map(|s| s.form.as_str()).collect();
        assert_eq!(forms, ["b", "h", "byt"]);
        assert_eq!(a.host_index(), 2);
        assert_eq!(a.segments()[1].lemma, "h");
    }

    #[test]
    fn suffix_forms() {
        let merged = parse("/snm :NN-F-S:S_PRN-M-P-3 /sn");
        let a = &merged.analyses[0];
        assert_eq!(a.segments().len(), 1);
        assert_eq!(a.host().form, "/snm");
        assert_eq!(
            a.host().features.to_string(),
            "gen=F|num=S|suf_gen=M|suf_num=P|suf_per=3"
        );
        let split = parse("hbn h~DEF:b~IN:hn~S_PRN-F-P-3 b");
        let forms: Vec<&str> = split.analyses[0]
            .segments()
            .iter()
            .map(|s| s.form.as_str())
            .collect();
        assert_eq!(forms, ["h", "b", "hn"]);
        assert_eq!(split.analyses[0].host_index(), 1);
    }

    #[test]
    fn five_part_groups() {
        let a = parse("lymph ::NN-F-S:: lymph");
        let b = parse("lymph :NN-F-S: lymph");
        assert_eq!(a.analyses, b.analyses);
    }

    #[test]
    fn duplicates_collapse() {
        assert_eq!(parse("x :NN-F-S: x :NN-F-S: x").analyses.len(), 1);
    }

    #[test]
    fn error_columns() {
        let t = Tagset::default();
        match parse_lexicon_line("abc :NN-Q-S: abc", &t) {
            Err(Error::Lexicon { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        match parse_lexicon_line("abc :NN-F-S:", &t) {
            Err(Error::Lexicon { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match parse_lexicon_line("abc NN-F-S abc", &t) {
            Err(Error::Lexicon { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_tags_depend_on_openness() {
        let open = Tagset::default();
        let l = parse_lexicon_line("x :FOO: x", &open).unwrap();
        assert_eq!(l.warnings.len(), 1);
        let closed = Tagset::new(vec!["NN".into()], vec!["ROOT".into()], false).unwrap();
        assert!(parse_lexicon_line("x :FOO: x", &closed).is_err());
    }

    #[test]
    fn display_reparses() {
        for line in [
            "''bd :VB-MF-S-1-FUTURE-NIFAL: n'bd",
            "bbyt b~IN+h~DEF:NN-M-S: byt",
            "/snm :NN-F-S:S_PRN-M-P-3 /sn",
            "hbn h~DEF:b~IN:hn~S_PRN-F-P-3 b",
        ] {
            let l = parse(line);
            let token = &l.token;
            let again = parse(&format!("{token} {}", l.analyses[0]));
            assert_eq!(again.analyses, l.analyses, "{line}");
        }
    }
}
