//! Token analysis and lattice construction.

use std::collections::HashMap;

use serde::Deserialize;

use super::entry::parse_prefix_items;
use super::{add_lexicon_entries, tokenize_raw, Lexicon, LexiconAnalysis, OovTable, Segment};
use crate::error::{Error, Result};
use crate::types::{LatticeArc, MorphFeatures, SentenceLattice, Tagset, TagsetConfig};

/// A prefix string and the prefix-morpheme sequences it can stand for.
/// Each analysis is `+`-joined `form~SPEC` items, e.g. `b~PREPOSITION+h~DEF`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrefixRule {
    pub surface: String,
    pub analyses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzerConfig {
    /// Peel known prefixes off tokens missing from the lexicon and look up
    /// the remainder.
    pub compose_prefixes: bool,
    /// Maximum number of stacked prefix strings peeled from one token.
    pub max_prefix_depth: usize,
    pub prefixes: Vec<PrefixRule>,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig {
            compose_prefixes: true,
            max_prefix_depth: 4,
            prefixes: Vec::new(),
        }
    }
}

impl AnalyzerConfig {
    /// Reads an analyzer config file: top-level analyzer keys, `[[prefixes]]`
    /// entries, and an optional `[tagset]` table.
    pub fn from_toml(text: &str) -> Result<(AnalyzerConfig, Tagset)> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct File {
            #[serde(flatten)]
            analyzer: AnalyzerConfig,
            #[serde(default)]
            tagset: TagsetConfig,
        }
        let file: File = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok((file.analyzer, Tagset::from_config(file.tagset)?))
    }
}

/// The analyses proposed for one token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenAnalyses {
    pub analyses: Vec<LexiconAnalysis>,
    /// True when neither the lexicon nor prefix composition knew the token
    /// and the analyses come from OOV templates.
    pub oov: bool,
}

/// A sentence lattice plus the 1-based indices of OOV tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzedSentence {
    pub lattice: SentenceLattice,
    pub oov_tokens: Vec<usize>,
}

/// Lexicon, OOV table, prefix table, and tagset bundled for analysis.
/// Immutable; updates produce a new analyzer.
#[derive(Clone, Debug)]
pub struct Analyzer {
    lexicon: Lexicon,
    oov: OovTable,
    config: AnalyzerConfig,
    tagset: Tagset,
    prefix_rules: Vec<(String, Vec<Vec<Segment>>)>,
}

impl Analyzer {
    pub fn new(
        lexicon: Lexicon,
        oov: OovTable,
        config: AnalyzerConfig,
        tagset: Tagset,
    ) -> Result<Self> {
        let mut prefix_rules = Vec::new();
        let mut warnings = Vec::new();
        for rule in &config.prefixes {
            if rule.surface.is_empty() {
                return Err(Error::Config("prefix rule with an empty surface".into()));
            }
            let mut options = Vec::new();
            for a in &rule.analyses {
                let segs = parse_prefix_items(a, &tagset, &mut warnings)
                    .map_err(|e| Error::Config(format!("prefix '{}': {e}", rule.surface)))?;
                options.push(segs);
            }
            prefix_rules.push((rule.surface.clone(), options));
        }
        for w in warnings {
            log::warn!("prefix table: {w}");
        }
        Ok(Analyzer {
            lexicon,
            oov,
            config,
            tagset,
            prefix_rules,
        })
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn oov_table(&self) -> &OovTable {
        &self.oov
    }

    pub fn config(&self) -> &AnalyzerConfig {
        &self.config
    }

    pub fn tagset(&self) -> &Tagset {
        &self.tagset
    }

    /// A copy of this analyzer with `lines` merged into the lexicon, and the
    /// number of analyses added. Atomic: on any parse error nothing changes.
    pub fn with_entries(&self, lines: &[String]) -> Result<(Analyzer, usize)> {
        let (lexicon, added) = add_lexicon_entries(&self.lexicon, lines, &self.tagset)?;
        Ok((
            Analyzer {
                lexicon,
                ..self.clone()
            },
            added,
        ))
    }

    /// A copy with a different OOV table.
    pub fn with_oov(&self, oov: OovTable) -> Analyzer {
        Analyzer {
            oov,
            ..self.clone()
        }
    }

    /// Lexicon analyses in file order; on a miss, prefix composition if
    /// enabled; otherwise OOV templates in rank order, or a bare `NNP`
    /// analysis when the table is empty.
    pub fn analyze_token(&self, token: &str) -> TokenAnalyses {
        if let Some(a) = self.lexicon.get(token) {
            return TokenAnalyses {
                analyses: a.to_vec(),
                oov: false,
            };
        }
        if self.config.compose_prefixes {
            let composed = self.compose(token, 1);
            if !composed.is_empty() {
                return TokenAnalyses {
                    analyses: composed,
                    oov: false,
                };
            }
        }
        let mut analyses = self.oov.instantiate(token);
        if analyses.is_empty() {
            analyses.push(LexiconAnalysis::single(
                token,
                "NNP",
                MorphFeatures::new(),
                token,
            ));
        }
        TokenAnalyses {
            analyses,
            oov: true,
        }
    }

    fn compose(&self, token: &str, depth: usize) -> Vec<LexiconAnalysis> {
        let mut out: Vec<LexiconAnalysis> = Vec::new();
        if depth > self.config.max_prefix_depth {
            return out;
        }
        for (surface, options) in &self.prefix_rules {
            let Some(rest) = token.strip_prefix(surface.as_str()) else {
                continue;
            };
            if rest.is_empty() {
                continue;
            }
            let bases: Vec<LexiconAnalysis> = match self.lexicon.get(rest) {
                Some(a) => a.to_vec(),
                None => self.compose(rest, depth + 1),
            };
            for prefix in options {
                for base in &bases {
                    let a = base.with_prefixes(prefix);
                    if !out.contains(&a) {
                        out.push(a);
                    }
                }
            }
        }
        out
    }

    /// Analyzes every token and lays the analyses out as one lattice.
    pub fn build_lattice(&self, tokens: &[String]) -> Result<AnalyzedSentence> {
        if tokens.is_empty() {
            return Err(Error::InvalidLattice(
                "cannot analyze an empty sentence".into(),
            ));
        }
        if let Some(i) = tokens.iter().position(|t| t.is_empty()) {
            return Err(Error::InvalidLattice(format!("token {} is empty", i + 1)));
        }
        let mut per_token = Vec::with_capacity(tokens.len());
        let mut oov_tokens = Vec::new();
        for (i, t) in tokens.iter().enumerate() {
            let r = self.analyze_token(t);
            if r.oov {
                oov_tokens.push(i + 1);
            }
            per_token.push(r.analyses);
        }
        Ok(AnalyzedSentence {
            lattice: layout_lattice(tokens, &per_token),
            oov_tokens,
        })
    }

    /// Tokenizes raw text and builds its lattice.
    pub fn analyze_text(&self, text: &str) -> Result<AnalyzedSentence> {
        self.build_lattice(&tokenize_raw(text))
    }
}

/// Lays per-token analyses onto shared node indices.
///
/// Within a token, analyses are threaded through a prefix trie in order: a
/// non-final morpheme reuses an existing internal arc with the same content
/// from the same node, otherwise it gets a fresh internal node numbered
/// after the token's entry. Every final morpheme ends at the token's exit
/// node, numbered after all internal nodes. Identical arcs are emitted once.
/// The exit of one token is the entry of the next.
pub fn layout_lattice(tokens: &[String], per_token: &[Vec<LexiconAnalysis>]) -> SentenceLattice {
    const EXIT: usize = usize::MAX;
    let mut arcs = Vec::new();
    let mut entry = 0;
    for (t, analyses) in per_token.iter().enumerate() {
        let mut next_internal = entry + 1;
        let mut children: HashMap<(usize, &Segment), usize> = HashMap::new();
        let mut local: Vec<(usize, usize, &Segment)> = Vec::new();
        for a in analyses {
            let segs = a.segments();
            let mut node = entry;
            for (k, seg) in segs.iter().enumerate() {
                if k + 1 == segs.len() {
                    if !local.contains(&(node, EXIT, seg)) {
                        local.push((node, EXIT, seg));
                    }
                } else {
                    node = *children.entry((node, seg)).or_insert_with(|| {
                        let n = next_internal;
                        next_internal += 1;
                        local.push((node, n, seg));
                        n
                    });
                }
            }
        }
        let exit = next_internal;
        for (from, to, seg) in local {
            let to = if to == EXIT { exit } else { to };
            arcs.push(LatticeArc::new(
                from,
                to,
                seg.form.clone(),
                seg.lemma.clone(),
                seg.pos.clone(),
                seg.features.clone(),
                t + 1,
            ));
        }
        entry = exit;
    }
    SentenceLattice::new(tokens.to_vec(), arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{count_paths, enumerate_paths, validate_lattice, DEFAULT_PATH_CAP};

    const CONFIG: &str = r#"
compose_prefixes = true

[[prefixes]]
surface = "b"
analyses = ["b~PREPOSITION", "b~PREPOSITION+h~DEF"]

[[prefixes]]
surface = "h"
analyses = ["h~DEF"]
"#;

    fn analyzer(lexicon: &str) -> Analyzer {
        let (config, tagset) = AnalyzerConfig::from_toml(CONFIG).unwrap();
        let (lex, _) = Lexicon::parse(lexicon, &tagset).unwrap();
        Analyzer::new(lex, OovTable::default(), config, tagset).unwrap()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(String::from).collect()
    }

    #[test]
    fn single_unambiguous_token() {
        let a = analyzer("lymph :NN-F-S: lymph\n");
        let s = a.build_lattice(&toks("lymph")).unwrap();
        assert_eq!(count_paths(&s.lattice), 1);
        assert!(s.oov_tokens.is_empty());
    }

    #[test]
    fn product_rule() {
        let a = analyzer("x :NN-M-S: x :VB-M-S-3-PAST: x\ny :NN-F-S: y :JJ-F-S: y\n");
        let s = a.build_lattice(&toks("x y")).unwrap();
        assert!(validate_lattice(&s.lattice).is_ok());
        assert_eq!(count_paths(&s.lattice), 4);
        assert_eq!(
            enumerate_paths(&s.lattice, DEFAULT_PATH_CAP).unwrap().len(),
            4
        );
    }

    #[test]
    fn composed_prefixes_recover_covert_article() {
        let a = analyzer("byt :NN-M-S: byt\n");
        let r = a.analyze_token("bbyt");
        assert!(!r.oov);
        let shapes: Vec<Vec<(&str, &str)>> = r
            .analyses
            .iter()
            .map(|a| {
                a.segments()
                    .iter()
                    .map(|s| (s.form.as_str(), s.pos.as_str()))
                    .collect()
            })
            .collect();
        assert!(shapes.contains(&vec![("b", "PREPOSITION"), ("h", "DEF"), ("byt", "NN")]));
        assert!(shapes.contains(&vec![("b", "PREPOSITION"), ("byt", "NN")]));
    }

    #[test]
    fn stacked_prefixes() {
        let a = analyzer("byt :NN-M-S: byt\n");
        let r = a.analyze_token("hbbyt");
        assert!(!r.oov);
        assert!(r.analyses.iter().any(|a| a.segments().len() == 4));
    }

    #[test]
    fn composition_can_be_disabled() {
        let mut a = analyzer("byt :NN-M-S: byt\n");
        a.config.compose_prefixes = false;
        assert!(a.analyze_token("bbyt").oov);
    }

    #[test]
    fn empty_oov_table_yields_nnp() {
        let a = analyzer("");
        let r = a.analyze_token("zzz");
        assert!(r.oov);
        assert_eq!(r.analyses.len(), 1);
        assert_eq!(r.analyses[0].host().pos, "NNP");
    }

    #[test]
    fn lexicon_hit_beats_composition() {
        let a = analyzer("hqph :NN-F-S: hqph h~DEF:qph~NN-F-S: qph\nqph :VB-M-S-3-PAST: qph\n");
        let r = a.analyze_token("hqph");
        assert_eq!(r.analyses.len(), 2);
        assert_eq!(r.analyses[0].host().form, "hqph");
        assert_eq!(r.analyses[1].segments()[0].pos, "DEF");
    }

    #[test]
    fn trie_layout_shares_prefix_arcs() {
        let a = analyzer("b.sl b~PREPOSITION+h~DEF:.sl~NN-M-S: .sl b~PREPOSITION:.sl~NN-M-S: .sl :NN-M-S: b.sl\n");
        let s = a.build_lattice(&toks("b.sl")).unwrap();
        let rows: Vec<(usize, usize, &str)> = s
            .lattice
            .arcs()
            .iter()
            .map(|a| (a.from, a.to, a.form.as_str()))
            .collect();
        assert_eq!(
            rows,
            [
                (0, 1, "b"),
                (0, 3, "b.sl"),
                (1, 2, "h"),
                (1, 3, ".sl"),
                (2, 3, ".sl")
            ]
        );
    }

    #[test]
    fn empty_sentence_is_rejected() {
        assert!(analyzer("").build_lattice(&[]).is_err());
    }

    #[test]
    fn entries_are_atomic_and_clear_oov() {
        let a = analyzer("");
        assert!(a.analyze_token("lymph").oov);
        let (b, added) = a.with_entries(&["lymph :NN-F-S: lymph".into()]).unwrap();
        assert_eq!(added, 1);
        let r = b.analyze_token("lymph");
        assert!(!r.oov);
        assert_eq!(r.analyses[0].host().pos, "NN");
        assert!(a.analyze_token("lymph").oov);
        assert!(b
            .with_entries(&["ok :NN: ok".into(), "bad".into()])
            .is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(AnalyzerConfig::from_toml("bogus = 1\n").is_err());
        let (c, t) = AnalyzerConfig::from_toml("").unwrap();
        assert_eq!(c, AnalyzerConfig::default());
        assert_eq!(t, Tagset::default());
    }
}
