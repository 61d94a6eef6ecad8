//! The morphological analyzer: lexicon, tokenizer, OOV templates, and
//! lattice construction.

mod analyzer;
mod entry;
mod oov;
mod tokenize;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

pub use analyzer::{
    layout_lattice, AnalyzedSentence, Analyzer, AnalyzerConfig, PrefixRule, TokenAnalyses,
};
pub use entry::{parse_lexicon_line, LexiconAnalysis, LexiconLine, Segment};
pub use oov::{build_oov_table, OovTable, OovTemplate, DEFAULT_MAX_OOV, DEFAULT_RARE_THRESHOLD};
pub use tokenize::tokenize_raw;

use crate::error::{Error, LineDiagnostic, Result};
use crate::types::Tagset;

/// Token-to-analyses map. Analyses keep file order; identical analyses
/// under one token are stored once.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, Vec<LexiconAnalysis>>,
    source_path: Option<PathBuf>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Parses lexicon text. Blank lines and lines starting with `#` are
    /// skipped. Returns the lexicon and any warnings.
    pub fn parse(text: &str, tagset: &Tagset) -> Result<(Self, Vec<String>)> {
        let mut lexicon = Lexicon::new();
        let mut warnings = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = parse_lexicon_line(line, tagset).map_err(|e| match e {
                Error::Lexicon { column, message } => Error::Parse {
                    line: i + 1,
                    message: format!("column {column}: {message}"),
                },
                other => other,
            })?;
            warnings.extend(
                parsed
                    .warnings
                    .iter()
                    .map(|w| format!("line {}: {w}", i + 1)),
            );
            lexicon.insert(parsed);
        }
        Ok((lexicon, warnings))
    }

    pub fn load(path: &Path, tagset: &Tagset) -> Result<(Self, Vec<String>)> {
        let text = fs::read_to_string(path)?;
        let (mut lexicon, warnings) = Lexicon::parse(&text, tagset)?;
        lexicon.source_path = Some(path.to_path_buf());
        Ok((lexicon, warnings))
    }

    pub fn source_path(&self) -> Option<&Path> {
        self.source_path.as_deref()
    }

    /// Merges one parsed line; returns how many analyses were new.
    fn insert(&mut self, line: LexiconLine) -> usize {
        let slot = self.entries.entry(line.token).or_default();
        let mut added = 0;
        for a in line.analyses {
            if !slot.contains(&a) {
                slot.push(a);
                added += 1;
            }
        }
        added
    }

    pub fn get(&self, token: &str) -> Option<&[LexiconAnalysis]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    /// Number of distinct tokens.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of stored analyses.
    pub fn analysis_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }
}

/// Returns a new lexicon with `lines` merged in, plus the number of new
/// analyses. Existing analyses are kept and duplicates dropped. If any line
/// fails to parse, nothing is merged and every bad line is reported.
pub fn add_lexicon_entries(
    lexicon: &Lexicon,
    lines: &[String],
    tagset: &Tagset,
) -> Result<(Lexicon, usize)> {
    let mut parsed = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        match parse_lexicon_line(line, tagset) {
            Ok(l) => parsed.push(l),
            Err(Error::Lexicon { column, message }) => diagnostics.push(LineDiagnostic {
                line: i + 1,
                column,
                message,
            }),
            Err(e) => diagnostics.push(LineDiagnostic {
                line: i + 1,
                column: 1,
                message: e.to_string(),
            }),
        }
    }
    if !diagnostics.is_empty() {
        return Err(Error::LexiconBatch(diagnostics));
    }
    let mut updated = lexicon.clone();
    let added = parsed.into_iter().map(|l| updated.insert(l)).sum();
    Ok((updated, added))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(text: &str) -> Lexicon {
        Lexicon::parse(text, &Tagset::default()).unwrap().0
    }

    #[test]
    fn comments_and_merging() {
        let l = lex("# comment\n\nx :NN-F-S: x\nx :VB-M-S-3-PAST: x\nx :NN-F-S: x\n");
        assert_eq!(l.len(), 1);
        assert_eq!(l.get("x").unwrap().len(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Lexicon::parse("x :NN: x\ny :NN-Q: y\n", &Tagset::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn add_entries() {
        let base = lex("x :NN-F-S: x\n");
        let (l, added) =
            add_lexicon_entries(&base, &["lymph :NN-F-S: lymph".into()], &Tagset::default())
                .unwrap();
        assert_eq!(added, 1);
        assert!(l.contains("lymph"));
        assert!(!base.contains("lymph"));
    }

    #[test]
    fn duplicate_add_is_a_no_op() {
        let base = lex("x :NN-F-S: x\n");
        let (l, added) =
            add_lexicon_entries(&base, &["x :NN-F-S: x".into()], &Tagset::default()).unwrap();
        assert_eq!(added, 0);
        assert_eq!(l, base);
    }

    #[test]
    fn batches_are_atomic() {
        let base = lex("x :NN-F-S: x\n");
        let lines = vec![
            "y :NN-F-S: y".to_string(),
            "z NN z".to_string(),
            "".to_string(),
        ];
        match add_lexicon_entries(&base, &lines, &Tagset::default()) {
            Err(Error::LexiconBatch(d)) => {
                assert_eq!(d.len(), 2);
                assert_eq!((d[0].line, d[0].column), (2, 3));
                assert_eq!(d[1].line, 3);
            }
            other => panic!("{other:?}"),
        }
    }
}
