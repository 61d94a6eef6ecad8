//! Readers and writers for the tab-separated file formats.
//!
//! Every format groups sentences into blocks of lines, each block followed
//! by one empty line. Readers are strict: byte-order marks, carriage
//! returns, unterminated final sentences, and empty sentences are errors.

mod conll;
mod lattice;
mod model;
mod tokens;

use std::fs;
use std::path::Path;

pub use conll::{read_conll, write_conll, ConllRow, ConllSentence};
pub use lattice::{lattice_path, read_lattice, write_lattice, write_path};
pub use model::{load_model, read_model, save_model, write_model};
pub use tokens::{read_segments, read_tokens, write_segments, write_tokens};

use crate::error::{Error, Result};
use crate::transition::GoldAnnotation;
use crate::types::SentenceLattice;

/// The null field value.
pub const NULL_FIELD: &str = "_";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits `text` into sentence blocks of `(1-based line number, line)`.
pub(crate) fn sentence_blocks(text: &str) -> Result<Vec<Vec<(usize, &str)>>> {
    if text.starts_with('\u{feff}') {
        return Err(parse_err(
            1,
            "byte-order mark found; save the file as UTF-8 without a BOM",
        ));
    }
    if let Some(pos) = text.find('\r') {
        let line = text[..pos].matches('\n').count() + 1;
        return Err(parse_err(
            line,
            "carriage return found; convert Windows (CRLF) line endings to Unix (LF)",
        ));
    }
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if !text.ends_with("\n\n") {
        let line = text.lines().count();
        return Err(parse_err(
            line,
            "last sentence is not terminated; the file must end with an empty line",
        ));
    }
    let mut blocks = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text[..text.len() - 1].split('\n').enumerate() {
        if line.is_empty() {
            if current.is_empty() {
                return Err(parse_err(i + 1, "empty sentence (consecutive blank lines)"));
            }
            blocks.push(std::mem::take(&mut current));
        } else {
            current.push((i + 1, line));
        }
    }
    Ok(blocks)
}

/// Pairs gold trees with gold morpheme paths, sentence by sentence.
pub fn read_gold(conll_text: &str, md_text: &str) -> Result<Vec<GoldAnnotation>> {
    let trees = read_conll(conll_text)?;
    let paths = read_lattice(md_text)?;
    if trees.len() != paths.len() {
        return Err(Error::Gold(format!(
            "{} trees but {} gold paths",
            trees.len(),
            paths.len()
        )));
    }
    trees
        .iter()
        .zip(&paths)
        .enumerate()
        .map(|(i, (t, p))| {
            lattice_path(p)
                .and_then(|path| t.gold(&path))
                .map_err(|e| Error::Gold(format!("sentence {}: {e}", i + 1)))
        })
        .collect()
}

/// Pairs gold annotations with their MA lattices. Every lattice must cover
/// as many tokens as its gold path.
pub fn read_corpus(
    conll_text: &str,
    md_text: &str,
    lattice_text: &str,
) -> Result<Vec<(SentenceLattice, GoldAnnotation)>> {
    let gold = read_gold(conll_text, md_text)?;
    let lattices = read_lattice(lattice_text)?;
    if gold.len() != lattices.len() {
        return Err(Error::Gold(format!(
            "{} gold sentences but {} lattices",
            gold.len(),
            lattices.len()
        )));
    }
    for (i, (l, g)) in lattices.iter().zip(&gold).enumerate() {
        let tokens = g.path.arcs.last().map_or(0, |a| a.token);
        if l.token_count() != tokens {
            return Err(Error::Gold(format!(
                "sentence {}: lattice has {} tokens, gold {tokens}",
                i + 1,
                l.token_count()
            )));
        }
    }
    Ok(lattices.into_iter().zip(gold).collect())
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub(crate) fn null_if_empty(s: &str) -> &str {
    if s.is_empty() {
        NULL_FIELD
    } else {
        s
    }
}

pub(crate) fn empty_if_null(s: &str) -> &str {
    if s == NULL_FIELD {
        ""
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks() {
        let b = sentence_blocks("a\nb\n\nc\n\n").unwrap();
        assert_eq!(b, vec![vec![(1, "a"), (2, "b")], vec![(4, "c")]]);
        assert!(sentence_blocks("").unwrap().is_empty());
    }

    #[test]
    fn strictness() {
        let msg = |t: &str| sentence_blocks(t).unwrap_err().to_string();
        assert!(msg("a\n").contains("empty line"));
        assert!(msg("a").contains("empty line"));
        assert!(msg("a\r\n\r\n").contains("CRLF"));
        assert!(msg("\u{feff}a\n\n").contains("BOM"));
        assert!(msg("a\n\n\nb\n\n").contains("line 3"));
        assert!(msg("\n").contains("empty line"));
    }
}
