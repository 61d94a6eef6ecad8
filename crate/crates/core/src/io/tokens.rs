//! One token (or segment) per line, a blank line after every sentence.

use super::{parse_err, sentence_blocks};
use crate::error::Result;
use crate::types::MorphPath;

fn read_blocks(text: &str) -> Result<Vec<Vec<String>>> {
    sentence_blocks(text)?
        .into_iter()
        .map(|block| {
            block
                .into_iter()
                .map(|(n, line)| {
                    if line.chars().any(char::is_whitespace) {
                        Err(parse_err(n, format!("token '{line}' contains whitespace")))
                    } else {
                        Ok(line.to_string())
                    }
                })
                .collect()
        })
        .collect()
}

fn write_blocks<'a, I, S>(sentences: I) -> String
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = &'a str>,
{
    let mut out = String::new();
    for s in sentences {
        for t in s {
            out.push_str(t);
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn read_tokens(text: &str) -> Result<Vec<Vec<String>>> {
    read_blocks(text)
}

pub fn write_tokens(sentences: &[Vec<String>]) -> String {
    write_blocks(sentences.iter().map(|s| s.iter().map(String::as_str)))
}

/// Segment forms of each path, one per line.
pub fn write_segments(paths: &[MorphPath]) -> String {
    write_blocks(paths.iter().map(|p| p.forms()))
}

pub fn read_segments(text: &str) -> Result<Vec<Vec<String>>> {
    read_blocks(text)
}
