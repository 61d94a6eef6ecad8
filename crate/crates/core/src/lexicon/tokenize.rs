//! Pre-morphological tokenization of raw sentences.

const LEADING: &[char] = &['"', '(', '[', '{', '\u{201c}', '\u{201e}'];
const TRAILING: &[char] = &[
    '.', ',', ';', ':', '!', '?', ')', ']', '}', '"', '\u{201d}', '\u{2026}',
];

/// Splits a sentence on whitespace and separates leading and trailing
/// punctuation into their own tokens. A run of periods stays one token
/// (`...`). A double quote with word material on both sides is kept inside
/// the word, so acronyms written with a quote before the final letter
/// survive intact.
///
/// Transliterations often use `.` `/` `'` and `` ` `` as letters, so only
/// the characters above are split off, and a period is split only at the
/// end of a word.
pub fn tokenize_raw(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        split_word(word, &mut out);
    }
    out
}

fn split_word(word: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = word.chars().collect();
    let mut start = 0;
    while start < chars.len() && LEADING.contains(&chars[start]) {
        out.push(chars[start].to_string());
        start += 1;
    }
    let mut end = chars.len();
    let mut trailing: Vec<String> = Vec::new();
    while end > start && TRAILING.contains(&chars[end - 1]) {
        if chars[end - 1] == '.' {
            let mut dots = end - 1;
            while dots > start && chars[dots - 1] == '.' {
                dots -= 1;
            }
            trailing.push(chars[dots..end].iter().collect());
            end = dots;
        } else {
            trailing.push(chars[end - 1].to_string());
            end -= 1;
        }
    }
    if end > start {
        out.push(chars[start..end].iter().collect());
    }
    out.extend(trailing.into_iter().rev());
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize_raw(s)
    }

    #[test]
    fn trailing_period() {
        assert_eq!(toks("hlk lbyt."), ["hlk", "lbyt", "."]);
    }

    #[test]
    fn acronym_quote_kept() {
        assert_eq!(toks("b\"'rh"), ["b\"'rh"]);
        assert_eq!(toks("'rh\"b"), ["'rh\"b"]);
    }

    #[test]
    fn enclosing_quotes_split() {
        assert_eq!(toks("\"slwm\""), ["\"", "slwm", "\""]);
    }

    #[test]
    fn transliteration_letters_survive() {
        assert_eq!(toks("hbn /snm b.sl"), ["hbn", "/snm", "b.sl"]);
        assert_eq!(toks(".sl"), [".sl"]);
    }

    #[test]
    fn punctuation_runs() {
        assert_eq!(toks("mh?!"), ["mh", "?", "!"]);
        assert_eq!(toks("wkn..."), ["wkn", "..."]);
        assert_eq!(toks("(ktb),"), ["(", "ktb", ")", ","]);
        assert_eq!(toks("..."), ["..."]);
    }

    #[test]
    fn empty_input() {
        assert!(toks("").is_empty());
        assert!(toks("  \t ").is_empty());
    }

    proptest! {
        #[test]
        fn idempotent(s in "[a-z\\.\"\\(\\),!?/' ]{0,30}") {
            let once = tokenize_raw(&s);
            let twice = tokenize_raw(&once.join(" "));
            prop_assert_eq!(once, twice);
        }
    }
}
