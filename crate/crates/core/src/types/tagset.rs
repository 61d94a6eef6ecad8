use std::collections::HashSet;

use serde::Deserialize;
use xxhash_rust::xxh3::xxh3_64_with_seed;

use crate::error::{Error, Result};

/// Seed shared by every stable hash in the crate (tagset hashes, feature ids).
pub(crate) const HASH_SEED: u64 = 0x6d6f_7270_686f_7379;

/// Part-of-speech tags of the Hebrew SPMRL scheme.
pub const DEFAULT_POS_TAGS: &[&str] = &[
    "ADVERB",
    "AT",
    "BN",
    "BNT",
    "CC",
    "REL",
    "CD",
    "CDT",
    "CONJ",
    "COP",
    "DEF",
    "DTT",
    "DUMMY_AT",
    "EX",
    "IN",
    "INTJ",
    "JJ",
    "JJT",
    "MD",
    "NN",
    "NN_S_PP",
    "NNP",
    "NNT",
    "P",
    "POS",
    "PREPOSITION",
    "PRP",
    "S_PRP",
    "QW",
    "S_PRN",
    "TEMP",
    "VB",
    "yyCLN",
    "yyCM",
    "yyDASH",
    "yyDOT",
    "yyELPS",
    "yyEXCL",
    "yyLRB",
    "yyQM",
    "yyQUOT",
    "yyRRB",
    "yySCLN",
];

/// Dependency labels of the Unified-SD scheme used by the Hebrew treebank.
pub const DEFAULT_DEP_LABELS: &[&str] = &[
    "num",
    "subj",
    "ROOT",
    "prepmod",
    "pobj",
    "comp",
    "conj",
    "punct",
    "advcl",
    "advmod",
    "obj",
    "amod",
    "det",
    "def",
    "gobj",
    "possmod",
    "rcmod",
    "relcomp",
    "appos",
    "nn",
    "ccomp",
    "neg",
    "pcomp",
    "xcomp",
    "acc",
    "vmod",
    "gen",
    "number",
    "mwe",
    "goeswith",
    "cop",
    "cc",
    "npred",
    "parataxis",
    "npadvmod",
    "apred",
    "vocative",
    "aux",
    "ppred",
    "acomp",
    "qmark",
];

/// The label attached to dependents of the artificial root.
pub const ROOT_LABEL: &str = "ROOT";

/// The active POS and dependency-label inventories.
///
/// An open tagset accepts unknown POS tags in lexicon files with a warning;
/// a closed one rejects them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tagset {
    pos_tags: Vec<String>,
    dep_labels: Vec<String>,
    pos_index: HashSet<String>,
    open: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TagsetConfig {
    pub pos_tags: Option<Vec<String>>,
    pub dep_labels: Option<Vec<String>>,
    pub open: Option<bool>,
}

impl Default for Tagset {
    fn default() -> Self {
        Tagset::new(
            DEFAULT_POS_TAGS.iter().map(|s| s.to_string()).collect(),
            DEFAULT_DEP_LABELS.iter().map(|s| s.to_string()).collect(),
            true,
        )
        .expect("default tagset is valid")
    }
}

impl Tagset {
    pub fn new(pos_tags: Vec<String>, dep_labels: Vec<String>, open: bool) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &pos_tags {
            if t.is_empty() || t == "_" || t.contains(|c: char| c.is_whitespace() || c == '-') {
                return Err(Error::Config(format!("invalid POS tag '{t}'")));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::Config(format!("duplicate POS tag '{t}'")));
            }
        }
        let mut seen_labels = HashSet::new();
        for l in &dep_labels {
            if l.is_empty() || l == "_" || l.contains(char::is_whitespace) {
                return Err(Error::Config(format!("invalid dependency label '{l}'")));
            }
            if !seen_labels.insert(l) {
                return Err(Error::Config(format!("duplicate dependency label '{l}'")));
            }
        }
        if !dep_labels.iter().any(|l| l == ROOT_LABEL) {
            return Err(Error::Config(format!(
                "dependency labels must include '{ROOT_LABEL}'"
            )));
        }
        Ok(Tagset {
            pos_index: pos_tags.iter().cloned().collect(),
            pos_tags,
            dep_labels,
            open,
        })
    }

    pub(crate) fn from_config(config: TagsetConfig) -> Result<Self> {
        let default = Tagset::default();
        Tagset::new(
            config.pos_tags.unwrap_or(default.pos_tags),
            config.dep_labels.unwrap_or(default.dep_labels),
            config.open.unwrap_or(true),
        )
    }

    /// Reads a `[tagset]` table from TOML text. Missing keys fall back to
    /// the defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Wrapper {
            #[serde(default)]
            tagset: TagsetConfig,
        }
        let w: Wrapper = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Tagset::from_config(w.tagset)
    }

    pub fn pos_tags(&self) -> &[String] {
        &self.pos_tags
    }

    pub fn dep_labels(&self) -> &[String] {
        &self.dep_labels
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn contains_pos(&self, tag: &str) -> bool {
        self.pos_index.contains(tag)
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.dep_labels.iter().any(|l| l == label)
    }

    /// Stable 64-bit fingerprint of both inventories, in order.
    pub fn hash(&self) -> u64 {
        let mut buf = String::new();
        for t in &self.pos_tags {
            buf.push_str("pos\t");
            buf.push_str(t);
            buf.push('\n');
        }
        for l in &self.dep_labels {
            buf.push_str("dep\t");
            buf.push_str(l);
            buf.push('\n');
        }
        xxh3_64_with_seed(buf.as_bytes(), HASH_SEED)
    }
}
