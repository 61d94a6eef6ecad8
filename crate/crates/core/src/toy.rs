//! The bundled toy lexicon and treebank.

use crate::error::{Error, Result};
use crate::io::{read_gold, read_model, read_tokens};
use crate::learn::Model;
use crate::lexicon::{
    build_oov_table, Analyzer, AnalyzerConfig, Lexicon, DEFAULT_MAX_OOV, DEFAULT_RARE_THRESHOLD,
};
use crate::transition::GoldAnnotation;
use crate::types::SentenceLattice;

pub const LEXICON: &str = include_str!("../data/toy/lexicon.txt");
pub const ANALYZER_TOML: &str = include_str!("../data/toy/analyzer.toml");
pub const TRAIN_RAW: &str = include_str!("../data/toy/train.raw");
pub const TRAIN_MD: &str = include_str!("../data/toy/train.md");
pub const TRAIN_CONLL: &str = include_str!("../data/toy/train.conll");
/// The 27-row golden lattice of `hbn /snm b.sl`.
pub const GOLDEN_LATTICE: &str = include_str!("../data/toy/golden.lattice");

/// Joint model trained on the treebank (`cargo run --example train_toy`).
pub const DEFAULT_MODEL: &str = include_str!("../data/toy/joint.model");

pub fn model() -> Result<Model> {
    read_model(DEFAULT_MODEL)
}

/// Gold annotations of the toy treebank.
pub fn gold() -> Result<Vec<GoldAnnotation>> {
    read_gold(TRAIN_CONLL, TRAIN_MD)
}

/// Raw token sequences of the toy treebank.
pub fn sentences() -> Result<Vec<Vec<String>>> {
    read_tokens(TRAIN_RAW)
}

/// The toy analyzer, with an OOV table learned from the treebank.
pub fn analyzer() -> Result<Analyzer> {
    let (config, tagset) = AnalyzerConfig::from_toml(ANALYZER_TOML)?;
    let (lexicon, _) = Lexicon::parse(LEXICON, &tagset)?;
    let training: Vec<_> = sentences()?
        .into_iter()
        .zip(gold()?)
        .map(|(tokens, g)| (tokens, g.path))
        .collect();
    let oov = build_oov_table(&training, DEFAULT_RARE_THRESHOLD, DEFAULT_MAX_OOV);
    Analyzer::new(lexicon, oov, config, tagset)
}

/// Analyzer lattices paired with gold annotations.
pub fn corpus() -> Result<Vec<(SentenceLattice, GoldAnnotation)>> {
    let analyzer = analyzer()?;
    let sentences = sentences()?;
    let gold = gold()?;
    if sentences.len() != gold.len() {
        return Err(Error::Gold(format!(
            "{} raw sentences but {} gold trees",
            sentences.len(),
            gold.len()
        )));
    }
    sentences
        .iter()
        .zip(gold)
        .map(|(tokens, g)| Ok((analyzer.build_lattice(tokens)?.lattice, g)))
        .collect()
}
