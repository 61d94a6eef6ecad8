//! The analyze-then-decode pipeline shared by the commands and the service.

use std::sync::{Arc, RwLock};

use morphosyn_core::io::{write_conll, write_lattice, write_path, ConllSentence};
use morphosyn_core::learn::{beam_decode, Model};
use morphosyn_core::lexicon::Analyzer;
use morphosyn_core::{MorphPath, Result, SentenceLattice};
use serde::Serialize;

/// Decodes one lattice. Returns the chosen path, and that path (lattice
/// format) and its tree (CoNLL-X) rendered with their blank-line terminators.
pub fn decode_layers(
    model: &Model,
    lattice: &SentenceLattice,
) -> Result<(MorphPath, String, String)> {
    let best = beam_decode(model, lattice, model.beam())?.swap_remove(0);
    let md = write_path(std::slice::from_ref(&best.path));
    let dep = write_conll(&[ConllSentence::from_parse(&best.path, &best.tree)?]);
    Ok((best.path, md, dep))
}

/// All three analysis layers of one sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseOutput {
    pub ma_lattice: String,
    pub md_lattice: String,
    pub dep_tree: String,
    /// 1-based indices of tokens analyzed by the OOV fallback.
    pub oov: Vec<usize>,
}

/// A read-only model plus a lexicon that can be swapped atomically.
pub struct Engine {
    analyzer: RwLock<Arc<Analyzer>>,
    model: Model,
}

impl Engine {
    /// Fails if the model was trained under a different tagset.
    pub fn new(analyzer: Analyzer, model: Model) -> Result<Self> {
        model.check_tagset(analyzer.tagset())?;
        Ok(Engine {
            analyzer: RwLock::new(Arc::new(analyzer)),
            model,
        })
    }

    /// The toy lexicon and model shipped with the crate.
    pub fn bundled() -> Result<Self> {
        Engine::new(
            morphosyn_core::toy::analyzer()?,
            morphosyn_core::toy::model()?,
        )
    }

    /// The current lexicon snapshot.
    pub fn analyzer(&self) -> Arc<Analyzer> {
        self.analyzer
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// The MA lattice in file format and the OOV token indices.
    pub fn lattice(&self, tokens: &[String]) -> Result<(String, Vec<usize>)> {
        let s = self.analyzer().build_lattice(tokens)?;
        Ok((
            write_lattice(std::slice::from_ref(&s.lattice)),
            s.oov_tokens,
        ))
    }

    pub fn parse(&self, tokens: &[String]) -> Result<ParseOutput> {
        let s = self.analyzer().build_lattice(tokens)?;
        let (_, md_lattice, dep_tree) = decode_layers(&self.model, &s.lattice)?;
        Ok(ParseOutput {
            ma_lattice: write_lattice(std::slice::from_ref(&s.lattice)),
            md_lattice,
            dep_tree,
            oov: s.oov_tokens,
        })
    }

    /// Adds lexicon lines all-or-nothing and swaps the new lexicon in.
    /// Requests already holding the old snapshot finish on it.
    pub fn add_lexicon(&self, lines: &[String]) -> Result<usize> {
        let mut slot = self.analyzer.write().unwrap_or_else(|e| e.into_inner());
        let (next, added) = slot.with_entries(lines)?;
        *slot = Arc::new(next);
        Ok(added)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(String::from).collect()
    }

    #[test]
    fn md_rows_come_from_the_lattice() {
        let e = Engine::bundled().unwrap();
        let out = e.parse(&toks("hbn /snm b.sl")).unwrap();
        assert!(out.oov.is_empty());
        let ma: Vec<&str> = out.ma_lattice.lines().collect();
        assert_eq!(ma.len(), 28);
        assert!(out.md_lattice.lines().all(|l| ma.contains(&l)));
        assert!(out.dep_tree.ends_with("\n\n"));
    }

    #[test]
    fn lexicon_swap() {
        let e = Engine::bundled().unwrap();
        assert_eq!(e.lattice(&toks("lymph")).unwrap().1, vec![1]);
        let before = e.analyzer();
        assert_eq!(e.add_lexicon(&["lymph :NN-F-S: lymph".into()]).unwrap(), 1);
        assert_eq!(e.add_lexicon(&["lymph :NN-F-S: lymph".into()]).unwrap(), 0);
        assert!(e.lattice(&toks("lymph")).unwrap().1.is_empty());
        assert!(before.analyze_token("lymph").oov);
        assert!(e
            .add_lexicon(&["x :NN: x".into(), "broken".into()])
            .is_err());
        assert!(!e.analyzer().lexicon().contains("x"));
    }
}
