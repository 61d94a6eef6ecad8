//! Ten-column CoNLL-X dependency files.

use std::fmt::Write;

use super::{empty_if_null, null_if_empty, parse_err, sentence_blocks, NULL_FIELD};
use crate::error::{Error, Result};
use crate::transition::GoldAnnotation;
use crate::types::{DepEdge, DepTree, MorphFeatures, MorphPath};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConllRow {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub cpostag: String,
    pub postag: String,
    pub feats: MorphFeatures,
    pub head: usize,
    pub deprel: String,
}

/// One tree. PHEAD and PDEPREL are not kept; they are written as `_`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConllSentence {
    pub rows: Vec<ConllRow>,
}

impl ConllSentence {
    /// Rows for a decoded path and its tree.
    pub fn from_parse(path: &MorphPath, tree: &DepTree) -> Result<Self> {
        if path.len() != tree.len() {
            return Err(Error::InvalidTree(format!(
                "tree has {} nodes, path {} morphemes",
                tree.len(),
                path.len()
            )));
        }
        let rows = path
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| ConllRow {
                id: i + 1,
                form: a.form.clone(),
                lemma: a.lemma.clone(),
                cpostag: a.pos.clone(),
                postag: a.pos.clone(),
                feats: a.features.clone(),
                head: tree.head(i + 1),
                deprel: tree.label(i + 1).to_string(),
            })
            .collect();
        Ok(ConllSentence { rows })
    }

    pub fn tree(&self) -> Result<DepTree> {
        let edges = self
            .rows
            .iter()
            .map(|r| DepEdge::new(r.head, r.id, r.deprel.clone()))
            .collect();
        DepTree::new(self.rows.len(), edges)
    }

    /// Pairs this tree with the gold path of the same sentence, checking
    /// that forms and tags agree row by row.
    pub fn gold(&self, path: &MorphPath) -> Result<GoldAnnotation> {
        if path.len() != self.rows.len() {
            return Err(Error::Gold(format!(
                "tree has {} rows, gold path {} morphemes",
                self.rows.len(),
                path.len()
            )));
        }
        for (r, a) in self.rows.iter().zip(&path.arcs) {
            if r.form != a.form || r.postag != a.pos {
                return Err(Error::Gold(format!(
                    "row {} is {}/{}, gold path has {}/{}",
                    r.id, r.form, r.postag, a.form, a.pos
                )));
            }
        }
        GoldAnnotation::new(path.clone(), self.tree()?)
    }
}

pub fn write_conll(sentences: &[ConllSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        for r in &s.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{NULL_FIELD}\t{NULL_FIELD}",
                r.id,
                r.form,
                null_if_empty(&r.lemma),
                r.cpostag,
                r.postag,
                r.feats,
                r.head,
                r.deprel
            );
        }
        out.push('\n');
    }
    out
}

fn parse_row(n: usize, line: &str, expected_id: usize) -> Result<ConllRow> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 10 {
        return Err(parse_err(
            n,
            format!("expected 10 tab-separated columns, found {}", cols.len()),
        ));
    }
    let id: usize = cols[0]
        .parse()
        .map_err(|_| parse_err(n, format!("ID '{}' is not an integer", cols[0])))?;
    if id != expected_id {
        return Err(parse_err(
            n,
            format!("ID {id} out of sequence, expected {expected_id}"),
        ));
    }
    let head: usize = cols[6]
        .parse()
        .map_err(|_| parse_err(n, format!("HEAD '{}' is not an integer", cols[6])))?;
    for (i, name) in [(1, "FORM"), (3, "CPOSTAG"), (4, "POSTAG"), (7, "DEPREL")] {
        if cols[i].is_empty() || cols[i] == NULL_FIELD {
            return Err(parse_err(n, format!("{name} is missing")));
        }
    }
    let feats = cols[5]
        .parse()
        .map_err(|e: crate::FormatError| parse_err(n, format!("FEATS: {e}")))?;
    Ok(ConllRow {
        id,
        form: cols[1].to_string(),
        lemma: empty_if_null(cols[2]).to_string(),
        cpostag: cols[3].to_string(),
        postag: cols[4].to_string(),
        feats,
        head,
        deprel: cols[7].to_string(),
    })
}

/// Parses CoNLL-X text, rejecting out-of-range or cyclic heads.
pub fn read_conll(text: &str) -> Result<Vec<ConllSentence>> {
    sentence_blocks(text)?
        .into_iter()
        .map(|block| {
            let first = block[0].0;
            let rows = block
                .iter()
                .enumerate()
                .map(|(i, (n, line))| parse_row(*n, line, i + 1))
                .collect::<Result<Vec<_>>>()?;
            let s = ConllSentence { rows };
            s.tree()
                .map_err(|e| parse_err(first, format!("sentence starting here: {e}")))?;
            Ok(s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{LatticeArc, MorphPath};

    #[test]
    fn single_morpheme() {
        let p = MorphPath::new(vec![LatticeArc::new(
            0,
            1,
            "x",
            "x",
            "NN",
            MorphFeatures::new(),
            1,
        )]);
        let t = DepTree::from_heads([(0, "ROOT")]).unwrap();
        let text = write_conll(&[ConllSentence::from_parse(&p, &t).unwrap()]);
        assert_eq!(text, "1\tx\tx\tNN\tNN\t_\t0\tROOT\t_\t_\n\n");
        let back = read_conll(&text).unwrap();
        assert_eq!(write_conll(&back), text);
        assert_eq!(back[0].tree().unwrap(), t);
    }

    #[test]
    fn bad_heads() {
        let cyc = "1\ta\ta\tNN\tNN\t_\t2\tx\t_\t_\n2\tb\tb\tNN\tNN\t_\t1\tx\t_\t_\n\n";
        assert!(read_conll(cyc).unwrap_err().to_string().contains("cycle"));
        let range = "1\ta\ta\tNN\tNN\t_\t5\tx\t_\t_\n\n";
        assert!(read_conll(range)
            .unwrap_err()
            .to_string()
            .contains("out of range"));
        let seq = "2\ta\ta\tNN\tNN\t_\t0\tx\t_\t_\n\n";
        assert!(read_conll(seq)
            .unwrap_err()
            .to_string()
            .contains("sequence"));
    }

    #[test]
    fn phead_is_ignored() {
        let text = "1\ta\t_\tNN\tNN\tgen=F\t0\tROOT\t0\tROOT\n\n";
        let s = read_conll(text).unwrap();
        assert_eq!(s[0].rows[0].lemma, "");
        assert_eq!(write_conll(&s), "1\ta\t_\tNN\tNN\tgen=F\t0\tROOT\t_\t_\n\n");
    }
}
