//! Segmentation, tagging, and attachment metrics.

use std::collections::HashMap;
use std::ops::AddAssign;

use crate::error::{Error, Result};
use crate::transition::GoldAnnotation;
use crate::types::{DepTree, MorphPath};

/// Raw counts; add them up over a corpus, then call [`EvalCounts::metrics`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalCounts {
    pub predicted: usize,
    pub gold: usize,
    /// Segments present in both, matched by token, character span, and form.
    pub aligned: usize,
    pub pos_correct: usize,
    pub heads_correct: usize,
    pub labeled_correct: usize,
}

impl AddAssign for EvalCounts {
    fn add_assign(&mut self, o: Self) {
        self.predicted += o.predicted;
        self.gold += o.gold;
        self.aligned += o.aligned;
        self.pos_correct += o.pos_correct;
        self.heads_correct += o.heads_correct;
        self.labeled_correct += o.labeled_correct;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub seg_precision: f64,
    pub seg_recall: f64,
    pub seg_f1: f64,
    /// Over aligned segments.
    pub pos_accuracy: f64,
    /// Over gold segments; unaligned ones count as errors.
    pub las: f64,
    pub uas: f64,
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        1.0
    } else {
        n as f64 / d as f64
    }
}

impl EvalCounts {
    pub fn metrics(&self) -> Metrics {
        let p = ratio(self.aligned, self.predicted);
        let r = ratio(self.aligned, self.gold);
        let f1 = if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        };
        Metrics {
            seg_precision: p,
            seg_recall: r,
            seg_f1: f1,
            pos_accuracy: ratio(self.pos_correct, self.aligned),
            las: ratio(self.labeled_correct, self.gold),
            uas: ratio(self.heads_correct, self.gold),
        }
    }
}

/// `(token, start, end, form)` for each morpheme, with character offsets
/// into the concatenated forms of its token.
fn spans(path: &MorphPath) -> Vec<(usize, usize, usize, &str)> {
    let mut out = Vec::with_capacity(path.len());
    let mut token = 0;
    let mut offset = 0;
    for a in &path.arcs {
        if a.token != token {
            token = a.token;
            offset = 0;
        }
        let len = a.form.chars().count();
        out.push((a.token, offset, offset + len, a.form.as_str()));
        offset += len;
    }
    out
}

/// Compares a prediction with gold. Both must cover the same tokens.
pub fn evaluate(pred: (&MorphPath, &DepTree), gold: &GoldAnnotation) -> Result<EvalCounts> {
    let (pp, pt) = pred;
    let tokens = |p: &MorphPath| p.arcs.last().map_or(0, |a| a.token);
    if tokens(pp) != tokens(&gold.path) {
        return Err(Error::Evaluation(format!(
            "prediction covers {} tokens, gold {}",
            tokens(pp),
            tokens(&gold.path)
        )));
    }
    let ps = spans(pp);
    let gs = spans(&gold.path);
    let index: HashMap<_, usize> = ps.iter().enumerate().map(|(i, s)| (*s, i + 1)).collect();
    // gold node -> predicted node; the root maps to the root.
    let mut map = vec![None; gs.len() + 1];
    map[0] = Some(0);
    for (i, s) in gs.iter().enumerate() {
        map[i + 1] = index.get(s).copied();
    }
    let mut c = EvalCounts {
        predicted: ps.len(),
        gold: gs.len(),
        ..Default::default()
    };
    for g in 1..=gs.len() {
        let Some(p) = map[g] else { continue };
        c.aligned += 1;
        if pp.arcs[p - 1].pos == gold.path.arcs[g - 1].pos {
            c.pos_correct += 1;
        }
        if map[gold.tree.head(g)] == Some(pt.head(p)) {
            c.heads_correct += 1;
            if pt.label(p) == gold.tree.label(g) {
                c.labeled_correct += 1;
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{LatticeArc, MorphFeatures};

    fn path(segs: &[(&str, &str, usize)]) -> MorphPath {
        MorphPath::new(
            segs.iter()
                .enumerate()
                .map(|(i, (f, p, t))| {
                    LatticeArc::new(i, i + 1, *f, *f, *p, MorphFeatures::new(), *t)
                })
                .collect(),
        )
    }

    #[test]
    fn identical_is_perfect() {
        let p = path(&[("b", "IN", 1), ("byt", "NN", 1), ("gdwl", "JJ", 2)]);
        let t = DepTree::from_heads([(0, "ROOT"), (1, "pobj"), (2, "amod")]).unwrap();
        let g = GoldAnnotation::new(p.clone(), t.clone()).unwrap();
        let m = evaluate((&p, &t), &g).unwrap().metrics();
        assert_eq!(
            (m.seg_f1, m.pos_accuracy, m.las, m.uas),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn one_wrong_label() {
        let p = path(&[
            ("a", "NN", 1),
            ("b", "VB", 2),
            ("c", "NN", 3),
            ("d", "JJ", 4),
        ]);
        let gold =
            DepTree::from_heads([(2, "subj"), (0, "ROOT"), (2, "obj"), (3, "amod")]).unwrap();
        let pred = DepTree::from_heads([(2, "subj"), (0, "ROOT"), (2, "obj"), (3, "det")]).unwrap();
        let m = evaluate((&p, &pred), &GoldAnnotation::new(p.clone(), gold).unwrap())
            .unwrap()
            .metrics();
        assert_eq!(m.las, 0.75);
        assert_eq!(m.uas, 1.0);
    }

    #[test]
    fn segmentation_mismatch() {
        // Gold splits token 1 into b+byt; the prediction keeps bbyt whole.
        // Spans: gold (1,0,1,b) (1,1,4,byt) (2,0,4,gdwl); predicted
        // (1,0,4,bbyt) (2,0,4,gdwl). One shared span: P = 1/2, R = 1/3.
        let gp = path(&[("b", "IN", 1), ("byt", "NN", 1), ("gdwl", "JJ", 2)]);
        let gt = DepTree::from_heads([(0, "ROOT"), (1, "pobj"), (2, "amod")]).unwrap();
        let pp = path(&[("bbyt", "NNP", 1), ("gdwl", "JJ", 2)]);
        let pt = DepTree::from_heads([(0, "ROOT"), (1, "amod")]).unwrap();
        let c = evaluate((&pp, &pt), &GoldAnnotation::new(gp, gt).unwrap()).unwrap();
        assert_eq!((c.predicted, c.gold, c.aligned), (2, 3, 1));
        let m = c.metrics();
        approx::assert_relative_eq!(m.seg_precision, 0.5);
        approx::assert_relative_eq!(m.seg_recall, 1.0 / 3.0);
        approx::assert_relative_eq!(m.seg_f1, 0.4);
        // gdwl's gold head byt has no predicted counterpart.
        assert_eq!(m.uas, 0.0);
        assert_eq!(m.pos_accuracy, 1.0);
    }

    #[test]
    fn token_mismatch_is_an_error() {
        let a = path(&[("a", "NN", 1)]);
        let b = path(&[("a", "NN", 1), ("b", "NN", 2)]);
        let tb = DepTree::from_heads([(0, "ROOT"), (1, "obj")]).unwrap();
        let ta = DepTree::from_heads([(0, "ROOT")]).unwrap();
        assert!(evaluate((&a, &ta), &GoldAnnotation::new(b, tb).unwrap()).is_err());
    }
}
