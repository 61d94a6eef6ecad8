//! Gold annotations, their alignment to lattices, and the static oracle.

use std::collections::BTreeMap;

use super::{JointState, Mode, Transition, TransitionSystem};
use crate::error::{Error, Result};
use crate::types::{first_nonprojective_edge, DepTree, LatticeArc, MorphPath, SentenceLattice};

/// A node of the infused lattice: the original node and a sub-index for
/// nodes inserted after it.
type NodeKey = (usize, usize);

/// A gold path with a dependency tree over its morphemes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldAnnotation {
    pub path: MorphPath,
    pub tree: DepTree,
}

impl GoldAnnotation {
    pub fn new(path: MorphPath, tree: DepTree) -> Result<Self> {
        if tree.len() != path.len() {
            return Err(Error::Gold(format!(
                "tree has {} nodes but the path has {} morphemes",
                tree.len(),
                path.len()
            )));
        }
        Ok(GoldAnnotation { path, tree })
    }
}

/// Gold arcs grouped by token, checking that token indices run 1, 2, ...
fn gold_by_token(path: &MorphPath) -> Result<BTreeMap<usize, Vec<&LatticeArc>>> {
    let mut by_token: BTreeMap<usize, Vec<&LatticeArc>> = BTreeMap::new();
    let mut last = 0;
    for a in &path.arcs {
        if a.token < last || a.token > last + 1 {
            return Err(Error::Gold(format!(
                "gold token index {} follows {last}",
                a.token
            )));
        }
        last = a.token;
        by_token.entry(a.token).or_default().push(a);
    }
    Ok(by_token)
}

fn match_token(
    lattice: &SentenceLattice,
    token: usize,
    node: usize,
    exit: usize,
    gold: &[&LatticeArc],
    out: &mut Vec<usize>,
) -> bool {
    let Some((first, rest)) = gold.split_first() else {
        return node == exit;
    };
    for i in lattice.outgoing(node) {
        let a = lattice.arc(i);
        if a.token == token && a.same_morpheme(first) && (a.to == exit) == rest.is_empty() {
            out.push(i);
            if match_token(lattice, token, a.to, exit, rest, out) {
                return true;
            }
            out.pop();
        }
    }
    false
}

/// Per-token alignment: `Ok(Some(indices))` for tokens whose gold morphemes
/// form a path through the token's sub-lattice, `Ok(None)` otherwise.
fn align_tokens(
    lattice: &SentenceLattice,
    path: &MorphPath,
) -> Result<Vec<(usize, Option<Vec<usize>>)>> {
    let by_token = gold_by_token(path)?;
    if by_token.len() != lattice.token_count() {
        return Err(Error::Gold(format!(
            "gold covers {} tokens but the lattice has {}",
            by_token.len(),
            lattice.token_count()
        )));
    }
    let mut out = Vec::new();
    for (&t, gold) in &by_token {
        let (entry, exit) = lattice
            .token_span(t)
            .ok_or_else(|| Error::Gold(format!("lattice has no token {t}")))?;
        let mut idx = Vec::new();
        let found = match_token(lattice, t, entry, exit, gold, &mut idx);
        out.push((t, found.then_some(idx)));
    }
    Ok(out)
}

/// Lattice arc indices of the gold path, matched by morpheme content token
/// by token.
pub fn align_gold(lattice: &SentenceLattice, path: &MorphPath) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (t, idx) in align_tokens(lattice, path)? {
        match idx {
            Some(idx) => out.extend(idx),
            None => {
                return Err(Error::Gold(format!(
                    "gold analysis of token {t} is not in the lattice"
                )))
            }
        }
    }
    Ok(out)
}

/// Adds the gold morphemes of every token whose gold analysis is missing
/// from the lattice, as a fresh chain from the token's entry to its exit.
/// Returns the new lattice and the number of tokens infused. Intended for
/// training only.
pub fn infuse_gold(
    lattice: &SentenceLattice,
    path: &MorphPath,
) -> Result<(SentenceLattice, usize)> {
    let aligned = align_tokens(lattice, path)?;
    let missing: Vec<usize> = aligned
        .iter()
        .filter(|(_, idx)| idx.is_none())
        .map(|(t, _)| *t)
        .collect();
    if missing.is_empty() {
        return Ok((lattice.clone(), 0));
    }
    let by_token = gold_by_token(path)?;
    // Nodes are keyed (original node, sub-index); new nodes of a token sort
    // right after its entry node, then everything is renumbered densely.
    let mut arcs: Vec<(LatticeArc, NodeKey, NodeKey)> = lattice
        .arcs()
        .iter()
        .map(|a| (a.clone(), (a.from, 0), (a.to, 0)))
        .collect();
    for &t in &missing {
        let (entry, exit) = lattice.token_span(t).expect("aligned tokens exist");
        let gold = &by_token[&t];
        for (k, g) in gold.iter().enumerate() {
            let from = if k == 0 { (entry, 0) } else { (entry, k) };
            let to = if k + 1 == gold.len() {
                (exit, 0)
            } else {
                (entry, k + 1)
            };
            arcs.push(((*g).clone(), from, to));
        }
    }
    let mut keys: Vec<(usize, usize)> = arcs.iter().flat_map(|(_, f, t)| [*f, *t]).collect();
    keys.push((0, 0));
    keys.sort_unstable();
    keys.dedup();
    let renumber = |k: (usize, usize)| keys.binary_search(&k).expect("key collected");
    let arcs = arcs
        .into_iter()
        .map(|(mut a, f, t)| {
            a.from = renumber(f);
            a.to = renumber(t);
            a
        })
        .collect();
    Ok((
        SentenceLattice::new(lattice.tokens().to_vec(), arcs),
        missing.len(),
    ))
}

/// Lifts non-projective edges (reattaching the dependent to its
/// grandparent) until the tree is projective. Returns the number of lifts.
pub fn projectivize(tree: &DepTree) -> (DepTree, usize) {
    let mut t = tree.clone();
    let mut lifts = 0;
    while let Some(d) = first_nonprojective_edge(&t) {
        let h = t.head(d);
        t.set_head(d, t.head(h));
        lifts += 1;
    }
    (t, lifts)
}

/// The transition sequence deriving `gold` over `lattice`: forced SELECTs
/// of gold arcs interleaved with the static arc-eager oracle, which reduces
/// as soon as the stack top has its head and no gold dependents remain at
/// or after the queue front.
pub fn oracle_sequence(
    system: &TransitionSystem,
    gold: &GoldAnnotation,
    lattice: &SentenceLattice,
) -> Result<Vec<Transition>> {
    let arcs = align_gold(lattice, &gold.path)?;
    if system.mode() != Mode::MorphOnly && first_nonprojective_edge(&gold.tree).is_some() {
        return Err(Error::NonProjective);
    }
    let n = arcs.len();
    let label = std::iter::once(Ok(0))
        .chain((1..=n).map(|d| {
            system.label_index(gold.tree.label(d)).ok_or_else(|| {
                Error::Gold(format!(
                    "label '{}' is not in the label set",
                    gold.tree.label(d)
                ))
            })
        }))
        .collect::<Result<Vec<usize>>>()?;
    let heads = gold.tree.heads();
    let mode = system.mode();

    let mut state = JointState::initial(lattice);
    let mut out = Vec::new();
    while !system.is_terminal(&state, lattice) {
        let t = match state.queue_front() {
            None => Transition::Select(
                *arcs
                    .get(state.path().len())
                    .ok_or_else(|| Error::Gold("oracle ran past the gold path".into()))?,
            ),
            Some(f) => {
                let s = *state.stack().last().expect("stack holds the root");
                if s != 0 && heads[s] == f && state.head(s).is_none() {
                    Transition::LeftArc(label[s])
                } else if heads[f] == s {
                    Transition::RightArc(label[f])
                } else if s != 0 && state.head(s).is_some() && !(f..=n).any(|d| heads[d] == s) {
                    Transition::Reduce
                } else {
                    Transition::Shift
                }
            }
        };
        if let Some(reason) = system.violation(&state, lattice, t) {
            return Err(Error::IllegalTransition {
                transition: system.describe(t),
                reason: reason.into(),
            });
        }
        state.apply_unchecked(lattice, t, mode);
        out.push(t);
    }
    Ok(out)
}

/// Applies `sequence` from the initial state, checking legality.
pub fn replay(
    system: &TransitionSystem,
    lattice: &SentenceLattice,
    sequence: &[Transition],
) -> Result<JointState> {
    let mut state = JointState::initial(lattice);
    for &t in sequence {
        state = system.apply(&state, lattice, t)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{validate_lattice, MorphFeatures};

    fn labels() -> Vec<String> {
        ["ROOT", "subj", "obj", "det", "prepmod", "pobj"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    fn arc(from: usize, to: usize, form: &str, pos: &str, token: usize) -> LatticeArc {
        LatticeArc::new(from, to, form, form, pos, MorphFeatures::new(), token)
    }

    fn check_replay(lattice: &SentenceLattice, gold: &GoldAnnotation) -> Vec<Transition> {
        let sys = TransitionSystem::new(labels(), Mode::Joint).unwrap();
        let seq = oracle_sequence(&sys, gold, lattice).unwrap();
        let end = replay(&sys, lattice, &seq).unwrap();
        assert!(sys.is_terminal(&end, lattice));
        let (path, tree) = sys.finish(&end, lattice).unwrap();
        assert_eq!(path, gold.path);
        assert_eq!(tree, gold.tree);
        seq
    }

    #[test]
    fn one_morpheme() {
        let l = SentenceLattice::from_arcs(vec![arc(0, 1, "x", "NN", 1)]);
        let gold = GoldAnnotation::new(
            MorphPath::new(vec![l.arc(0).clone()]),
            DepTree::from_heads([(0, "ROOT")]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            check_replay(&l, &gold),
            [Transition::Select(0), Transition::RightArc(0)]
        );
    }

    #[test]
    fn chain_and_ambiguity() {
        // Token 1 is ambiguous between one and two morphemes.
        let l = SentenceLattice::from_arcs(vec![
            arc(0, 1, "b", "IN", 1),
            arc(0, 2, "bbyt", "NNP", 1),
            arc(1, 2, "byt", "NN", 1),
            arc(2, 3, "gdwl", "JJ", 2),
        ]);
        let path = MorphPath::new(vec![l.arc(0).clone(), l.arc(2).clone(), l.arc(3).clone()]);
        let tree = DepTree::from_heads([(0, "ROOT"), (1, "pobj"), (2, "det")]).unwrap();
        check_replay(&l, &GoldAnnotation::new(path, tree).unwrap());
        let path = MorphPath::new(vec![l.arc(1).clone(), l.arc(3).clone()]);
        let tree = DepTree::from_heads([(2, "subj"), (0, "ROOT")]).unwrap();
        check_replay(&l, &GoldAnnotation::new(path, tree).unwrap());
    }

    #[test]
    fn non_projective_gold_is_rejected() {
        let l = SentenceLattice::from_arcs(
            (0..4)
                .map(|i| arc(i, i + 1, &format!("w{i}"), "NN", i + 1))
                .collect(),
        );
        let path = MorphPath::new(l.arcs().to_vec());
        let tree = DepTree::from_heads([(2, "subj"), (0, "ROOT"), (1, "obj"), (2, "obj")]).unwrap();
        let gold = GoldAnnotation::new(path.clone(), tree.clone()).unwrap();
        let sys = TransitionSystem::new(labels(), Mode::Joint).unwrap();
        assert!(matches!(
            oracle_sequence(&sys, &gold, &l),
            Err(Error::NonProjective)
        ));
        let (fixed, lifts) = projectivize(&tree);
        assert!(lifts > 0);
        assert!(crate::types::check_projective(&fixed));
        check_replay(&l, &GoldAnnotation::new(path, fixed).unwrap());
    }

    #[test]
    fn missing_gold_is_infused() {
        let l = SentenceLattice::from_arcs(vec![
            arc(0, 1, "bbyt", "NNP", 1),
            arc(1, 2, "gdwl", "JJ", 2),
        ]);
        let path = MorphPath::new(vec![
            arc(0, 1, "b", "IN", 1),
            arc(1, 2, "h", "DEF", 1),
            arc(2, 3, "byt", "NN", 1),
            arc(3, 4, "gdwl", "JJ", 2),
        ]);
        assert!(matches!(align_gold(&l, &path), Err(Error::Gold(_))));
        let (infused, n) = infuse_gold(&l, &path).unwrap();
        assert_eq!(n, 1);
        assert!(validate_lattice(&infused).is_ok());
        assert_eq!(crate::types::count_paths(&infused), 2);
        let tree = DepTree::from_heads([(0, "ROOT"), (3, "det"), (1, "pobj"), (3, "det")]).unwrap();
        let seq = check_replay(&infused, &GoldAnnotation::new(path.clone(), tree).unwrap());
        assert!(!seq.is_empty());
        let (again, n) = infuse_gold(&infused, &path).unwrap();
        assert_eq!((again, n), (infused, 0));
    }

    #[test]
    fn tree_size_must_match_path() {
        let l = SentenceLattice::from_arcs(vec![arc(0, 1, "x", "NN", 1)]);
        let tree = DepTree::from_heads([(0, "ROOT"), (1, "obj")]).unwrap();
        assert!(GoldAnnotation::new(MorphPath::new(l.arcs().to_vec()), tree).is_err());
    }

    proptest::proptest! {
        #[test]
        fn replay_reproduces_random_gold(
            l in crate::transition::tests::arb_lattice(),
            path_pick in proptest::prelude::any::<proptest::sample::Index>(),
            head_picks in proptest::collection::vec(proptest::prelude::any::<proptest::sample::Index>(), 16),
            label_picks in proptest::collection::vec(0usize..6, 16),
        ) {
            let paths = crate::types::enumerate_paths(&l, 10_000).unwrap();
            let path = paths[path_pick.index(paths.len())].clone();
            let n = path.len();
            // Node d attaches to the root or any earlier node, then lifting
            // removes crossings.
            let heads: Vec<(usize, String)> = (1..=n)
                .map(|d| (head_picks[d % 16].index(d), labels()[label_picks[d % 16]].clone()))
                .collect();
            let (tree, _) = projectivize(&DepTree::from_heads(heads).unwrap());
            check_replay(&l, &GoldAnnotation::new(path, tree).unwrap());
        }
    }
}
