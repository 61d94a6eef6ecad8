//! Step-synchronous beam search over joint derivations.

use std::cmp::Ordering;

use super::features::DecodeContext;
use super::model::Model;
use crate::error::{Error, Result};
use crate::transition::{JointState, Mode, Transition, TransitionSystem};
use crate::types::{DepTree, MorphPath, SentenceLattice};

/// A finished derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub path: MorphPath,
    pub tree: DepTree,
    pub score: f64,
    pub transitions: Vec<Transition>,
}

/// Best first: higher score, then lexicographically smaller history.
fn rank(a: &JointState, b: &JointState) -> Ordering {
    b.score()
        .total_cmp(&a.score())
        .then_with(|| a.history().cmp(b.history()))
}

pub(crate) struct Item {
    pub state: JointState,
    pub on_gold: bool,
}

pub(crate) enum SearchOutcome {
    /// The beam ran dry; completed items, best first.
    Complete(Vec<Item>),
    /// The gold derivation fell out of the beam; the best item at that step.
    FellOff(JointState),
}

struct Candidate {
    parent: usize,
    transition: Transition,
    score: f64,
}

/// Runs the beam. With `gold`, items on the gold derivation are tracked
/// and the search stops as soon as none survives a step.
pub(crate) fn search(
    model: &Model,
    system: &TransitionSystem,
    lattice: &SentenceLattice,
    k: usize,
    gold: Option<&[Transition]>,
) -> SearchOutcome {
    let labels = system.labels();
    let ctx = DecodeContext::new(lattice, labels);
    let mut beam = vec![Item {
        state: JointState::initial(lattice),
        on_gold: gold.is_some(),
    }];
    let mut done: Vec<Item> = Vec::new();
    if system.is_terminal(&beam[0].state, lattice) {
        return SearchOutcome::Complete(beam);
    }
    let mut step = 0;
    let mut buf = Vec::new();
    while !beam.is_empty() {
        let mut candidates = Vec::new();
        for (p, item) in beam.iter().enumerate() {
            let contexts = model.extractor().state_contexts(&ctx, &item.state);
            for t in system.legal_transitions(&item.state, lattice) {
                let delta = model.score_with(&ctx, &item.state, &contexts, t, &mut buf);
                candidates.push(Candidate {
                    parent: p,
                    transition: t,
                    score: item.state.score() + delta,
                });
            }
        }
        candidates.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| {
                    beam[a.parent]
                        .state
                        .history()
                        .cmp(beam[b.parent].state.history())
                })
                .then_with(|| a.transition.cmp(&b.transition))
        });
        candidates.truncate(k);
        let mut next = Vec::with_capacity(candidates.len());
        let mut gold_alive = false;
        for c in &candidates {
            let parent = &beam[c.parent];
            let mut state = parent.state.clone();
            state.apply_unchecked(lattice, c.transition, system.mode());
            state.set_score(c.score);
            let on_gold = parent.on_gold && gold.and_then(|g| g.get(step)) == Some(&c.transition);
            gold_alive |= on_gold;
            next.push(Item { state, on_gold });
        }
        let gold_pending = gold.is_some_and(|g| step < g.len()) && !done.iter().any(|i| i.on_gold);
        if gold_pending && !gold_alive {
            let best = next.into_iter().next().map(|i| i.state);
            return SearchOutcome::FellOff(best.expect("legal transitions exist for live items"));
        }
        beam.clear();
        for item in next {
            if system.is_terminal(&item.state, lattice) {
                done.push(item);
            } else {
                beam.push(item);
            }
        }
        done.sort_by(|a, b| rank(&a.state, &b.state));
        done.truncate(k);
        step += 1;
    }
    SearchOutcome::Complete(done)
}

/// Decodes `lattice` with beam width `k`, returning up to `k` finished
/// derivations, best first.
pub fn beam_decode_with(
    model: &Model,
    system: &TransitionSystem,
    lattice: &SentenceLattice,
    k: usize,
) -> Result<Vec<Derivation>> {
    if k == 0 {
        return Err(Error::Config("beam width must be at least 1".into()));
    }
    if lattice.is_empty() {
        return Err(Error::InvalidLattice(
            "cannot decode an empty lattice".into(),
        ));
    }
    let SearchOutcome::Complete(done) = search(model, system, lattice, k, None) else {
        unreachable!("searches without gold always complete");
    };
    if done.is_empty() {
        return Err(Error::InvalidLattice("no complete derivation".into()));
    }
    done.into_iter()
        .map(|item| {
            let (path, tree) = system.finish(&item.state, lattice)?;
            Ok(Derivation {
                path,
                tree,
                score: item.state.score(),
                transitions: item.state.history().to_vec(),
            })
        })
        .collect()
}

/// Decodes with the model's own transition system.
pub fn beam_decode(model: &Model, lattice: &SentenceLattice, k: usize) -> Result<Vec<Derivation>> {
    beam_decode_with(model, &model.system(), lattice, k)
}

/// The best path under an MD-only decode.
pub fn run_md_only(model: &Model, lattice: &SentenceLattice) -> Result<MorphPath> {
    let system = model.system().with_mode(Mode::MorphOnly);
    let best = beam_decode_with(model, &system, lattice, model.beam())?;
    Ok(best.into_iter().next().expect("non-empty").path)
}

/// A lattice whose only path is `path`, renumbered from node 0.
pub fn path_lattice(path: &MorphPath) -> SentenceLattice {
    let arcs = path
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let mut a = a.clone();
            a.from = i;
            a.to = i + 1;
            a
        })
        .collect();
    SentenceLattice::from_arcs(arcs)
}

/// The best tree over a fixed path.
pub fn run_dep_only(model: &Model, path: &MorphPath) -> Result<DepTree> {
    let system = model.system().with_mode(Mode::DepOnly);
    let lattice = path_lattice(path);
    let best = beam_decode_with(model, &system, &lattice, model.beam())?;
    Ok(best.into_iter().next().expect("non-empty").tree)
}

/// Sum of transition scores along `sequence`, in order.
pub fn replay_score(
    model: &Model,
    system: &TransitionSystem,
    lattice: &SentenceLattice,
    sequence: &[Transition],
) -> Result<f64> {
    let ctx = DecodeContext::new(lattice, system.labels());
    let mut state = JointState::initial(lattice);
    for &t in sequence {
        let delta = model.score(&ctx, &state, t);
        let mut next = system.apply(&state, lattice, t)?;
        next.add_score(delta);
        state = next;
    }
    Ok(state.score())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::features::{default_templates, FeatureExtractor};
    use crate::types::{LatticeArc, MorphFeatures, Tagset};

    fn arc(from: usize, to: usize, form: &str, pos: &str, token: usize) -> LatticeArc {
        LatticeArc::new(from, to, form, form, pos, MorphFeatures::new(), token)
    }

    fn model() -> Model {
        Model::new(
            default_templates(),
            vec!["ROOT".into(), "subj".into()],
            Mode::Joint,
            &Tagset::default(),
        )
        .unwrap()
    }

    #[test]
    fn unambiguous_single_morpheme() {
        let l = SentenceLattice::from_arcs(vec![arc(0, 1, "x", "NN", 1)]);
        for k in [1, 3, 8] {
            let d = beam_decode(&model(), &l, k).unwrap();
            assert_eq!(d[0].path.len(), 1);
            assert_eq!(d[0].tree.head(1), 0);
        }
        assert!(beam_decode(&model(), &l, 0).is_err());
    }

    #[test]
    fn md_only_on_unambiguous_lattice() {
        let l = SentenceLattice::from_arcs(vec![arc(0, 1, "x", "NN", 1), arc(1, 2, "y", "VB", 2)]);
        let p = run_md_only(&model(), &l).unwrap();
        assert_eq!(p.forms().collect::<Vec<_>>(), ["x", "y"]);
        let t = run_dep_only(&model(), &p).unwrap();
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn dep_only_single_morpheme_takes_argmax_label() {
        let l = SentenceLattice::from_arcs(vec![arc(0, 1, "x", "NN", 1)]);
        let mut m = model();
        let labels = m.labels().to_vec();
        let ctx = DecodeContext::new(&l, &labels);
        let sys = m.system();
        let s = sys
            .apply(&JointState::initial(&l), &l, Transition::Select(0))
            .unwrap();
        let f = &m
            .extractor()
            .feature_strings(&ctx, &s, Transition::RightArc(1))[0];
        m.set_weight(FeatureExtractor::id_of(f), 2.0);
        let t = run_dep_only(&m, &MorphPath::new(l.arcs().to_vec())).unwrap();
        assert_eq!((t.head(1), t.label(1)), (0, "subj"));
    }

    #[test]
    fn greedy_matches_k1() {
        let l = SentenceLattice::from_arcs(vec![
            arc(0, 1, "b", "IN", 1),
            arc(0, 2, "bbyt", "NNP", 1),
            arc(1, 2, "byt", "NN", 1),
            arc(2, 3, "gdwl", "JJ", 2),
        ]);
        let mut m = model();
        m.set_weight(FeatureExtractor::id_of("A0.pos=NNP|SELECT:NNP"), 1.0);
        m.set_weight(FeatureExtractor::id_of("S0.pos=ROOT|RIGHT_ARC:subj"), 0.5);
        m.set_weight(FeatureExtractor::id_of("N0.pos=JJ|LEFT_ARC:subj"), 0.25);
        let sys = m.system();
        let labels = m.labels().to_vec();
        let ctx = DecodeContext::new(&l, &labels);
        let mut s = JointState::initial(&l);
        while !sys.is_terminal(&s, &l) {
            let legal = sys.legal_transitions(&s, &l);
            let best = legal
                .iter()
                .copied()
                .max_by(|a, b| {
                    m.score(&ctx, &s, *a)
                        .total_cmp(&m.score(&ctx, &s, *b))
                        .then_with(|| b.cmp(a))
                })
                .unwrap();
            let delta = m.score(&ctx, &s, best);
            s = sys.apply(&s, &l, best).unwrap();
            s.add_score(delta);
        }
        let d = beam_decode(&m, &l, 1).unwrap();
        assert_eq!(d[0].transitions, s.history());
        assert_eq!(
            replay_score(&m, &sys, &l, &d[0].transitions).unwrap(),
            d[0].score
        );
    }
}
