//! Averaged structured perceptron with early update.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::beam::{beam_decode_with, path_lattice, search, SearchOutcome};
use super::eval::{evaluate, EvalCounts, Metrics};
use super::features::{default_templates, DecodeContext, FeatureTemplate};
use super::model::{Model, DEFAULT_BEAM};
use crate::error::{Error, Result};
use crate::transition::{
    infuse_gold, oracle_sequence, projectivize, GoldAnnotation, JointState, Mode, Transition,
    TransitionSystem,
};
use crate::types::{MorphPath, SentenceLattice, Tagset, ROOT_LABEL};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub beam: usize,
    pub seed: u64,
    pub mode: Mode,
    pub templates: Vec<FeatureTemplate>,
    /// Stop after the first epoch without any update.
    pub stop_when_separated: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            beam: DEFAULT_BEAM,
            seed: 1,
            mode: Mode::Joint,
            templates: default_templates(),
            stop_when_separated: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub updates: usize,
    pub early_updates: usize,
    /// Training-set accuracy of the averaged weights after this epoch.
    pub metrics: Metrics,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochMetrics>,
    /// Sentences whose gold could not be replayed.
    pub skipped: usize,
    /// Sentences whose gold tree was made projective.
    pub projectivized: usize,
    /// Sentences whose lattice received gold arcs.
    pub infused: usize,
}

/// A training sentence ready for the perceptron.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub lattice: SentenceLattice,
    pub gold: GoldAnnotation,
    pub oracle: Vec<Transition>,
    pub infused: bool,
    pub lifted: bool,
}

/// Projectivizes the gold tree, infuses missing gold arcs, and computes the
/// oracle sequence. In dependency-only mode the lattice is replaced by the
/// gold path.
pub fn prepare_instance(
    system: &TransitionSystem,
    lattice: &SentenceLattice,
    gold: &GoldAnnotation,
) -> Result<Prepared> {
    let (tree, lifts) = if system.mode() == Mode::MorphOnly {
        (gold.tree.clone(), 0)
    } else {
        projectivize(&gold.tree)
    };
    let gold = GoldAnnotation::new(gold.path.clone(), tree)?;
    let (lattice, infused) = if system.mode() == Mode::DepOnly {
        (path_lattice(&gold.path), 0)
    } else {
        infuse_gold(lattice, &gold.path)?
    };
    let oracle = oracle_sequence(system, &gold, &lattice)?;
    Ok(Prepared {
        lattice,
        gold,
        oracle,
        infused: infused > 0,
        lifted: lifts > 0,
    })
}

/// The root label followed by every other label seen in `corpus`, in
/// tagset order, then unseen-in-tagset labels sorted.
pub fn observed_labels(
    corpus: &[(SentenceLattice, GoldAnnotation)],
    tagset: &Tagset,
) -> Vec<String> {
    let mut seen: Vec<String> = corpus
        .iter()
        .flat_map(|(_, g)| g.tree.edges().iter().map(|e| e.label.clone()))
        .collect();
    seen.sort();
    seen.dedup();
    let mut out = vec![ROOT_LABEL.to_string()];
    out.extend(
        tagset
            .dep_labels()
            .iter()
            .filter(|l| *l != ROOT_LABEL && seen.contains(l))
            .cloned(),
    );
    out.extend(
        seen.into_iter()
            .filter(|l| l != ROOT_LABEL && !tagset.contains_label(l)),
    );
    out
}

/// Feature counts along a transition sequence.
fn sequence_features(
    model: &Model,
    system: &TransitionSystem,
    lattice: &SentenceLattice,
    sequence: &[Transition],
    sign: f64,
    out: &mut BTreeMap<u64, f64>,
) {
    let ctx = DecodeContext::new(lattice, system.labels());
    let mut state = JointState::initial(lattice);
    let mut ids = Vec::new();
    for &t in sequence {
        let contexts = model.extractor().state_contexts(&ctx, &state);
        ids.clear();
        model
            .extractor()
            .feature_ids(&ctx, &state, &contexts, t, &mut ids);
        for &id in &ids {
            *out.entry(id).or_insert(0.0) += sign;
        }
        state.apply_unchecked(lattice, t, system.mode());
    }
}

/// One perceptron step on one sentence. Returns `None` when the model
/// already prefers gold, else whether the update was an early one.
pub(crate) fn perceptron_step(
    model: &mut Model,
    system: &TransitionSystem,
    instance: &Prepared,
    k: usize,
) -> Option<bool> {
    let gold = &instance.oracle;
    let (predicted, early) = match search(model, system, &instance.lattice, k, Some(gold)) {
        SearchOutcome::FellOff(best) => (best.history().to_vec(), true),
        SearchOutcome::Complete(done) => {
            let best = done
                .into_iter()
                .next()
                .expect("searches finish with a derivation");
            if best.state.history() == gold.as_slice() {
                return None;
            }
            (best.state.history().to_vec(), false)
        }
    };
    let prefix = if early {
        &gold[..predicted.len()]
    } else {
        &gold[..]
    };
    let mut deltas = BTreeMap::new();
    sequence_features(model, system, &instance.lattice, prefix, 1.0, &mut deltas);
    sequence_features(
        model,
        system,
        &instance.lattice,
        &predicted,
        -1.0,
        &mut deltas,
    );
    model.update(&deltas);
    Some(early)
}

fn corpus_counts(
    model: &Model,
    system: &TransitionSystem,
    data: &[Prepared],
) -> Result<EvalCounts> {
    let mut counts = EvalCounts::default();
    for p in data {
        let best = beam_decode_with(model, system, &p.lattice, model.beam())?;
        let d = &best[0];
        counts += evaluate((&d.path, &d.tree), &p.gold)?;
    }
    Ok(counts)
}

/// Trains a model on `(lattice, gold)` pairs. Sentences whose gold cannot be
/// replayed are skipped with a warning. Returns the finalized model.
pub fn train(
    corpus: &[(SentenceLattice, GoldAnnotation)],
    config: &TrainConfig,
    tagset: &Tagset,
) -> Result<(Model, TrainReport)> {
    train_with(corpus, config, tagset, |_, _| Ok(()))
}

/// Like [`train`], calling `on_epoch` after every epoch with that epoch's
/// metrics and the averaged model at that point.
pub fn train_with(
    corpus: &[(SentenceLattice, GoldAnnotation)],
    config: &TrainConfig,
    tagset: &Tagset,
    mut on_epoch: impl FnMut(&EpochMetrics, &Model) -> Result<()>,
) -> Result<(Model, TrainReport)> {
    if config.beam == 0 {
        return Err(Error::Config("beam width must be at least 1".into()));
    }
    let labels = observed_labels(corpus, tagset);
    let mut model = Model::new(config.templates.clone(), labels, config.mode, tagset)?;
    model.set_beam(config.beam)?;
    let system = model.system();

    let mut report = TrainReport::default();
    let mut data = Vec::with_capacity(corpus.len());
    for (i, (lattice, gold)) in corpus.iter().enumerate() {
        match prepare_instance(&system, lattice, gold) {
            Ok(p) => {
                report.infused += p.infused as usize;
                report.projectivized += p.lifted as usize;
                data.push(p);
            }
            Err(e) => {
                log::warn!("skipping training sentence {}: {e}", i + 1);
                report.skipped += 1;
            }
        }
    }
    if data.is_empty() {
        return Err(Error::Gold("no replayable training sentences".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut updates = 0;
        let mut early_updates = 0;
        for &i in &order {
            if let Some(early) = perceptron_step(&mut model, &system, &data[i], config.beam) {
                updates += 1;
                early_updates += early as usize;
            }
            model.tick();
        }
        let averaged = model.averaged();
        let metrics = corpus_counts(&averaged, &system, &data)?.metrics();
        log::info!(
            "epoch {epoch}: {updates} updates ({early_updates} early), seg F1 {:.4}, LAS {:.4}",
            metrics.seg_f1,
            metrics.las
        );
        let e = EpochMetrics {
            epoch,
            updates,
            early_updates,
            metrics,
        };
        on_epoch(&e, &averaged)?;
        report.epochs.push(e);
        if updates == 0 && config.stop_when_separated {
            break;
        }
    }
    model.finalize();
    model
        .meta
        .insert("epochs".into(), report.epochs.len().to_string());
    model.meta.insert("seed".into(), config.seed.to_string());
    model
        .meta
        .insert("sentences".into(), data.len().to_string());
    Ok((model, report))
}

/// Decodes every gold path's tokens with `model` and scores the result.
pub fn evaluate_corpus(
    model: &Model,
    corpus: &[(SentenceLattice, GoldAnnotation)],
) -> Result<EvalCounts> {
    let system = model.system();
    let mut counts = EvalCounts::default();
    for (lattice, gold) in corpus {
        let lattice = if model.mode() == Mode::DepOnly {
            path_lattice(&gold.path)
        } else {
            lattice.clone()
        };
        let best = beam_decode_with(model, &system, &lattice, model.beam())?;
        counts += evaluate((&best[0].path, &best[0].tree), gold)?;
    }
    Ok(counts)
}

/// MD-only decoding followed by dependency-only decoding of its path.
pub fn run_pipeline(
    md: &Model,
    dep: &Model,
    lattice: &SentenceLattice,
) -> Result<(MorphPath, crate::types::DepTree)> {
    let path = super::beam::run_md_only(md, lattice)?;
    let tree = super::beam::run_dep_only(dep, &path)?;
    Ok((path, tree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::beam::{beam_decode, replay_score};
    use crate::types::{DepTree, LatticeArc, MorphFeatures};

    fn arc(from: usize, to: usize, form: &str, pos: &str, token: usize) -> LatticeArc {
        LatticeArc::new(from, to, form, form, pos, MorphFeatures::new(), token)
    }

    fn ambiguous() -> (SentenceLattice, GoldAnnotation) {
        let l = SentenceLattice::from_arcs(vec![
            arc(0, 1, "b", "IN", 1),
            arc(0, 2, "bbyt", "NNP", 1),
            arc(1, 2, "byt", "NN", 1),
            arc(2, 3, "gdwl", "JJ", 2),
        ]);
        let path = MorphPath::new(vec![l.arc(0).clone(), l.arc(2).clone(), l.arc(3).clone()]);
        let tree = DepTree::from_heads([(0, "ROOT"), (1, "pobj"), (2, "amod")]).unwrap();
        (l, GoldAnnotation::new(path, tree).unwrap())
    }

    fn unambiguous() -> (SentenceLattice, GoldAnnotation) {
        let l = SentenceLattice::from_arcs(vec![arc(0, 1, "x", "NN", 1)]);
        let gold = GoldAnnotation::new(
            MorphPath::new(l.arcs().to_vec()),
            DepTree::from_heads([(0, "ROOT")]).unwrap(),
        )
        .unwrap();
        (l, gold)
    }

    #[test]
    fn unique_derivation_needs_no_updates() {
        // With only the root label, the single parse is the unique derivation.
        let (model, report) = train(
            &[unambiguous()],
            &TrainConfig::default(),
            &Tagset::default(),
        )
        .unwrap();
        assert_eq!(report.epochs.len(), 1);
        assert_eq!(report.epochs[0].updates, 0);
        assert!(model.sorted_weights().is_empty());
    }

    #[test]
    fn separable_sentence_learned_within_five_epochs() {
        let config = TrainConfig {
            epochs: 5,
            ..Default::default()
        };
        let (model, report) = train(&[ambiguous()], &config, &Tagset::default()).unwrap();
        let last = report.epochs.last().unwrap();
        assert_eq!(last.metrics.seg_f1, 1.0);
        assert_eq!(last.metrics.las, 1.0);
        let (l, gold) = ambiguous();
        let best = &beam_decode(&model, &l, 8).unwrap()[0];
        assert_eq!(best.path, gold.path);
        assert_eq!(best.tree, gold.tree);
    }

    #[test]
    fn training_is_deterministic() {
        let corpus = [ambiguous(), unambiguous()];
        let config = TrainConfig {
            epochs: 3,
            stop_when_separated: false,
            ..Default::default()
        };
        let (a, _) = train(&corpus, &config, &Tagset::default()).unwrap();
        let (b, _) = train(&corpus, &config, &Tagset::default()).unwrap();
        let bits = |m: &Model| -> Vec<(u64, u64)> {
            m.sorted_weights()
                .into_iter()
                .map(|(k, v)| (k, v.to_bits()))
                .collect()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn early_update_widens_the_gold_margin() {
        let (l, gold) = ambiguous();
        let corpus = [(l.clone(), gold.clone())];
        let labels = observed_labels(&corpus, &Tagset::default());
        let mut model =
            Model::new(default_templates(), labels, Mode::Joint, &Tagset::default()).unwrap();
        let system = model.system();
        let p = prepare_instance(&system, &l, &gold).unwrap();
        // Zero weights and K = 1: ties favour the smallest transition, which
        // leaves gold at some step.
        let SearchOutcome::FellOff(best) = search(&model, &system, &p.lattice, 1, Some(&p.oracle))
        else {
            panic!("gold should fall off a width-1 beam under zero weights");
        };
        let n = best.history().len();
        let margin = |m: &Model| {
            replay_score(m, &system, &p.lattice, &p.oracle[..n]).unwrap()
                - replay_score(m, &system, &p.lattice, best.history()).unwrap()
        };
        let before = margin(&model);
        assert_eq!(perceptron_step(&mut model, &system, &p, 1), Some(true));
        assert!(margin(&model) > before);
    }

    #[test]
    fn non_replayable_gold_is_skipped() {
        // Gold covers two tokens, the lattice only one.
        let (l, gold) = ambiguous();
        let bad = (unambiguous().0, gold.clone());
        let (_, report) = train(
            &[(l, gold), bad],
            &TrainConfig::default(),
            &Tagset::default(),
        )
        .unwrap();
        assert_eq!(report.skipped, 1);
    }
}
