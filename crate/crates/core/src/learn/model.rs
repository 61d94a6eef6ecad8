//! Hashed linear model with averaged-perceptron bookkeeping.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::features::{
    default_templates, DecodeContext, FeatureExtractor, FeatureTemplate, StateContexts,
};
use crate::error::{Error, Result};
use crate::transition::{JointState, Mode, Transition, TransitionSystem};
use crate::types::{Tagset, ROOT_LABEL};

pub const MODEL_VERSION: u32 = 1;
pub const DEFAULT_BEAM: usize = 8;

/// Templates, weights, label set, and decoding settings.
///
/// During training, [`Model::update`] keeps running totals so that
/// [`Model::finalize`] can replace each weight by its average over all
/// training steps. Finalizing twice is a no-op.
#[derive(Clone, Debug)]
pub struct Model {
    extractor: FeatureExtractor,
    weights: FxHashMap<u64, f64>,
    totals: FxHashMap<u64, f64>,
    stamps: FxHashMap<u64, u64>,
    clock: u64,
    finalized: bool,
    labels: Vec<String>,
    beam: usize,
    mode: Mode,
    tagset_hash: u64,
    /// Free-form `key value` metadata, such as the training configuration.
    pub meta: BTreeMap<String, String>,
}

impl Model {
    /// An empty model. `labels` must contain the root label.
    pub fn new(
        templates: Vec<FeatureTemplate>,
        labels: Vec<String>,
        mode: Mode,
        tagset: &Tagset,
    ) -> Result<Self> {
        if !labels.iter().any(|l| l == ROOT_LABEL) {
            return Err(Error::Model(format!("label set lacks '{ROOT_LABEL}'")));
        }
        Ok(Model {
            extractor: FeatureExtractor::new(templates),
            weights: FxHashMap::default(),
            totals: FxHashMap::default(),
            stamps: FxHashMap::default(),
            clock: 0,
            finalized: false,
            labels,
            beam: DEFAULT_BEAM,
            mode,
            tagset_hash: tagset.hash(),
            meta: BTreeMap::new(),
        })
    }

    /// An empty joint model with the default templates and the tagset's
    /// full label set.
    pub fn with_defaults(tagset: &Tagset) -> Self {
        Model::new(
            default_templates(),
            tagset.dep_labels().to_vec(),
            Mode::Joint,
            tagset,
        )
        .expect("tagsets always contain the root label")
    }

    /// A finalized model assembled from stored parts.
    pub(crate) fn from_parts(
        templates: Vec<FeatureTemplate>,
        labels: Vec<String>,
        mode: Mode,
        beam: usize,
        tagset_hash: u64,
        weights: FxHashMap<u64, f64>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if beam == 0 {
            return Err(Error::Model("beam width must be positive".into()));
        }
        if !labels.iter().any(|l| l == ROOT_LABEL) {
            return Err(Error::Model(format!("label set lacks '{ROOT_LABEL}'")));
        }
        Ok(Model {
            extractor: FeatureExtractor::new(templates),
            weights,
            totals: FxHashMap::default(),
            stamps: FxHashMap::default(),
            clock: 0,
            finalized: true,
            labels,
            beam,
            mode,
            tagset_hash,
            meta,
        })
    }

    pub fn templates(&self) -> &[FeatureTemplate] {
        self.extractor.templates()
    }

    pub fn extractor(&self) -> &FeatureExtractor {
        &self.extractor
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn beam(&self) -> usize {
        self.beam
    }

    pub fn set_beam(&mut self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::Config("beam width must be at least 1".into()));
        }
        self.beam = k;
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tagset_hash(&self) -> u64 {
        self.tagset_hash
    }

    /// Fails unless the model was trained under `tagset`.
    pub fn check_tagset(&self, tagset: &Tagset) -> Result<()> {
        if tagset.hash() != self.tagset_hash {
            return Err(Error::TagsetMismatch {
                expected: tagset.hash(),
                found: self.tagset_hash,
            });
        }
        Ok(())
    }

    pub fn is_finalized(&self) -> bool {
        self.finalized
    }

    pub fn system(&self) -> TransitionSystem {
        TransitionSystem::new(self.labels.clone(), self.mode)
            .expect("labels checked on construction")
    }

    pub fn weight(&self, id: u64) -> f64 {
        self.weights.get(&id).copied().unwrap_or(0.0)
    }

    /// Non-zero weights sorted by feature id.
    pub fn sorted_weights(&self) -> Vec<(u64, f64)> {
        let mut w: Vec<(u64, f64)> = self
            .weights
            .iter()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| (*k, *v))
            .collect();
        w.sort_unstable_by_key(|(k, _)| *k);
        w
    }

    pub fn set_weight(&mut self, id: u64, value: f64) {
        self.weights.insert(id, value);
    }

    pub(crate) fn score_with(
        &self,
        ctx: &DecodeContext<'_>,
        state: &JointState,
        contexts: &StateContexts,
        t: Transition,
        buf: &mut Vec<u64>,
    ) -> f64 {
        buf.clear();
        self.extractor.feature_ids(ctx, state, contexts, t, buf);
        buf.iter().map(|id| self.weight(*id)).sum()
    }

    /// Score of one transition: the sum of its fired feature weights.
    pub fn score(&self, ctx: &DecodeContext<'_>, state: &JointState, t: Transition) -> f64 {
        let contexts = self.extractor.state_contexts(ctx, state);
        self.score_with(ctx, state, &contexts, t, &mut Vec::new())
    }

    /// Marks the end of one training instance for averaging.
    pub(crate) fn tick(&mut self) {
        self.clock += 1;
    }

    /// Adds `delta` to each feature's weight, keeping averaging totals.
    pub(crate) fn update(&mut self, deltas: &BTreeMap<u64, f64>) {
        for (&id, &d) in deltas {
            if d == 0.0 {
                continue;
            }
            let w = self.weights.entry(id).or_insert(0.0);
            let stamp = self.stamps.entry(id).or_insert(0);
            *self.totals.entry(id).or_insert(0.0) += *w * (self.clock - *stamp) as f64;
            *stamp = self.clock;
            *w += d;
        }
    }

    /// A finalized copy holding averaged weights, leaving `self` trainable.
    pub fn averaged(&self) -> Model {
        let mut m = self.clone();
        m.finalize();
        m
    }

    /// Replaces weights by their averages. Idempotent.
    pub fn finalize(&mut self) {
        if self.finalized {
            return;
        }
        self.finalized = true;
        if self.clock == 0 {
            return;
        }
        let clock = self.clock;
        let mut ids: Vec<u64> = self.weights.keys().copied().collect();
        ids.sort_unstable();
        for id in ids {
            let w = self.weights[&id];
            let stamp = self.stamps.get(&id).copied().unwrap_or(0);
            let total = self.totals.get(&id).copied().unwrap_or(0.0) + w * (clock - stamp) as f64;
            self.weights.insert(id, total / clock as f64);
        }
        self.totals.clear();
        self.stamps.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{LatticeArc, MorphFeatures, SentenceLattice};

    fn model() -> Model {
        let tagset = Tagset::default();
        Model::new(
            default_templates(),
            vec!["ROOT".into()],
            Mode::Joint,
            &tagset,
        )
        .unwrap()
    }

    #[test]
    fn zero_model_scores_zero() {
        let l = SentenceLattice::from_arcs(vec![LatticeArc::new(
            0,
            1,
            "x",
            "x",
            "NN",
            MorphFeatures::new(),
            1,
        )]);
        let m = model();
        let labels = m.labels().to_vec();
        let ctx = DecodeContext::new(&l, &labels);
        assert_eq!(
            m.score(&ctx, &JointState::initial(&l), Transition::Select(0)),
            0.0
        );
    }

    #[test]
    fn single_weight_scores_one_transition() {
        let l = SentenceLattice::from_arcs(vec![
            LatticeArc::new(0, 1, "x", "x", "NN", MorphFeatures::new(), 1),
            LatticeArc::new(0, 1, "x", "x", "VB", MorphFeatures::new(), 1),
        ]);
        let mut m = model();
        let labels = m.labels().to_vec();
        let ctx = DecodeContext::new(&l, &labels);
        let s = JointState::initial(&l);
        let f = &m
            .extractor()
            .feature_strings(&ctx, &s, Transition::Select(0))[0];
        m.set_weight(FeatureExtractor::id_of(f), 1.0);
        assert_eq!(m.score(&ctx, &s, Transition::Select(0)), 1.0);
        assert_eq!(m.score(&ctx, &s, Transition::Select(1)), 0.0);
    }

    #[test]
    fn averaging() {
        let mut m = model();
        let mut d = BTreeMap::new();
        d.insert(7u64, 1.0);
        // Weights after each of four instances: 1, 3, 3, 3.
        m.update(&d);
        m.tick();
        d.insert(7, 2.0);
        m.update(&d);
        m.tick();
        m.tick();
        m.tick();
        let avg = m.averaged();
        approx::assert_relative_eq!(avg.weight(7), 10.0 / 4.0);
        let mut twice = avg.clone();
        twice.finalize();
        assert_eq!(twice.weight(7), avg.weight(7));
        assert_eq!(m.weight(7), 3.0);
    }
}
