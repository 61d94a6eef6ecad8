//! Features, the linear model, beam search, training, and evaluation.

mod beam;
mod eval;
mod features;
mod model;
mod train;

pub use beam::{
    beam_decode, beam_decode_with, path_lattice, replay_score, run_dep_only, run_md_only,
    Derivation,
};
pub use eval::{evaluate, EvalCounts, Metrics};
pub use features::{
    action_string, default_templates, Address, Attribute, DecodeContext, FeatureExtractor,
    FeatureTemplate, StateContexts, DEFAULT_TEMPLATES, NULL,
};
pub use model::{Model, DEFAULT_BEAM, MODEL_VERSION};
pub use train::{
    evaluate_corpus, observed_labels, prepare_instance, run_pipeline, train, train_with,
    EpochMetrics, Prepared, TrainConfig, TrainReport,
};
