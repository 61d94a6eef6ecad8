//! Language-neutral domain types: feature bundles, tagsets, lattices, paths
//! and dependency trees.

mod features;
mod lattice;
mod tagset;
mod tree;

pub use features::{Gender, MorphFeatures, Number, Person, Tense};
pub use lattice::{
    count_paths, enumerate_path_indices, enumerate_paths, validate_lattice, validate_lattice_tags,
    LatticeArc, MorphPath, SentenceLattice, ValidationReport, Violation, DEFAULT_PATH_CAP,
};
pub use tagset::{Tagset, DEFAULT_DEP_LABELS, DEFAULT_POS_TAGS, ROOT_LABEL};
pub(crate) use tagset::{TagsetConfig, HASH_SEED};
pub(crate) use tree::first_nonprojective_edge;
pub use tree::{check_projective, DepEdge, DepTree};
