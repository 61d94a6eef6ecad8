//! Joint morphological disambiguation and dependency parsing for
//! morphologically rich languages.
//!
//! Raw tokens are expanded into a [`SentenceLattice`] of candidate morphemes
//! by the [`lexicon`] analyzer; the [`transition`] system interleaves lattice
//! arc selection with arc-eager dependency actions; [`learn`] scores those
//! actions with a hashed linear model, decodes with a beam, and trains with
//! an averaged structured perceptron; [`io`] reads and writes the tab
//! separated file formats.

pub mod error;
pub mod io;
pub mod learn;
pub mod lexicon;
pub mod toy;
pub mod transition;
pub mod types;

pub use error::{Error, FormatError, LineDiagnostic, Result};
pub use types::*;
