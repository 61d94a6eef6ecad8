//! Command-line and HTTP front ends for the joint parser.

pub mod pipeline;
pub mod service;

pub use pipeline::{decode_layers, Engine, ParseOutput};
