//! Retrains the bundled default model from the toy treebank.
//!
//!     cargo run -p morphosyn-core --example train_toy

use std::path::Path;

use morphosyn_core::io::save_model;
use morphosyn_core::learn::{train, TrainConfig};
use morphosyn_core::lexicon::AnalyzerConfig;
use morphosyn_core::toy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (_, tagset) = AnalyzerConfig::from_toml(toy::ANALYZER_TOML)?;
    let config = TrainConfig {
        epochs: 50,
        ..Default::default()
    };
    let (model, report) = train(&toy::corpus()?, &config, &tagset)?;
    for e in &report.epochs {
        println!(
            "{}\t{}\t{:.4}\t{:.4}",
            e.epoch, e.updates, e.metrics.seg_f1, e.metrics.las
        );
    }
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy/joint.model");
    save_model(&model, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
