//! Plain-text model files. Fields are separated by single tabs:
//!
//! ```text
//! morphosyn-model 1
//! mode joint
//! beam 8
//! tagset <16 hex digits>
//! labels ROOT subj ...
//! template S0.form
//! meta <key> <value>
//! weights <count>
//! <16 hex digits> <weight>
//! ```
//!
//! Weights are written sorted by feature id in shortest round-trip form, so
//! saving the same model twice gives identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use rustc_hash::FxHashMap;

use super::{parse_err, read_file};
use crate::error::{Error, Result};
use crate::learn::{FeatureTemplate, Model, MODEL_VERSION};
use crate::transition::Mode;
use crate::types::Tagset;

const MAGIC: &str = "morphosyn-model";

/// Serializes a finalized copy of `model`.
pub fn write_model(model: &Model) -> String {
    let model = if model.is_finalized() {
        std::borrow::Cow::Borrowed(model)
    } else {
        std::borrow::Cow::Owned(model.averaged())
    };
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}\t{MODEL_VERSION}");
    let _ = writeln!(out, "mode\t{}", model.mode().as_str());
    let _ = writeln!(out, "beam\t{}", model.beam());
    let _ = writeln!(out, "tagset\t{:016x}", model.tagset_hash());
    let _ = writeln!(out, "labels\t{}", model.labels().join("\t"));
    for t in model.templates() {
        let _ = writeln!(out, "template\t{t}");
    }
    for (k, v) in &model.meta {
        let clean = |s: &str| s.replace(['\t', '\n', '\r'], " ");
        let _ = writeln!(out, "meta\t{}\t{}", clean(k), clean(v));
    }
    let weights = model.sorted_weights();
    let _ = writeln!(out, "weights\t{}", weights.len());
    for (id, w) in weights {
        let _ = writeln!(out, "{id:016x}\t{w:?}");
    }
    out
}

fn field<'a>(
    lines: &mut std::iter::Peekable<impl Iterator<Item = (usize, &'a str)>>,
    key: &str,
) -> Result<(usize, &'a str)> {
    let (n, line) = lines
        .next()
        .ok_or_else(|| Error::Model(format!("truncated header: missing '{key}'")))?;
    match line.split_once('\t') {
        Some((k, v)) if k == key => Ok((n, v)),
        _ => Err(parse_err(n, format!("expected '{key}' header line"))),
    }
}

/// Parses a model file without checking its tagset.
pub fn read_model(text: &str) -> Result<Model> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let version = match lines.next() {
        Some((_, l)) => l.strip_prefix(MAGIC).and_then(|r| r.strip_prefix('\t')),
        None => None,
    };
    let Some(version) = version else {
        return Err(Error::Model("not a model file (bad header)".into()));
    };
    if version != MODEL_VERSION.to_string() {
        return Err(Error::Model(format!(
            "unsupported model version '{version}', expected {MODEL_VERSION}"
        )));
    }
    let (n, mode) = field(&mut lines, "mode")?;
    let mode = Mode::parse(mode).ok_or_else(|| parse_err(n, format!("unknown mode '{mode}'")))?;
    let (n, beam) = field(&mut lines, "beam")?;
    let beam = beam
        .parse()
        .map_err(|_| parse_err(n, "beam is not an integer"))?;
    let (n, tagset) = field(&mut lines, "tagset")?;
    let tagset =
        u64::from_str_radix(tagset, 16).map_err(|_| parse_err(n, "tagset hash is not hex"))?;
    let (_, labels) = field(&mut lines, "labels")?;
    let labels: Vec<String> = labels.split('\t').map(str::to_string).collect();

    let mut templates = Vec::new();
    let mut meta = BTreeMap::new();
    let count = loop {
        let (n, line) = lines
            .next()
            .ok_or_else(|| Error::Model("truncated header: missing 'weights'".into()))?;
        let (key, rest) = line.split_once('\t').unwrap_or((line, ""));
        match key {
            "template" => templates.push(
                rest.parse::<FeatureTemplate>()
                    .map_err(|e| parse_err(n, e.to_string()))?,
            ),
            "meta" => {
                let (k, v) = rest
                    .split_once('\t')
                    .ok_or_else(|| parse_err(n, "meta needs a key and a value"))?;
                meta.insert(k.to_string(), v.to_string());
            }
            "weights" => {
                break rest
                    .parse::<usize>()
                    .map_err(|_| parse_err(n, "weight count is not an integer"))?
            }
            _ => return Err(parse_err(n, format!("unexpected header line '{key}'"))),
        }
    };
    let mut weights = FxHashMap::default();
    for (n, line) in lines {
        let (id, w) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(n, "expected '<id>\\t<weight>'"))?;
        let id = u64::from_str_radix(id, 16)
            .map_err(|_| parse_err(n, format!("bad feature id '{id}'")))?;
        let w: f64 = w
            .parse()
            .map_err(|_| parse_err(n, format!("bad weight '{w}'")))?;
        if weights.insert(id, w).is_some() {
            return Err(parse_err(n, format!("duplicate feature id {id:016x}")));
        }
    }
    if weights.len() != count {
        return Err(Error::Model(format!(
            "header announces {count} weights, file has {}",
            weights.len()
        )));
    }
    Model::from_parts(templates, labels, mode, beam, tagset, weights, meta)
}

/// Reads a model and checks it against the active tagset.
pub fn load_model(path: &Path, tagset: &Tagset) -> Result<Model> {
    if !path.exists() {
        return Err(Error::Model(format!("model not found: {}", path.display())));
    }
    let model = read_model(&read_file(path)?)?;
    model.check_tagset(tagset)?;
    Ok(model)
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    std::fs::write(path, write_model(model))?;
    Ok(())
}
