use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use morphosyn::service;
use morphosyn::{decode_layers, Engine};
use morphosyn_core::io::{
    read_corpus, read_lattice, read_model, read_tokens, write_lattice, write_model, write_segments,
};
use morphosyn_core::learn::{evaluate_corpus, train_with, Metrics, Model, TrainConfig};
use morphosyn_core::lexicon::{
    build_oov_table, Analyzer, AnalyzerConfig, Lexicon, OovTable, DEFAULT_MAX_OOV,
    DEFAULT_RARE_THRESHOLD,
};
use morphosyn_core::transition::{GoldAnnotation, Mode};
use morphosyn_core::{toy, SentenceLattice, Tagset};

const WORKFLOW: &str = "\
Flags take a single dash, e.g. `-raw`. Parsing raw text takes two steps:

  morphosyn hebma -raw input.txt -out input.lattice
  morphosyn joint -in input.lattice -os output.segmentation -om output.mapping -oc output.conll

Input text has one token per line and an empty line after every sentence,
including the last. Without -lexicon, -config and -model the bundled toy
lexicon and model are used.";

#[derive(Parser)]
#[command(name = "morphosyn", version, about = "Joint morphological disambiguation and dependency parsing", after_help = WORKFLOW)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Morphological analysis: raw tokens to lattices.
    Hebma(HebmaArgs),
    /// Joint disambiguation and parsing of lattices.
    Joint(JointArgs),
    /// Train a model from gold trees, gold paths, and lattices.
    Train(TrainArgs),
    /// Serve the REST API.
    Api(ApiArgs),
}

#[derive(Args)]
struct AnalyzerArgs {
    /// Lexicon file (one token per line followed by its analyses).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Analyzer TOML: prefix table and optional [tagset].
    #[arg(long)]
    config: Option<PathBuf>,
    /// OOV table written by `train -oov-out`.
    #[arg(long)]
    oov: Option<PathBuf>,
}

#[derive(Args)]
struct HebmaArgs {
    /// Tokens, one per line, a blank line after each sentence.
    #[arg(long)]
    raw: PathBuf,
    /// Output lattice file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    analyzer: AnalyzerArgs,
}

#[derive(Args)]
struct JointArgs {
    /// Input lattice file, as written by hebma.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output segmentation: one segment per line.
    #[arg(long)]
    os: PathBuf,
    /// Output mapping: the chosen lattice path, in lattice format.
    #[arg(long)]
    om: PathBuf,
    /// Output dependency trees in CoNLL-X.
    #[arg(long)]
    oc: PathBuf,
    /// Model file; defaults to the bundled toy model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Beam width; defaults to the model's.
    #[arg(long)]
    beam: Option<usize>,
    /// Analyzer TOML supplying the tagset.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Gold trees in CoNLL-X.
    #[arg(long)]
    train: PathBuf,
    /// Gold morpheme paths in lattice format.
    #[arg(long)]
    md: PathBuf,
    /// Analyzer lattices of the same sentences.
    #[arg(long)]
    lattice: PathBuf,
    /// Output model file.
    #[arg(long)]
    out: PathBuf,
    /// Development trees; requires -dev-md and -dev-lattice.
    #[arg(long, requires_all = ["dev_md", "dev_lattice"])]
    dev: Option<PathBuf>,
    #[arg(long)]
    dev_md: Option<PathBuf>,
    #[arg(long)]
    dev_lattice: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    epochs: usize,
    #[arg(long, default_value_t = morphosyn_core::learn::DEFAULT_BEAM)]
    beam: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// joint, md (segmentation and tagging only) or dep (parsing gold paths).
    #[arg(long, default_value = "joint", value_parser = parse_mode)]
    mode: Mode,
    /// Analyzer TOML supplying the tagset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write an OOV table learned from rare training tokens.
    #[arg(long)]
    oov_out: Option<PathBuf>,
}

#[derive(Args)]
struct ApiArgs {
    #[arg(long, default_value_t = 8000)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    analyzer: AnalyzerArgs,
    /// Enable POST /admin/lexicon.
    #[arg(long)]
    admin: bool,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("unknown mode '{s}' (joint, md, dep)"))
}

/// Rewrites `-flag` to `--flag` so single-dash long flags parse.
fn normalize_args(args: impl IntoIterator<Item = String>) -> Vec<String> {
    args.into_iter()
        .map(|a| {
            let mut c = a.chars();
            if c.next() == Some('-')
                && c.next().is_some_and(|x| x.is_ascii_alphabetic())
                && a.len() > 2
            {
                format!("-{a}")
            } else {
                a
            }
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<(AnalyzerConfig, Tagset)> {
    let text = match path {
        Some(p) => read(p)?,
        None => toy::ANALYZER_TOML.to_string(),
    };
    AnalyzerConfig::from_toml(&text).context("invalid analyzer config")
}

fn load_analyzer(args: &AnalyzerArgs) -> Result<Analyzer> {
    if args.lexicon.is_none() && args.config.is_none() && args.oov.is_none() {
        return Ok(toy::analyzer()?);
    }
    let (config, tagset) = load_config(args.config.as_deref())?;
    let (lexicon, warnings) = match &args.lexicon {
        Some(p) => {
            Lexicon::parse(&read(p)?, &tagset).with_context(|| format!("in {}", p.display()))?
        }
        None => Lexicon::parse(toy::LEXICON, &tagset)?,
    };
    for w in warnings {
        log::warn!("{w}");
    }
    let oov = match (&args.oov, &args.lexicon) {
        (Some(p), _) => {
            OovTable::from_text(&read(p)?).with_context(|| format!("in {}", p.display()))?
        }
        (None, None) => toy::analyzer()?.oov_table().clone(),
        (None, Some(_)) => OovTable::default(),
    };
    Ok(Analyzer::new(lexicon, oov, config, tagset)?)
}

fn load_model(path: Option<&Path>, tagset: &Tagset) -> Result<Model> {
    let model = match path {
        Some(p) if !p.exists() => bail!("model not found: {}", p.display()),
        Some(p) => read_model(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => toy::model()?,
    };
    model.check_tagset(tagset)?;
    Ok(model)
}

fn hebma(args: HebmaArgs) -> Result<()> {
    let analyzer = load_analyzer(&args.analyzer)?;
    let sentences =
        read_tokens(&read(&args.raw)?).with_context(|| format!("in {}", args.raw.display()))?;
    let mut lattices = Vec::with_capacity(sentences.len());
    for (i, tokens) in sentences.iter().enumerate() {
        let s = analyzer
            .build_lattice(tokens)
            .with_context(|| format!("sentence {}", i + 1))?;
        for t in &s.oov_tokens {
            log::info!(
                "sentence {}: token {t} '{}' is out of vocabulary",
                i + 1,
                tokens[t - 1]
            );
        }
        lattices.push(s.lattice);
    }
    write_atomic(&args.out, &write_lattice(&lattices))
}

fn joint(args: JointArgs) -> Result<()> {
    let (_, tagset) = load_config(args.config.as_deref())?;
    let mut model = load_model(args.model.as_deref(), &tagset)?;
    if let Some(k) = args.beam {
        model.set_beam(k)?;
    }
    let lattices = read_lattice(&read(&args.input)?)
        .with_context(|| format!("in {}", args.input.display()))?;
    let (mut paths, mut md, mut dep) = (Vec::new(), String::new(), String::new());
    for (i, lattice) in lattices.iter().enumerate() {
        morphosyn_core::types::validate_lattice(lattice)
            .into_result()
            .with_context(|| format!("sentence {}", i + 1))?;
        let (path, m, d) =
            decode_layers(&model, lattice).with_context(|| format!("sentence {}", i + 1))?;
        paths.push(path);
        md.push_str(&m);
        dep.push_str(&d);
    }
    write_atomic(&args.os, &write_segments(&paths))?;
    write_atomic(&args.om, &md)?;
    write_atomic(&args.oc, &dep)
}

fn load_corpus(
    conll: &Path,
    md: &Path,
    lattice: &Path,
) -> Result<Vec<(SentenceLattice, GoldAnnotation)>> {
    read_corpus(&read(conll)?, &read(md)?, &read(lattice)?).with_context(|| {
        format!(
            "in {}, {}, {}",
            conll.display(),
            md.display(),
            lattice.display()
        )
    })
}

fn metric_columns(m: &Metrics) -> String {
    format!(
        "{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
        m.seg_precision, m.seg_recall, m.seg_f1, m.pos_accuracy, m.uas, m.las
    )
}

fn train(args: TrainArgs) -> Result<()> {
    let (_, tagset) = load_config(args.config.as_deref())?;
    let corpus = load_corpus(&args.train, &args.md, &args.lattice)?;
    let dev = match (&args.dev, &args.dev_md, &args.dev_lattice) {
        (Some(c), Some(m), Some(l)) => Some(load_corpus(c, m, l)?),
        _ => None,
    };
    let config = TrainConfig {
        epochs: args.epochs,
        beam: args.beam,
        seed: args.seed,
        mode: args.mode,
        ..Default::default()
    };
    let cols = "seg_p\tseg_r\tseg_f1\tpos\tuas\tlas";
    let mut header = format!("epoch\tupdates\t{cols}");
    if dev.is_some() {
        header.push_str(&format!("\tdev_{}", cols.replace('\t', "\tdev_")));
    }
    println!("{header}");
    let (model, report) = train_with(&corpus, &config, &tagset, |e, averaged| {
        let mut row = format!("{}\t{}\t{}", e.epoch, e.updates, metric_columns(&e.metrics));
        if let Some(dev) = &dev {
            let m = evaluate_corpus(averaged, dev)?.metrics();
            row.push('\t');
            row.push_str(&metric_columns(&m));
        }
        println!("{row}");
        Ok(())
    })?;
    if report.skipped > 0 {
        log::warn!(
            "{} training sentences could not be replayed and were skipped",
            report.skipped
        );
    }
    write_atomic(&args.out, &write_model(&model))?;
    if let Some(path) = &args.oov_out {
        let training: Vec<_> = corpus
            .iter()
            .map(|(l, g)| (l.tokens().to_vec(), g.path.clone()))
            .collect();
        let table = build_oov_table(&training, DEFAULT_RARE_THRESHOLD, DEFAULT_MAX_OOV);
        write_atomic(path, &table.to_text())?;
    }
    Ok(())
}

fn api(args: ApiArgs) -> Result<()> {
    let analyzer = load_analyzer(&args.analyzer)?;
    let model = load_model(args.model.as_deref(), analyzer.tagset())?;
    let engine = Arc::new(Engine::new(analyzer, model)?);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let addr = format!("{}:{}", args.host, args.port);
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .with_context(|| format!("cannot listen on {addr}"))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        service::serve(listener, engine, args.admin).await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse_from(normalize_args(std::env::args()));
    let result = match cli.command {
        Command::Hebma(a) => hebma(a),
        Command::Joint(a) => joint(a),
        Command::Train(a) => train(a),
        Command::Api(a) => api(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_dash_flags() {
        let args = [
            "morphosyn",
            "hebma",
            "-raw",
            "a.txt",
            "-out",
            "-",
            "-h",
            "-1",
        ]
        .map(String::from);
        assert_eq!(
            normalize_args(args),
            [
                "morphosyn",
                "hebma",
                "--raw",
                "a.txt",
                "--out",
                "-",
                "-h",
                "-1"
            ]
        );
    }

    #[test]
    fn clap_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
