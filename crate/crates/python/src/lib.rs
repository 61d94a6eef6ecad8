//! Python bindings.

use std::sync::Arc;

use morphosyn_core::io::{
    read_corpus, read_lattice, read_model, write_conll, write_lattice, write_model, write_path,
    ConllSentence,
};
use morphosyn_core::learn::{
    beam_decode, evaluate_corpus, train, Derivation, Metrics, Model, TrainConfig,
};
use morphosyn_core::lexicon::{
    tokenize_raw, Analyzer as CoreAnalyzer, AnalyzerConfig, Lexicon, OovTable,
};
use morphosyn_core::transition::Mode;
use morphosyn_core::{count_paths, toy, validate_lattice, Error, SentenceLattice, Tagset};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type SegmentTuple = (String, String, String, String);

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyRuntimeError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

/// Splits raw text into tokens.
#[pyfunction]
fn tokenize(text: &str) -> Vec<String> {
    tokenize_raw(text)
}

/// A morphological analyzer: lexicon, prefix rules and OOV fallback.
#[pyclass(module = "morphosyn")]
struct Analyzer {
    inner: Arc<CoreAnalyzer>,
}

#[pymethods]
impl Analyzer {
    /// Builds an analyzer from file contents. With no arguments, the
    /// bundled toy analyzer.
    #[new]
    #[pyo3(signature = (lexicon=None, config=None, oov=None))]
    fn new(lexicon: Option<&str>, config: Option<&str>, oov: Option<&str>) -> PyResult<Self> {
        if lexicon.is_none() && config.is_none() && oov.is_none() {
            return Ok(Analyzer {
                inner: Arc::new(toy::analyzer().map_err(err)?),
            });
        }
        let (cfg, tagset) = match config {
            Some(t) => AnalyzerConfig::from_toml(t).map_err(err)?,
            None => AnalyzerConfig::from_toml(toy::ANALYZER_TOML).map_err(err)?,
        };
        let (lex, _) = Lexicon::parse(lexicon.unwrap_or(toy::LEXICON), &tagset).map_err(err)?;
        let oov = match (oov, lexicon) {
            (Some(t), _) => OovTable::from_text(t).map_err(err)?,
            (None, None) => toy::analyzer().map_err(err)?.oov_table().clone(),
            (None, Some(_)) => OovTable::default(),
        };
        Ok(Analyzer {
            inner: Arc::new(CoreAnalyzer::new(lex, oov, cfg, tagset).map_err(err)?),
        })
    }

    /// Analyses of one token, each a list of `(form, lemma, pos, feats)`
    /// segments, plus whether the OOV fallback was used.
    fn analyze_token(&self, token: &str) -> (Vec<Vec<SegmentTuple>>, bool) {
        let r = self.inner.analyze_token(token);
        let analyses = r
            .analyses
            .iter()
            .map(|a| {
                a.segments()
                    .iter()
                    .map(|s| {
                        (
                            s.form.clone(),
                            s.lemma.clone(),
                            s.pos.clone(),
                            s.features.to_string(),
                        )
                    })
                    .collect()
            })
            .collect();
        (analyses, r.oov)
    }

    /// The lattice of a tokenized sentence.
    fn analyze(&self, tokens: Vec<String>) -> PyResult<Lattice> {
        let s = self.inner.build_lattice(&tokens).map_err(err)?;
        Ok(Lattice {
            inner: s.lattice,
            oov: s.oov_tokens,
        })
    }

    /// Tokenizes and analyzes raw text.
    fn analyze_text(&self, text: &str) -> PyResult<Lattice> {
        self.analyze(tokenize_raw(text))
    }

    /// Adds lexicon lines, all or nothing. Returns how many were new.
    fn add_entries(&mut self, lines: Vec<String>) -> PyResult<usize> {
        let (next, added) = self.inner.with_entries(&lines).map_err(err)?;
        self.inner = Arc::new(next);
        Ok(added)
    }

    fn __contains__(&self, token: &str) -> bool {
        self.inner.lexicon().contains(token)
    }
}

/// The morphological analyses of one sentence as a DAG of morphemes.
#[pyclass(module = "morphosyn")]
struct Lattice {
    inner: SentenceLattice,
    oov: Vec<usize>,
}

#[pymethods]
impl Lattice {
    /// Reads one sentence in lattice format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let mut all = read_lattice(text).map_err(err)?;
        if all.len() != 1 {
            return Err(PyValueError::new_err(format!(
                "expected one sentence, found {}",
                all.len()
            )));
        }
        let inner = all.remove(0);
        validate_lattice(&inner).into_result().map_err(err)?;
        Ok(Lattice {
            inner,
            oov: Vec::new(),
        })
    }

    /// Arcs as `(from, to, form, lemma, pos, feats, token)` tuples.
    #[getter]
    fn arcs(&self) -> Vec<(usize, usize, String, String, String, String, usize)> {
        self.inner
            .arcs()
            .iter()
            .map(|a| {
                (
                    a.from,
                    a.to,
                    a.form.clone(),
                    a.lemma.clone(),
                    a.pos.clone(),
                    a.features.to_string(),
                    a.token,
                )
            })
            .collect()
    }

    /// 1-based indices of tokens analyzed by the OOV fallback.
    #[getter]
    fn oov(&self) -> Vec<usize> {
        self.oov.clone()
    }

    #[getter]
    fn token_count(&self) -> usize {
        self.inner.token_count()
    }

    fn count_paths(&self) -> u128 {
        count_paths(&self.inner)
    }

    /// The lattice in file format, blank-line terminated.
    fn to_text(&self) -> String {
        write_lattice(std::slice::from_ref(&self.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.arcs().len()
    }
}

/// One decoded sentence.
#[pyclass(module = "morphosyn", frozen)]
struct Parse {
    best: Derivation,
}

#[pymethods]
impl Parse {
    /// Chosen morpheme forms in order.
    #[getter]
    fn segments(&self) -> Vec<String> {
        self.best.path.forms().map(String::from).collect()
    }

    /// Head of each morpheme, 1-based, 0 for the root.
    #[getter]
    fn heads(&self) -> Vec<usize> {
        self.best.tree.heads()[1..].to_vec()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.best
            .tree
            .edges()
            .iter()
            .map(|e| e.label.clone())
            .collect()
    }

    #[getter]
    fn score(&self) -> f64 {
        self.best.score
    }

    /// The chosen path in lattice format.
    fn mapping(&self) -> String {
        write_path(std::slice::from_ref(&self.best.path))
    }

    /// The tree in CoNLL-X format.
    fn conll(&self) -> PyResult<String> {
        let s = ConllSentence::from_parse(&self.best.path, &self.best.tree).map_err(err)?;
        Ok(write_conll(&[s]))
    }
}

/// A trained model.
#[pyclass(module = "morphosyn", frozen)]
struct Parser {
    model: Model,
}

#[pymethods]
impl Parser {
    /// Reads a model from its text form. With no argument, the bundled
    /// toy model.
    #[new]
    #[pyo3(signature = (model=None))]
    fn new(model: Option<&str>) -> PyResult<Self> {
        let model = match model {
            Some(t) => read_model(t).map_err(err)?,
            None => toy::model().map_err(err)?,
        };
        Ok(Parser { model })
    }

    /// Decodes a lattice. `beam` defaults to the model's beam width.
    #[pyo3(signature = (lattice, beam=None))]
    fn parse(&self, py: Python<'_>, lattice: &Lattice, beam: Option<usize>) -> PyResult<Parse> {
        let k = beam.unwrap_or(self.model.beam());
        let best = py
            .detach(|| beam_decode(&self.model, &lattice.inner, k))
            .map_err(err)?
            .swap_remove(0);
        Ok(Parse { best })
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.model.labels().to_vec()
    }

    #[getter]
    fn beam(&self) -> usize {
        self.model.beam()
    }

    /// Segmentation and attachment scores against gold files.
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        conll: &str,
        md: &str,
        lattices: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let corpus = read_corpus(conll, md, lattices).map_err(err)?;
        let m = py
            .detach(|| evaluate_corpus(&self.model, &corpus))
            .map_err(err)?
            .metrics();
        metrics_dict(py, &m)
    }

    /// The model in its text form.
    fn to_text(&self) -> String {
        write_model(&self.model)
    }
}

fn metrics_dict<'py>(py: Python<'py>, m: &Metrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("seg_precision", m.seg_precision)?;
    d.set_item("seg_recall", m.seg_recall)?;
    d.set_item("seg_f1", m.seg_f1)?;
    d.set_item("pos_accuracy", m.pos_accuracy)?;
    d.set_item("uas", m.uas)?;
    d.set_item("las", m.las)?;
    Ok(d)
}

/// Trains a model from the contents of a CoNLL-X treebank, its gold
/// morpheme paths and its MA lattices.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (conll, md, lattices, epochs=20, beam=8, seed=1, mode="joint"))]
fn train_model(
    py: Python<'_>,
    conll: &str,
    md: &str,
    lattices: &str,
    epochs: usize,
    beam: usize,
    seed: u64,
    mode: &str,
) -> PyResult<Parser> {
    let mode = match mode {
        "joint" => Mode::Joint,
        "md" => Mode::MorphOnly,
        "dep" => Mode::DepOnly,
        m => return Err(PyValueError::new_err(format!("unknown mode '{m}'"))),
    };
    let corpus = read_corpus(conll, md, lattices).map_err(err)?;
    let config = TrainConfig {
        epochs,
        beam,
        seed,
        mode,
        ..Default::default()
    };
    let (model, _) = py
        .detach(|| train(&corpus, &config, &Tagset::default()))
        .map_err(err)?;
    Ok(Parser { model })
}

#[pymodule]
fn morphosyn(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(train_model, m)?)?;
    m.add_class::<Analyzer>()?;
    m.add_class::<Lattice>()?;
    m.add_class::<Parse>()?;
    m.add_class::<Parser>()?;
    Ok(())
}
