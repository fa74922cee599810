//! Python bindings for `monitor_core`.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use monitor_core::corpus::{self, DiversityScope, ExpandOptions, TripletFormat};
use monitor_core::metrics::{self, Alphas, ScoreConfig, TokenProbs, TripletTerm};
use monitor_core::{mocklm, report, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn alphas(t: (f64, f64, f64)) -> Alphas {
    Alphas {
        pfd: t.0,
        ird: t.1,
        interaction: t.2,
    }
}

#[pyclass(name = "PearsonResult", frozen, get_all)]
struct PyPearson {
    r: f64,
    p_value: f64,
    n: usize,
}

#[pymethods]
impl PyPearson {
    fn __repr__(&self) -> String {
        format!(
            "PearsonResult(r={}, p_value={}, n={})",
            self.r, self.p_value, self.n
        )
    }
}

#[pyclass(name = "ProbeCost", frozen, get_all)]
struct PyProbeCost {
    frames: usize,
    negatives: usize,
    accuracy_probes: usize,
    monitor_probes: usize,
    ratio: f64,
}

#[pyclass(name = "ScoreRow", frozen, get_all)]
struct PyScoreRow {
    model_id: String,
    relation_id: String,
    monitor: f64,
    pfd_mean: f64,
    ird_mean: f64,
    avg_anchor_prob: f64,
    excluded_count: usize,
    scored_count: usize,
}

#[pymethods]
impl PyScoreRow {
    fn __repr__(&self) -> String {
        format!(
            "ScoreRow(model_id={:?}, relation_id={:?}, monitor={})",
            self.model_id, self.relation_id, self.monitor
        )
    }
}

#[pyfunction]
#[pyo3(signature = (candidate, reference, max_ngram = corpus::DEFAULT_MAX_NGRAM))]
fn sentence_bleu(candidate: &str, reference: &str, max_ngram: usize) -> PyResult<f64> {
    corpus::sentence_bleu(candidate, reference, max_ngram).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (base, candidates, threshold = 0.7, pairwise = true))]
fn filter_paraphrases(
    base: &str,
    candidates: Vec<String>,
    threshold: f64,
    pairwise: bool,
) -> PyResult<Vec<String>> {
    let scope = if pairwise {
        DiversityScope::Pairwise
    } else {
        DiversityScope::BaseOnly
    };
    corpus::filter_paraphrases_with(base, &candidates, threshold, scope).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (prediction, gold, aliases = Vec::new()))]
fn exact_match(prediction: &str, gold: &str, aliases: Vec<String>) -> bool {
    metrics::exact_match(prediction, gold, &aliases)
}

/// Mean absolute per-token difference of two probability vectors over the
/// same tokens.
#[pyfunction]
fn token_distance(tokens: Vec<String>, a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    let a = TokenProbs::new(tokens.clone(), a).map_err(to_py)?;
    let b = TokenProbs::new(tokens, b).map_err(to_py)?;
    metrics::token_distance(&a, &b).map_err(to_py)
}

/// `terms` holds `(pfd, ird, primary_mean_prob)` per triplet.
#[pyfunction]
#[pyo3(signature = (terms, alphas = (0.33, 0.33, 0.33)))]
fn compute_monitor(terms: Vec<(f64, f64, f64)>, alphas: (f64, f64, f64)) -> PyResult<f64> {
    let terms: Vec<TripletTerm> = terms
        .into_iter()
        .map(|(pfd, ird, primary_mean_prob)| TripletTerm {
            pfd,
            ird,
            primary_mean_prob,
        })
        .collect();
    metrics::compute_monitor(&terms, self::alphas(alphas)).map_err(to_py)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<PyPearson> {
    let p = metrics::pearson(&xs, &ys).map_err(to_py)?;
    Ok(PyPearson {
        r: p.r,
        p_value: p.p_value,
        n: p.n,
    })
}

#[pyfunction]
fn probe_cost(frames: usize, negatives: usize) -> PyResult<PyProbeCost> {
    let c = metrics::probe_cost(frames, negatives).map_err(to_py)?;
    Ok(PyProbeCost {
        frames: c.frames,
        negatives: c.negatives,
        accuracy_probes: c.accuracy_probes,
        monitor_probes: c.monitor_probes,
        ratio: c.ratio,
    })
}

/// Returns `(counts, solid_fraction)`.
#[pyfunction]
#[pyo3(signature = (probs, bin_width = 0.1, solid_threshold = 0.8))]
fn anchor_histogram(
    probs: Vec<f64>,
    bin_width: f64,
    solid_threshold: f64,
) -> PyResult<(Vec<usize>, f64)> {
    let h = metrics::anchor_histogram(&probs, bin_width, solid_threshold).map_err(to_py)?;
    Ok((h.counts, h.solid_fraction))
}

/// Expand a triplet file into a manifest; returns the probe count.
#[pyfunction]
#[pyo3(signature = (triplets, out, negatives = 5, seed = 0, templates = None))]
fn build_corpus(
    triplets: PathBuf,
    out: PathBuf,
    negatives: usize,
    seed: u64,
    templates: Option<PathBuf>,
) -> PyResult<usize> {
    let registry = match templates {
        Some(p) => corpus::read_registry(&p).map_err(to_py)?,
        None => corpus::builtin_registry(),
    };
    let facts =
        corpus::read_triplets(&triplets, TripletFormat::from_path(&triplets)).map_err(to_py)?;
    let name = triplets
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let manifest = corpus::expand_probes(
        &name,
        &facts,
        &registry,
        ExpandOptions::new(negatives, seed),
    )
    .map_err(to_py)?;
    corpus::write_manifest(&manifest, &out).map_err(to_py)?;
    Ok(manifest.probes.len())
}

/// Run the simulated backend; returns the result count.
#[pyfunction]
fn mock_run(manifest: PathBuf, profile: PathBuf, out: PathBuf) -> PyResult<usize> {
    let manifest = corpus::read_manifest(&manifest).map_err(to_py)?;
    let profile = mocklm::read_profile(&profile).map_err(to_py)?;
    let results = mocklm::mock_score(&manifest.probes, &profile).map_err(to_py)?;
    metrics::write_results(&results, &out).map_err(to_py)?;
    Ok(results.len())
}

#[pyfunction]
#[pyo3(signature = (manifest, results, out, alphas = (0.33, 0.33, 0.33), pfd_include_base = false))]
fn score(
    manifest: PathBuf,
    results: PathBuf,
    out: PathBuf,
    alphas: (f64, f64, f64),
    pfd_include_base: bool,
) -> PyResult<Vec<PyScoreRow>> {
    let manifest = corpus::read_manifest(&manifest).map_err(to_py)?;
    let results = metrics::read_results(&results).map_err(to_py)?;
    let config = ScoreConfig {
        alphas: self::alphas(alphas),
        pfd_include_base,
    };
    let output = metrics::score(&manifest.probes, &results, &config).map_err(to_py)?;
    metrics::write_score_outputs(&output, &out).map_err(to_py)?;
    Ok(output
        .relations
        .iter()
        .map(|r| {
            let s = r.row();
            PyScoreRow {
                model_id: s.model_id,
                relation_id: s.relation_id,
                monitor: s.monitor,
                pfd_mean: s.pfd_mean,
                ird_mean: s.ird_mean,
                avg_anchor_prob: s.avg_anchor_prob,
                excluded_count: s.excluded_count,
                scored_count: s.scored_count,
            }
        })
        .collect())
}

/// Aggregate score and accuracy directories; returns the written paths.
#[pyfunction]
#[pyo3(signature = (scores, acc, out, meta = None))]
fn build_report(
    scores: PathBuf,
    acc: PathBuf,
    out: PathBuf,
    meta: Option<PathBuf>,
) -> PyResult<Vec<PathBuf>> {
    let rows = report::load_scores_dir(&scores).map_err(to_py)?;
    let accuracy =
        metrics::AccuracyStats::by_relation(&report::load_accuracy_dir(&acc).map_err(to_py)?)
            .map_err(to_py)?;
    let options = report::AggregateOptions {
        models: match meta {
            Some(p) => report::read_models_csv(&p).map_err(to_py)?,
            None => Vec::new(),
        },
        anchor_probs: report::load_anchor_probs_dir(&scores).map_err(to_py)?,
        ..Default::default()
    };
    let r = report::aggregate(&rows, &accuracy, &options).map_err(to_py)?;
    report::write_report(&r, &out).map_err(to_py)
}

#[pymodule]
fn monitor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPearson>()?;
    m.add_class::<PyProbeCost>()?;
    m.add_class::<PyScoreRow>()?;
    m.add_function(wrap_pyfunction!(sentence_bleu, m)?)?;
    m.add_function(wrap_pyfunction!(filter_paraphrases, m)?)?;
    m.add_function(wrap_pyfunction!(exact_match, m)?)?;
    m.add_function(wrap_pyfunction!(token_distance, m)?)?;
    m.add_function(wrap_pyfunction!(compute_monitor, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(probe_cost, m)?)?;
    m.add_function(wrap_pyfunction!(anchor_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(build_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(mock_run, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(build_report, m)?)?;
    Ok(())
}
