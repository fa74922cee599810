//! Joins a probe manifest with backend results and produces per-relation
//! scores and per-setting accuracies.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::accuracy::SettingAccuracy;
use super::anchors::{compute_ird, compute_pfd, select_primary_anchor, AnchorSet};
use super::exact_match::exact_match;
use super::monitor::{compute_monitor, numerator_term, Alphas, TripletTerm};
use super::results::ProbeResult;
use crate::corpus::{ProbeKind, ProbeRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreConfig {
    pub alphas: Alphas,
    /// Count the base frame among the framed anchors of PFD.
    pub pfd_include_base: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletScore {
    pub triplet_id: String,
    pub pfd: f64,
    pub ird: f64,
    pub numerator_term: f64,
    pub primary_mean_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationScore {
    pub relation_id: String,
    pub model_id: String,
    pub alphas: Alphas,
    pub pfd_include_base: bool,
    /// Sorted by triplet id; sums run in this order.
    pub per_triplet: Vec<TripletScore>,
    pub monitor: f64,
    pub excluded_triplets: Vec<String>,
}

/// One line of `scores.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub model_id: String,
    pub relation_id: String,
    pub monitor: f64,
    pub pfd_mean: f64,
    pub ird_mean: f64,
    pub avg_anchor_prob: f64,
    pub excluded_count: usize,
    pub scored_count: usize,
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

impl RelationScore {
    pub fn row(&self) -> ScoreRow {
        ScoreRow {
            model_id: self.model_id.clone(),
            relation_id: self.relation_id.clone(),
            monitor: self.monitor,
            pfd_mean: mean(self.per_triplet.iter().map(|t| t.pfd)),
            ird_mean: mean(self.per_triplet.iter().map(|t| t.ird)),
            avg_anchor_prob: mean(self.per_triplet.iter().map(|t| t.primary_mean_prob)),
            excluded_count: self.excluded_triplets.len(),
            scored_count: self.per_triplet.len(),
        }
    }

    pub fn anchor_probs(&self) -> Vec<f64> {
        self.per_triplet
            .iter()
            .map(|t| t.primary_mean_prob)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreOutput {
    /// Sorted by (model_id, relation_id).
    pub relations: Vec<RelationScore>,
    /// Sorted by (model_id, relation_id, setting order).
    pub accuracy: Vec<SettingAccuracy>,
}

fn setting_key(p: &ProbeRecord) -> (ProbeKind, usize) {
    match p.kind {
        ProbeKind::QaFrame => (p.kind, p.frame_index),
        ProbeKind::QaPosPrimed => (p.kind, p.frame_index),
        _ => (p.kind, 0),
    }
}

fn setting_name((kind, frame): (ProbeKind, usize)) -> String {
    match kind {
        ProbeKind::QaFrame => format!("QA_FRAME_{frame}"),
        ProbeKind::QaPosPrimed if frame > 0 => format!("QA_POS_PRIMED_{frame}"),
        _ => kind.as_str().to_string(),
    }
}

type Joined<'a> = (&'a ProbeRecord, &'a ProbeResult);

/// Score every (model, relation) pair present in `results`.
pub fn score(
    probes: &[ProbeRecord],
    results: &[ProbeResult],
    config: &ScoreConfig,
) -> Result<ScoreOutput> {
    config.alphas.validate()?;
    let by_id: HashMap<&str, &ProbeRecord> =
        probes.iter().map(|p| (p.probe_id.as_str(), p)).collect();

    // model -> relation -> triplet -> joined records
    let mut grouped: BTreeMap<&str, BTreeMap<&str, BTreeMap<&str, Vec<Joined>>>> = BTreeMap::new();
    let mut seen: HashMap<(&str, &str), ()> = HashMap::new();
    for r in results {
        let probe = by_id
            .get(r.probe_id.as_str())
            .ok_or_else(|| Error::Mismatch(format!("result for unknown probe {}", r.probe_id)))?;
        if seen.insert((&r.model_id, &r.probe_id), ()).is_some() {
            return Err(Error::Mismatch(format!(
                "duplicate result for probe {} from model {}",
                r.probe_id, r.model_id
            )));
        }
        grouped
            .entry(&r.model_id)
            .or_default()
            .entry(&probe.relation_id)
            .or_default()
            .entry(&probe.triplet_id)
            .or_default()
            .push((probe, r));
    }

    let mut out = ScoreOutput::default();
    for (model, relations) in &grouped {
        for (relation, triplets) in relations {
            let mut per_triplet = Vec::new();
            let mut excluded = Vec::new();
            let mut settings: BTreeMap<(ProbeKind, usize), (usize, usize)> = BTreeMap::new();

            for (triplet_id, joined) in triplets {
                for (p, r) in joined {
                    let (gold, aliases) = p.expected_answer();
                    let slot = settings.entry(setting_key(p)).or_insert((0, 0));
                    slot.1 += 1;
                    if exact_match(&r.top1_text, gold, aliases) {
                        slot.0 += 1;
                    }
                }
                match score_triplet(triplet_id, joined, config)? {
                    Some(t) => per_triplet.push(t),
                    None => excluded.push(triplet_id.to_string()),
                }
            }

            for (key, (correct, total)) in settings {
                out.accuracy.push(SettingAccuracy {
                    model_id: model.to_string(),
                    relation_id: relation.to_string(),
                    setting: setting_name(key),
                    correct,
                    total,
                });
            }

            let terms: Vec<TripletTerm> = per_triplet
                .iter()
                .map(|t: &TripletScore| TripletTerm {
                    pfd: t.pfd,
                    ird: t.ird,
                    primary_mean_prob: t.primary_mean_prob,
                })
                .collect();
            if terms.is_empty() {
                return Err(Error::Degenerate(format!(
                    "model {model}, relation {relation}: every triplet was excluded \
                     (no positively primed prompt produced the gold answer)"
                )));
            }
            let monitor = compute_monitor(&terms, config.alphas).map_err(|e| match e {
                Error::Degenerate(m) => {
                    Error::Degenerate(format!("model {model}, relation {relation}: {m}"))
                }
                other => other,
            })?;
            out.relations.push(RelationScore {
                relation_id: relation.to_string(),
                model_id: model.to_string(),
                alphas: config.alphas,
                pfd_include_base: config.pfd_include_base,
                per_triplet,
                monitor,
                excluded_triplets: excluded,
            });
        }
    }
    Ok(out)
}

fn score_triplet(
    triplet_id: &str,
    joined: &[Joined],
    config: &ScoreConfig,
) -> Result<Option<TripletScore>> {
    let of_kind = |kind: ProbeKind| {
        let mut v: Vec<&Joined> = joined.iter().filter(|(p, _)| p.kind == kind).collect();
        v.sort_by(|a, b| (a.0.frame_index, &a.0.probe_id).cmp(&(b.0.frame_index, &b.0.probe_id)));
        v
    };

    let positives = of_kind(ProbeKind::QaPosPrimed);
    let Some((first, _)) = positives.first() else {
        return Err(Error::Mismatch(format!(
            "triplet {triplet_id} has no positively primed results"
        )));
    };
    let pos_results: Vec<&ProbeResult> = positives.iter().map(|(_, r)| *r).collect();
    let Some(anchor) =
        select_primary_anchor(&first.gold_object, &first.gold_aliases, &pos_results)?
    else {
        return Ok(None);
    };

    let mut framed_kinds = Vec::new();
    if config.pfd_include_base {
        framed_kinds.extend(of_kind(ProbeKind::QaBase));
    }
    framed_kinds.extend(of_kind(ProbeKind::QaFrame));
    let framed = framed_kinds
        .iter()
        .map(|(_, r)| r.anchor_token_probs.clone())
        .collect();
    let negatives = of_kind(ProbeKind::QaNegPrimed)
        .iter()
        .map(|(_, r)| r.anchor_token_probs.clone())
        .collect();

    let set = AnchorSet::new(triplet_id, anchor.token_probs, framed, negatives)?;
    let pfd = compute_pfd(&set).map_err(|e| match e {
        Error::EmptyInput(m) if !config.pfd_include_base => Error::EmptyInput(format!(
            "{m}; the relation has a single QA frame, score with the base frame included"
        )),
        other => other,
    })?;
    let ird = compute_ird(&set)?;
    Ok(Some(TripletScore {
        triplet_id: triplet_id.to_string(),
        pfd,
        ird,
        numerator_term: numerator_term(pfd, ird, config.alphas),
        primary_mean_prob: set.primary_mean_prob,
    }))
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "._-".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `scores.csv`, `accuracy.csv` and one `score_<model>_<relation>.json`
/// per pair into `dir`.
pub fn write_score_outputs(output: &ScoreOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let scores_path = dir.join("scores.csv");
    let mut w = csv::Writer::from_path(&scores_path)?;
    for r in &output.relations {
        w.serialize(r.row())?;
    }
    w.flush().map_err(|e| Error::io(&scores_path, e))?;

    let acc_path = dir.join("accuracy.csv");
    let mut w = csv::Writer::from_path(&acc_path)?;
    for a in &output.accuracy {
        w.serialize(a)?;
    }
    w.flush().map_err(|e| Error::io(&acc_path, e))?;

    for r in &output.relations {
        let path = dir.join(format!(
            "score_{}_{}.json",
            file_safe(&r.model_id),
            file_safe(&r.relation_id)
        ));
        let mut body = serde_json::to_string_pretty(r)?;
        body.push('\n');
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

pub fn read_scores_csv(path: &Path) -> Result<Vec<ScoreRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_accuracy_csv(path: &Path) -> Result<Vec<SettingAccuracy>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
