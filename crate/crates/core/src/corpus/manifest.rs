use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::negatives::sample_from_objects;
use super::templates::TemplateRegistry;
use super::triplet::FactTriplet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProbeKind {
    QaBase,
    QaFrame,
    Wp,
    FcPos,
    FcNeg,
    QaPosPrimed,
    QaNegPrimed,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 7] = [
        ProbeKind::QaBase,
        ProbeKind::QaFrame,
        ProbeKind::Wp,
        ProbeKind::FcPos,
        ProbeKind::FcNeg,
        ProbeKind::QaPosPrimed,
        ProbeKind::QaNegPrimed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProbeKind::QaBase => "QA_BASE",
            ProbeKind::QaFrame => "QA_FRAME",
            ProbeKind::Wp => "WP",
            ProbeKind::FcPos => "FC_POS",
            ProbeKind::FcNeg => "FC_NEG",
            ProbeKind::QaPosPrimed => "QA_POS_PRIMED",
            ProbeKind::QaNegPrimed => "QA_NEG_PRIMED",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rendered prompt. Field order is the serialized order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe_id: String,
    pub triplet_id: String,
    pub relation_id: String,
    pub kind: ProbeKind,
    pub frame_index: usize,
    pub prime_text: Option<String>,
    pub prime_entity: Option<String>,
    pub prompt_text: String,
    pub gold_object: String,
    pub gold_aliases: Vec<String>,
}

impl ProbeRecord {
    /// The answer a correct model gives: `True`/`False` for fact checking,
    /// the gold object (with aliases) otherwise.
    pub fn expected_answer(&self) -> (&str, &[String]) {
        match self.kind {
            ProbeKind::FcPos => ("True", &[]),
            ProbeKind::FcNeg => ("False", &[]),
            _ => (&self.gold_object, &self.gold_aliases),
        }
    }
}

/// Deterministic probe id from `(triplet_id, kind, frame_index, prime_entity)`.
pub fn probe_id(
    triplet_id: &str,
    kind: ProbeKind,
    frame_index: usize,
    prime_entity: Option<&str>,
) -> String {
    match prime_entity {
        Some(e) => format!("{triplet_id}|{kind}|{frame_index}|{e}"),
        None => format!("{triplet_id}|{kind}|{frame_index}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpandOptions {
    /// Interference entities per triplet (`m`).
    pub negatives: usize,
    pub seed: u64,
    /// Also emit positively primed variants of frames 1..R-1, used as
    /// fallbacks when the base-frame primed prompt fails exact match.
    pub positive_primes_all_frames: bool,
}

impl ExpandOptions {
    pub fn new(negatives: usize, seed: u64) -> Self {
        Self {
            negatives,
            seed,
            positive_primes_all_frames: false,
        }
    }
}

pub type KindCounts = BTreeMap<ProbeKind, usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeManifest {
    pub dataset_name: String,
    pub seed: u64,
    pub negatives: usize,
    pub probes: Vec<ProbeRecord>,
    pub counts: BTreeMap<String, KindCounts>,
}

/// Sidecar written next to the JSON-lines manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub dataset_name: String,
    pub seed: u64,
    pub negatives: usize,
    pub total: usize,
    pub counts: BTreeMap<String, KindCounts>,
}

impl ProbeManifest {
    pub fn summary(&self) -> ManifestSummary {
        ManifestSummary {
            dataset_name: self.dataset_name.clone(),
            seed: self.seed,
            negatives: self.negatives,
            total: self.probes.len(),
            counts: self.counts.clone(),
        }
    }

    /// JSON-lines rendering, one probe per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for p in &self.probes {
            out.push_str(&serde_json::to_string(p)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn total_for(&self, relation_id: &str) -> usize {
        self.counts
            .get(relation_id)
            .map(|c| c.values().sum())
            .unwrap_or(0)
    }
}

fn count_probes(probes: &[ProbeRecord]) -> BTreeMap<String, KindCounts> {
    let mut counts: BTreeMap<String, KindCounts> = BTreeMap::new();
    for p in probes {
        *counts
            .entry(p.relation_id.clone())
            .or_default()
            .entry(p.kind)
            .or_insert(0) += 1;
    }
    counts
}

fn render(template: &str, subject: &str, object: Option<&str>) -> String {
    let s = template.replace("[X]", subject);
    match object {
        Some(o) => s.replace("[Y]", o),
        None => s,
    }
}

fn primed(prime: &str, question: &str) -> (String, String) {
    (format!("{prime}."), format!("{prime}. {question}"))
}

/// Expand triplets into every probe kind.
///
/// Per triplet with R QA frames and `m` negatives: QA_BASE (frame 0),
/// QA_FRAME for frames 1..R-1, one WP, one FC_POS, `m` FC_NEG, one
/// QA_POS_PRIMED on the base frame and `m` QA_NEG_PRIMED on the base frame.
/// Primes are rendered as `"<prime>. <question>"`. The same `m` sampled
/// entities feed FC_NEG and QA_NEG_PRIMED. Probes are sorted by `probe_id`.
pub fn expand_probes(
    dataset_name: &str,
    triplets: &[FactTriplet],
    templates: &TemplateRegistry,
    opts: ExpandOptions,
) -> Result<ProbeManifest> {
    let mut objects_by_relation: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for t in triplets {
        templates.require(&t.relation_id)?;
        objects_by_relation
            .entry(&t.relation_id)
            .or_default()
            .push(&t.object);
    }

    let mut probes = Vec::new();
    for t in triplets {
        let tpl = templates.require(&t.relation_id)?;
        let negatives = sample_from_objects(
            t,
            objects_by_relation[t.relation_id.as_str()].iter().copied(),
            opts.negatives,
            opts.seed,
        )?;

        let make = |kind: ProbeKind,
                    frame_index: usize,
                    prime_text: Option<String>,
                    prime_entity: Option<&str>,
                    prompt_text: String| ProbeRecord {
            probe_id: probe_id(&t.triplet_id, kind, frame_index, prime_entity),
            triplet_id: t.triplet_id.clone(),
            relation_id: t.relation_id.clone(),
            kind,
            frame_index,
            prime_text,
            prime_entity: prime_entity.map(str::to_string),
            prompt_text,
            gold_object: t.object.clone(),
            gold_aliases: t.object_aliases.clone(),
        };

        let questions: Vec<String> = tpl
            .qa_frames
            .iter()
            .map(|f| render(f, &t.subject, None))
            .collect();

        for (j, q) in questions.iter().enumerate() {
            let kind = if j == 0 {
                ProbeKind::QaBase
            } else {
                ProbeKind::QaFrame
            };
            probes.push(make(kind, j, None, None, q.clone()));
        }

        let wp = render(&tpl.wp_frame, &t.subject, None);
        let wp = wp.trim_end().trim_end_matches('_').trim_end().to_string();
        probes.push(make(ProbeKind::Wp, 0, None, None, wp));

        probes.push(make(
            ProbeKind::FcPos,
            0,
            None,
            None,
            render(&tpl.fc_frame, &t.subject, Some(&t.object)),
        ));
        for neg in &negatives {
            probes.push(make(
                ProbeKind::FcNeg,
                0,
                None,
                Some(neg),
                render(&tpl.fc_frame, &t.subject, Some(neg)),
            ));
        }

        let pos_frames = if opts.positive_primes_all_frames {
            questions.len()
        } else {
            1
        };
        for (j, q) in questions.iter().enumerate().take(pos_frames) {
            let (prime_text, prompt) = primed(&t.object, q);
            probes.push(make(
                ProbeKind::QaPosPrimed,
                j,
                Some(prime_text),
                Some(&t.object),
                prompt,
            ));
        }
        for neg in &negatives {
            let (prime_text, prompt) = primed(neg, &questions[0]);
            probes.push(make(
                ProbeKind::QaNegPrimed,
                0,
                Some(prime_text),
                Some(neg),
                prompt,
            ));
        }
    }

    probes.sort_by(|a, b| a.probe_id.cmp(&b.probe_id));
    if let Some(dup) = probes.windows(2).find(|w| w[0].probe_id == w[1].probe_id) {
        return Err(Error::InvalidArgument(format!(
            "duplicate probe id {}",
            dup[0].probe_id
        )));
    }
    let counts = count_probes(&probes);
    Ok(ProbeManifest {
        dataset_name: dataset_name.to_string(),
        seed: opts.seed,
        negatives: opts.negatives,
        probes,
        counts,
    })
}

/// `manifest.jsonl` -> `manifest.summary.json`
pub fn summary_path(manifest_path: &Path) -> PathBuf {
    manifest_path.with_extension("summary.json")
}

pub fn write_manifest(manifest: &ProbeManifest, path: &Path) -> Result<()> {
    let write = |p: &Path, body: &str| -> Result<()> {
        let mut f = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
        f.write_all(body.as_bytes()).map_err(|e| Error::io(p, e))
    };
    write(path, &manifest.to_jsonl()?)?;
    let mut summary = serde_json::to_string_pretty(&manifest.summary())?;
    summary.push('\n');
    write(&summary_path(path), &summary)
}

pub fn read_probes_jsonl(text: &str) -> Result<Vec<ProbeRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::MalformedRow {
                line: i + 1,
                field: "probe",
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Read a manifest and, when present, its summary sidecar. Counts are always
/// recomputed from the probes and checked against the sidecar.
pub fn read_manifest(path: &Path) -> Result<ProbeManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let probes = read_probes_jsonl(&text)?;
    let counts = count_probes(&probes);
    let sidecar = summary_path(path);
    let (dataset_name, seed, negatives) = if sidecar.exists() {
        let body = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let summary: ManifestSummary = serde_json::from_str(&body)?;
        if summary.counts != counts || summary.total != probes.len() {
            return Err(Error::Mismatch(format!(
                "{} does not agree with {}",
                sidecar.display(),
                path.display()
            )));
        }
        (summary.dataset_name, summary.seed, summary.negatives)
    } else {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("manifest")
            .to_string();
        (name, 0, 0)
    };
    Ok(ProbeManifest {
        dataset_name,
        seed,
        negatives,
        probes,
        counts,
    })
}
