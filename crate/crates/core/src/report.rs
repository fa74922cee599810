//! Cross-model, cross-relation aggregation and plot data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::metrics::{
    anchor_histogram, pearson, rank_consistency, read_accuracy_csv, read_scores_csv, AccuracyStats,
    AnchorHistogram, PearsonResult, RankConsistency, RelationScore, ScoreRow, SettingAccuracy,
};
use crate::{Error, Result};

pub const HISTOGRAM_BIN_WIDTH: f64 = 0.1;
pub const SOLID_PROBABILITY: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub model_id: String,
    pub size_billions: Option<f64>,
    pub instruction_tuned: Option<bool>,
}

impl ModelMeta {
    pub fn bare(model_id: &str) -> Self {
        Self {
            model_id: model_id.to_string(),
            size_billions: None,
            instruction_tuned: None,
        }
    }
}

/// How per-relation values combine into a model's overall values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Unweighted mean over relations.
    #[default]
    Mean,
    /// Mean weighted by the number of scored triplets per relation.
    Triplets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSummary {
    pub model_id: String,
    pub relation_id: String,
    pub monitor: f64,
    pub pfd_mean: f64,
    pub ird_mean: f64,
    pub avg_anchor_prob: f64,
    pub scored_count: usize,
    pub excluded_count: usize,
    pub accuracy: AccuracyStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallRow {
    pub model_id: String,
    pub monitor: f64,
    pub avg_acc: f64,
    pub max_acc: f64,
    pub min_acc: f64,
    pub mean_anchor_prob: f64,
    pub relations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationCorrelation {
    pub relation_id: String,
    pub result: PearsonResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Correlations {
    /// MONITOR against average accuracy over models.
    pub overall: Option<PearsonResult>,
    pub per_relation: Vec<RelationCorrelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub model_id: String,
    pub primary: f64,
    pub ablation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ablation {
    pub name: String,
    pub consistency: RankConsistency,
    pub points: Vec<ScatterPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub group: String,
    pub summary: FiveNumber,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSeries {
    pub group: String,
    pub histogram: AnchorHistogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub model_id: String,
    pub size_billions: f64,
    pub monitor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PlotData {
    pub boxplots: Vec<BoxSummary>,
    pub histograms: Vec<HistogramSeries>,
    pub scale_curve: Vec<ScalePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub weighting: Weighting,
    pub models: Vec<ModelMeta>,
    pub overall: Vec<OverallRow>,
    pub per_relation: Vec<RelationSummary>,
    pub correlations: Correlations,
    pub ablations: Vec<Ablation>,
    pub plots: PlotData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Boxplot,
    Histogram,
    ScaleCurve,
    AblationScatter,
}

impl PlotKind {
    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::Boxplot => "boxplot.csv",
            PlotKind::Histogram => "histogram.csv",
            PlotKind::ScaleCurve => "scale_curve.csv",
            PlotKind::AblationScatter => "ablation_scatter.csv",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AggregateOptions {
    pub models: Vec<ModelMeta>,
    pub weighting: Weighting,
    /// Primary-anchor probabilities per (model, relation), for histograms.
    pub anchor_probs: BTreeMap<(String, String), Vec<f64>>,
}

type PairKey = (String, String);

/// Linear interpolation between closest ranks (the "type 7" rule).
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn five_number_summary(values: &[f64]) -> Result<FiveNumber> {
    if values.is_empty() {
        return Err(Error::EmptyInput("five-number summary of no values".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(FiveNumber {
        min: v[0],
        q1: quantile_type7(&v, 0.25),
        median: quantile_type7(&v, 0.5),
        q3: quantile_type7(&v, 0.75),
        max: v[v.len() - 1],
    })
}

fn weighted_mean(values: &[(f64, f64)]) -> f64 {
    let total: f64 = values.iter().map(|(_, w)| w).sum();
    values.iter().map(|(v, w)| v * w).sum::<f64>() / total
}

/// Overall MONITOR per model straight from score rows.
pub fn monitor_by_model(scores: &[ScoreRow], weighting: Weighting) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for s in scores {
        let w = match weighting {
            Weighting::Mean => 1.0,
            Weighting::Triplets => s.scored_count as f64,
        };
        groups
            .entry(s.model_id.clone())
            .or_default()
            .push((s.monitor, w));
    }
    groups
        .into_iter()
        .map(|(m, v)| (m, weighted_mean(&v)))
        .collect()
}

/// Combine per-relation scores and accuracies into a report.
pub fn aggregate(
    scores: &[ScoreRow],
    accuracy: &BTreeMap<PairKey, AccuracyStats>,
    options: &AggregateOptions,
) -> Result<ReliabilityReport> {
    let mut score_map: BTreeMap<PairKey, &ScoreRow> = BTreeMap::new();
    for s in scores {
        let key = (s.model_id.clone(), s.relation_id.clone());
        if score_map.insert(key, s).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate score for ({}, {})",
                s.model_id, s.relation_id
            )));
        }
    }
    let score_keys: BTreeSet<&PairKey> = score_map.keys().collect();
    let acc_keys: BTreeSet<&PairKey> = accuracy.keys().collect();
    let missing: Vec<PairKey> = score_keys
        .symmetric_difference(&acc_keys)
        .map(|k| (*k).clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }
    if score_map.is_empty() {
        return Err(Error::EmptyInput("no scores to aggregate".into()));
    }

    let per_relation: Vec<RelationSummary> = score_map
        .iter()
        .map(|(key, s)| RelationSummary {
            model_id: s.model_id.clone(),
            relation_id: s.relation_id.clone(),
            monitor: s.monitor,
            pfd_mean: s.pfd_mean,
            ird_mean: s.ird_mean,
            avg_anchor_prob: s.avg_anchor_prob,
            scored_count: s.scored_count,
            excluded_count: s.excluded_count,
            accuracy: accuracy[key].clone(),
        })
        .collect();

    // Model order: metadata order first, then remaining ids sorted.
    let mut models = options.models.clone();
    let known: BTreeSet<String> = models.iter().map(|m| m.model_id.clone()).collect();
    let extra: BTreeSet<&String> = per_relation
        .iter()
        .map(|r| &r.model_id)
        .filter(|m| !known.contains(*m))
        .collect();
    models.extend(extra.into_iter().map(|m| ModelMeta::bare(m)));
    models.retain(|m| per_relation.iter().any(|r| r.model_id == m.model_id));

    let overall: Vec<OverallRow> = models
        .iter()
        .map(|m| {
            let rows: Vec<&RelationSummary> = per_relation
                .iter()
                .filter(|r| r.model_id == m.model_id)
                .collect();
            let weight = |r: &RelationSummary| match options.weighting {
                Weighting::Mean => 1.0,
                Weighting::Triplets => r.scored_count as f64,
            };
            let accs: Vec<f64> = rows.iter().map(|r| r.accuracy.avg).collect();
            OverallRow {
                model_id: m.model_id.clone(),
                monitor: weighted_mean(
                    &rows
                        .iter()
                        .map(|r| (r.monitor, weight(r)))
                        .collect::<Vec<_>>(),
                ),
                avg_acc: accs.iter().sum::<f64>() / accs.len() as f64,
                max_acc: accs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                min_acc: accs.iter().copied().fold(f64::INFINITY, f64::min),
                mean_anchor_prob: weighted_mean(
                    &rows
                        .iter()
                        .map(|r| (r.avg_anchor_prob, weight(r)))
                        .collect::<Vec<_>>(),
                ),
                relations: rows.len(),
            }
        })
        .collect();

    let correlations = Correlations {
        overall: if overall.len() >= 3 {
            pearson(
                &overall.iter().map(|o| o.monitor).collect::<Vec<_>>(),
                &overall.iter().map(|o| o.avg_acc).collect::<Vec<_>>(),
            )
            .ok()
        } else {
            None
        },
        per_relation: {
            let relations: BTreeSet<&str> = per_relation
                .iter()
                .map(|r| r.relation_id.as_str())
                .collect();
            relations
                .into_iter()
                .filter_map(|rel| {
                    let rows: Vec<&RelationSummary> = per_relation
                        .iter()
                        .filter(|r| r.relation_id == rel)
                        .collect();
                    if rows.len() < 3 {
                        return None;
                    }
                    let xs: Vec<f64> = rows.iter().map(|r| r.monitor).collect();
                    let ys: Vec<f64> = rows.iter().map(|r| r.accuracy.avg).collect();
                    pearson(&xs, &ys).ok().map(|result| RelationCorrelation {
                        relation_id: rel.to_string(),
                        result,
                    })
                })
                .collect()
        },
    };

    let boxplots = per_relation
        .iter()
        .map(|r| {
            let values: Vec<f64> = r.accuracy.per_setting.iter().map(|(_, a)| *a).collect();
            Ok(BoxSummary {
                group: format!("{}/{}", r.model_id, r.relation_id),
                summary: five_number_summary(&values)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let histograms = options
        .anchor_probs
        .iter()
        .filter(|(_, probs)| !probs.is_empty())
        .map(|((m, r), probs)| {
            Ok(HistogramSeries {
                group: format!("{m}/{r}"),
                histogram: anchor_histogram(probs, HISTOGRAM_BIN_WIDTH, SOLID_PROBABILITY)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scale_curve: Vec<ScalePoint> = models
        .iter()
        .zip(&overall)
        .filter_map(|(m, o)| {
            m.size_billions.map(|size| ScalePoint {
                model_id: m.model_id.clone(),
                size_billions: size,
                monitor: o.monitor,
            })
        })
        .collect();
    scale_curve.sort_by(|a, b| {
        a.size_billions
            .total_cmp(&b.size_billions)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });

    Ok(ReliabilityReport {
        weighting: options.weighting,
        models,
        overall,
        per_relation,
        correlations,
        ablations: Vec::new(),
        plots: PlotData {
            boxplots,
            histograms,
            scale_curve,
        },
    })
}

impl ReliabilityReport {
    pub fn overall_monitors(&self) -> BTreeMap<String, f64> {
        self.overall
            .iter()
            .map(|o| (o.model_id.clone(), o.monitor))
            .collect()
    }

    /// Compare this report's overall monitors with those of another prompt
    /// setting (e.g. a sub-sampled frame group), keyed by model.
    pub fn add_ablation(&mut self, name: &str, other: &BTreeMap<String, f64>) -> Result<&Ablation> {
        let a = self.overall_monitors();
        let consistency = rank_consistency(&a, other)?;
        let points = a
            .iter()
            .map(|(m, v)| ScatterPoint {
                model_id: m.clone(),
                primary: *v,
                ablation: other[m],
            })
            .collect();
        self.ablations.push(Ablation {
            name: name.to_string(),
            consistency,
            points,
        });
        Ok(self.ablations.last().expect("just pushed"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

/// Render one plot series as CSV.
pub fn emit_plot_data(report: &ReliabilityReport, kind: PlotKind) -> Result<String> {
    let mut out = String::new();
    match kind {
        PlotKind::Boxplot => {
            if report.plots.boxplots.is_empty() {
                return Err(Error::MissingSeries("boxplot".into()));
            }
            out.push_str("group,min,q1,median,q3,max\n");
            for b in &report.plots.boxplots {
                let s = &b.summary;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    b.group,
                    f3(s.min),
                    f3(s.q1),
                    f3(s.median),
                    f3(s.q3),
                    f3(s.max)
                );
            }
        }
        PlotKind::Histogram => {
            if report.plots.histograms.is_empty() {
                return Err(Error::MissingSeries("histogram".into()));
            }
            out.push_str("group,bin_lo,bin_hi,count,n,solid_fraction\n");
            for h in &report.plots.histograms {
                for (k, count) in h.histogram.counts.iter().enumerate() {
                    let (lo, hi) = h.histogram.bin_edges(k);
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        h.group,
                        f3(lo),
                        f3(hi),
                        count,
                        h.histogram.n,
                        f3(h.histogram.solid_fraction)
                    );
                }
            }
        }
        PlotKind::ScaleCurve => {
            if report.plots.scale_curve.is_empty() {
                return Err(Error::MissingSeries("scale curve (no model sizes)".into()));
            }
            out.push_str("model_id,model_size_billions,monitor\n");
            for p in &report.plots.scale_curve {
                let _ = writeln!(out, "{},{},{}", p.model_id, p.size_billions, f3(p.monitor));
            }
        }
        PlotKind::AblationScatter => {
            if report.ablations.is_empty() {
                return Err(Error::MissingSeries("ablation scatter".into()));
            }
            out.push_str("ablation,model_id,primary,ablation\n");
            for a in &report.ablations {
                for p in &a.points {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        a.name,
                        p.model_id,
                        f3(p.primary),
                        f3(p.ablation)
                    );
                }
            }
        }
    }
    Ok(out)
}

fn overall_csv(report: &ReliabilityReport) -> String {
    let mut out = String::from(
        "model_id,size_billions,instruction_tuned,monitor,avg_acc,max_acc,min_acc,mean_anchor_prob,relations\n",
    );
    for (m, o) in report.models.iter().zip(&report.overall) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            o.model_id,
            opt(&m.size_billions),
            opt(&m.instruction_tuned),
            f3(o.monitor),
            f3(o.avg_acc),
            f3(o.max_acc),
            f3(o.min_acc),
            f3(o.mean_anchor_prob),
            o.relations
        );
    }
    out
}

fn per_relation_csv(report: &ReliabilityReport) -> String {
    let mut out = String::from(
        "model_id,relation_id,monitor,pfd_mean,ird_mean,avg_anchor_prob,avg_acc,max_acc,min_acc,std_acc,base_acc,scored_count,excluded_count\n",
    );
    for r in &report.per_relation {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model_id,
            r.relation_id,
            f3(r.monitor),
            f3(r.pfd_mean),
            f3(r.ird_mean),
            f3(r.avg_anchor_prob),
            f3(r.accuracy.avg),
            f3(r.accuracy.max),
            f3(r.accuracy.min),
            f3(r.accuracy.std),
            r.accuracy.base_acc.map(f3).unwrap_or_default(),
            r.scored_count,
            r.excluded_count
        );
    }
    out
}

fn correlations_csv(report: &ReliabilityReport) -> String {
    let mut out = String::from("scope,n,pearson_r,p_value\n");
    let mut row = |scope: &str, p: &PearsonResult| {
        let _ = writeln!(out, "{scope},{},{},{}", p.n, f3(p.r), f3(p.p_value));
    };
    if let Some(p) = &report.correlations.overall {
        row("overall", p);
    }
    for c in &report.correlations.per_relation {
        row(&c.relation_id, &c.result);
    }
    out
}

/// Write `overall.csv`, `per_relation.csv`, `correlations.csv`,
/// `report.json` and every non-empty plot CSV. Returns the written paths.
pub fn write_report(report: &ReliabilityReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![
        ("overall.csv", overall_csv(report)),
        ("per_relation.csv", per_relation_csv(report)),
        ("correlations.csv", correlations_csv(report)),
        ("report.json", report.to_json()? + "\n"),
    ];
    for kind in [
        PlotKind::Boxplot,
        PlotKind::Histogram,
        PlotKind::ScaleCurve,
        PlotKind::AblationScatter,
    ] {
        match emit_plot_data(report, kind) {
            Ok(body) => files.push((kind.file_name(), body)),
            Err(Error::MissingSeries(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_models_csv(path: &Path) -> Result<Vec<ModelMeta>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

fn files_matching(dir: &Path, prefix: &str, ext: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if name.starts_with(prefix) && name.ends_with(ext) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Every `scores*.csv` in `dir`.
pub fn load_scores_dir(dir: &Path) -> Result<Vec<ScoreRow>> {
    let mut rows = Vec::new();
    for p in files_matching(dir, "scores", ".csv")? {
        rows.extend(read_scores_csv(&p)?);
    }
    Ok(rows)
}

/// Every `accuracy*.csv` in `dir`.
pub fn load_accuracy_dir(dir: &Path) -> Result<Vec<SettingAccuracy>> {
    let mut rows = Vec::new();
    for p in files_matching(dir, "accuracy", ".csv")? {
        rows.extend(read_accuracy_csv(&p)?);
    }
    Ok(rows)
}

/// Primary-anchor probabilities from every `score_*.json` in `dir`.
pub fn load_anchor_probs_dir(dir: &Path) -> Result<BTreeMap<PairKey, Vec<f64>>> {
    let mut out = BTreeMap::new();
    for p in files_matching(dir, "score_", ".json")? {
        let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        let score: RelationScore = serde_json::from_str(&text)?;
        out.insert(
            (score.model_id.clone(), score.relation_id.clone()),
            score.anchor_probs(),
        );
    }
    Ok(out)
}
