use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exact-match tallies for one prompt setting of a (model, relation) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingAccuracy {
    pub model_id: String,
    pub relation_id: String,
    pub setting: String,
    pub correct: usize,
    pub total: usize,
}

impl SettingAccuracy {
    pub fn accuracy_pct(&self) -> f64 {
        100.0 * self.correct as f64 / self.total as f64
    }
}

/// Accuracy across prompt settings, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyStats {
    pub per_setting: Vec<(String, f64)>,
    pub avg: f64,
    pub max: f64,
    pub min: f64,
    /// Population standard deviation across settings.
    pub std: f64,
    /// Accuracy of the `QA_BASE` setting when present.
    pub base_acc: Option<f64>,
}

pub const BASE_SETTING: &str = "QA_BASE";

impl AccuracyStats {
    pub fn from_percentages(per_setting: Vec<(String, f64)>) -> Result<Self> {
        if per_setting.is_empty() {
            return Err(Error::EmptyInput("no accuracy settings".into()));
        }
        let n = per_setting.len() as f64;
        let avg = per_setting.iter().map(|(_, a)| a).sum::<f64>() / n;
        let var = per_setting
            .iter()
            .map(|(_, a)| (a - avg) * (a - avg))
            .sum::<f64>()
            / n;
        let max = per_setting
            .iter()
            .map(|(_, a)| *a)
            .fold(f64::NEG_INFINITY, f64::max);
        let min = per_setting
            .iter()
            .map(|(_, a)| *a)
            .fold(f64::INFINITY, f64::min);
        let base_acc = per_setting
            .iter()
            .find(|(s, _)| s == BASE_SETTING)
            .map(|(_, a)| *a);
        Ok(Self {
            per_setting,
            avg,
            max,
            min,
            std: var.sqrt(),
            base_acc,
        })
    }

    /// Aggregate the settings of each (model, relation) pair.
    pub fn by_relation(
        rows: &[SettingAccuracy],
    ) -> Result<BTreeMap<(String, String), AccuracyStats>> {
        let mut grouped: BTreeMap<(String, String), Vec<(String, f64)>> = BTreeMap::new();
        for r in rows {
            if r.total == 0 {
                return Err(Error::EmptyInput(format!(
                    "setting {} of ({}, {}) has no results",
                    r.setting, r.model_id, r.relation_id
                )));
            }
            grouped
                .entry((r.model_id.clone(), r.relation_id.clone()))
                .or_default()
                .push((r.setting.clone(), r.accuracy_pct()));
        }
        grouped
            .into_iter()
            .map(|(k, v)| Ok((k, AccuracyStats::from_percentages(v)?)))
            .collect()
    }
}

/// Per-setting correctness flags to accuracy statistics.
pub fn accuracy_stats(groups: &[(String, Vec<bool>)]) -> Result<AccuracyStats> {
    let mut per_setting = Vec::with_capacity(groups.len());
    for (name, flags) in groups {
        if flags.is_empty() {
            return Err(Error::EmptyInput(format!("setting {name} has no results")));
        }
        let correct = flags.iter().filter(|&&c| c).count();
        per_setting.push((name.clone(), 100.0 * correct as f64 / flags.len() as f64));
    }
    AccuracyStats::from_percentages(per_setting)
}
