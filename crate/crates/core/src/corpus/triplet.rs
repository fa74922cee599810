use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A `<subject, relation, object>` fact with optional object aliases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactTriplet {
    pub triplet_id: String,
    pub relation_id: String,
    pub subject: String,
    pub object: String,
    #[serde(default)]
    pub object_aliases: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripletFormat {
    /// `triplet_id \t relation_id \t subject \t object [\t alias1|alias2|...]`
    Tsv,
    JsonLines,
}

impl TripletFormat {
    /// Guess from the file extension; anything but `.jsonl`/`.json` is TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => TripletFormat::JsonLines,
            _ => TripletFormat::Tsv,
        }
    }
}

pub fn read_triplets(path: &Path, format: TripletFormat) -> Result<Vec<FactTriplet>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_triplets_str(&text, format)
}

/// Alias of [`read_triplets`] matching the operation name used by the CLI.
pub fn parse_triplets(path: &Path, format: TripletFormat) -> Result<Vec<FactTriplet>> {
    read_triplets(path, format)
}

pub fn parse_triplets_str(text: &str, format: TripletFormat) -> Result<Vec<FactTriplet>> {
    let mut out = Vec::new();
    let mut seen_facts = HashSet::new();
    let mut seen_ids = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let triplet = match format {
            TripletFormat::Tsv => {
                if line == 1 && raw.starts_with("triplet_id\t") {
                    continue;
                }
                parse_tsv_row(raw, line)?
            }
            TripletFormat::JsonLines => parse_json_row(raw, line)?,
        };
        let triplet = validate(triplet, line)?;

        let key = (
            triplet.subject.clone(),
            triplet.relation_id.clone(),
            triplet.object.clone(),
        );
        if !seen_facts.insert(key) {
            continue;
        }
        if !seen_ids.insert(triplet.triplet_id.clone()) {
            return Err(Error::MalformedRow {
                line,
                field: "triplet_id",
                reason: format!("duplicate id {:?}", triplet.triplet_id),
            });
        }
        out.push(triplet);
    }
    Ok(out)
}

fn parse_tsv_row(raw: &str, line: usize) -> Result<FactTriplet> {
    let cols: Vec<&str> = raw.trim_end_matches('\r').split('\t').collect();
    if !(4..=5).contains(&cols.len()) {
        return Err(Error::MalformedRow {
            line,
            field: "columns",
            reason: format!("expected 4 or 5 tab-separated fields, found {}", cols.len()),
        });
    }
    let object_aliases = cols
        .get(4)
        .map(|a| {
            a.split('|')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect()
        })
        .unwrap_or_default();
    Ok(FactTriplet {
        triplet_id: cols[0].to_string(),
        relation_id: cols[1].to_string(),
        subject: cols[2].to_string(),
        object: cols[3].to_string(),
        object_aliases,
    })
}

fn parse_json_row(raw: &str, line: usize) -> Result<FactTriplet> {
    serde_json::from_str(raw).map_err(|e| Error::MalformedRow {
        line,
        field: "json",
        reason: e.to_string(),
    })
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn validate(t: FactTriplet, line: usize) -> Result<FactTriplet> {
    let check = |field: &'static str, value: String| -> Result<String> {
        if value.is_empty() {
            return Err(Error::MalformedRow {
                line,
                field,
                reason: "empty after whitespace normalization".into(),
            });
        }
        if value.contains("[X]") || value.contains("[Y]") {
            return Err(Error::MalformedRow {
                line,
                field,
                reason: "contains a template slot marker".into(),
            });
        }
        Ok(value)
    };
    Ok(FactTriplet {
        triplet_id: check("triplet_id", t.triplet_id.trim().to_string())?,
        relation_id: check("relation_id", t.relation_id.trim().to_string())?,
        subject: check("subject", collapse(&t.subject))?,
        object: check("object", collapse(&t.object))?,
        object_aliases: t
            .object_aliases
            .iter()
            .map(|a| collapse(a))
            .filter(|a| !a.is_empty())
            .collect(),
    })
}
