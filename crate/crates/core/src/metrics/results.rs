use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::token_probs::TokenProbs;
use crate::{Error, Result};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// A backend's output for one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub schema_version: u32,
    pub probe_id: String,
    pub model_id: String,
    pub top1_text: String,
    pub anchor_token_probs: TokenProbs,
}

impl ProbeResult {
    pub fn new(
        probe_id: &str,
        model_id: &str,
        top1_text: &str,
        anchor_token_probs: TokenProbs,
    ) -> Self {
        Self {
            schema_version: RESULT_SCHEMA_VERSION,
            probe_id: probe_id.to_string(),
            model_id: model_id.to_string(),
            top1_text: top1_text.to_string(),
            anchor_token_probs,
        }
    }
}

pub fn parse_results_str(text: &str) -> Result<Vec<ProbeResult>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = idx + 1;
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| Error::MalformedRow {
                line,
                field: "json",
                reason: e.to_string(),
            })?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            None => {
                return Err(Error::MalformedRow {
                    line,
                    field: "schema_version",
                    reason: "missing or not an integer".into(),
                })
            }
            Some(v) if v != u64::from(RESULT_SCHEMA_VERSION) => {
                return Err(Error::SchemaVersion {
                    found: v as u32,
                    expected: RESULT_SCHEMA_VERSION,
                })
            }
            Some(_) => {}
        }
        let result: ProbeResult =
            serde_json::from_value(value).map_err(|e| Error::MalformedRow {
                line,
                field: "result",
                reason: e.to_string(),
            })?;
        result
            .anchor_token_probs
            .validate()
            .map_err(|e| Error::MalformedRow {
                line,
                field: "anchor_token_probs",
                reason: e.to_string(),
            })?;
        out.push(result);
    }
    Ok(out)
}

pub fn read_results(path: &Path) -> Result<Vec<ProbeResult>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_results_str(&text)
}

pub fn write_results(results: &[ProbeResult], path: &Path) -> Result<()> {
    let mut body = String::new();
    for r in results {
        body.push_str(&serde_json::to_string(r)?);
        body.push('\n');
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(body.as_bytes()).map_err(|e| Error::io(path, e))
}
